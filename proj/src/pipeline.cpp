#include "relgraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"

namespace relgraph {

RunMode run_mode_from_name(const std::string& name) {
  if (name == "naive") return RunMode::Naive;
  if (name == "js-oj-only") return RunMode::OjOnly;
  if (name == "js-mv-only") return RunMode::MvOnly;
  if (name == "hybrid") return RunMode::Hybrid;
  throw std::invalid_argument("unknown mode '" + name + "' (naive, js-oj-only, js-mv-only, hybrid)");
}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Naive: return "naive";
    case RunMode::OjOnly: return "js-oj-only";
    case RunMode::MvOnly: return "js-mv-only";
    case RunMode::Hybrid: return "hybrid";
  }
  return "?";
}

namespace {

int row_props_compare(const Row& a, const Row& b) { return compare_rows(a, b); }

}  // namespace

void PropertyGraph::canonicalize() {
  std::sort(vertices.begin(), vertices.end(), [](const VertexSet& a, const VertexSet& b) { return a.label < b.label; });
  std::sort(edges.begin(), edges.end(), [](const EdgeSet& a, const EdgeSet& b) { return a.label < b.label; });

  for (auto& vs : vertices) {
    std::vector<size_t> idx(vs.ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) { return vs.ids[x] < vs.ids[y]; });
    std::vector<Value> ids;
    std::vector<Row> props;
    ids.reserve(idx.size());
    props.reserve(idx.size());
    for (size_t i : idx) {
      ids.push_back(vs.ids[i]);
      props.push_back(vs.properties[i]);
    }
    vs.ids = std::move(ids);
    vs.properties = std::move(props);
  }
  for (auto& es : edges) {
    std::vector<size_t> idx(es.src.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t x, size_t y) {
      int c = es.src[x].compare(es.src[y]);
      if (c != 0) return c < 0;
      c = es.dst[x].compare(es.dst[y]);
      if (c != 0) return c < 0;
      return row_props_compare(es.properties[x], es.properties[y]) < 0;
    });
    std::vector<Value> src, dst;
    std::vector<Row> props;
    for (size_t i : idx) {
      src.push_back(es.src[i]);
      dst.push_back(es.dst[i]);
      props.push_back(es.properties[i]);
    }
    es.src = std::move(src);
    es.dst = std::move(dst);
    es.properties = std::move(props);
  }
}

size_t PropertyGraph::vertex_count() const {
  size_t n = 0;
  for (const auto& vs : vertices) n += vs.ids.size();
  return n;
}

size_t PropertyGraph::edge_count() const {
  size_t n = 0;
  for (const auto& es : edges) n += es.src.size();
  return n;
}

bool graphs_equal(const PropertyGraph& a, const PropertyGraph& b) {
  if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
  for (size_t i = 0; i < a.vertices.size(); ++i) {
    const auto& x = a.vertices[i];
    const auto& y = b.vertices[i];
    if (x.label != y.label || x.property_names != y.property_names || x.ids.size() != y.ids.size()) return false;
    for (size_t r = 0; r < x.ids.size(); ++r)
      if (!(x.ids[r] == y.ids[r]) || x.properties[r] != y.properties[r]) return false;
  }
  for (size_t i = 0; i < a.edges.size(); ++i) {
    const auto& x = a.edges[i];
    const auto& y = b.edges[i];
    if (x.label != y.label || x.src_label != y.src_label || x.dst_label != y.dst_label ||
        x.property_names != y.property_names || x.src.size() != y.src.size())
      return false;
    for (size_t r = 0; r < x.src.size(); ++r)
      if (!(x.src[r] == y.src[r]) || !(x.dst[r] == y.dst[r]) || x.properties[r] != y.properties[r]) return false;
  }
  return true;
}

namespace {

VertexSet extract_vertices(const VertexDef& def, const Database& db) {
  VertexSet out;
  out.label = def.label;
  const Relation& table = db.table(def.table);
  size_t id_idx = table.schema.index_of(def.id_column);

  std::vector<size_t> prop_idx;
  for (const auto& s : def.query.select_list) {
    out.property_names.push_back(s.column);
    prop_idx.push_back(table.schema.index_of(s.column));
  }

  std::set<Value> seen;
  for (const auto& row : table.rows) {
    const Value& id = row[id_idx];
    if (id.is_null())
      throw std::runtime_error("vertex '" + def.label + "': null id in table " + def.table);
    if (!seen.insert(id).second)
      throw std::runtime_error("vertex '" + def.label + "': duplicate id " + id.to_string() + " in table " +
                               def.table);
    out.ids.push_back(id);
    Row props;
    props.reserve(prop_idx.size());
    for (size_t c : prop_idx) props.push_back(row[c]);
    out.properties.push_back(std::move(props));
  }
  return out;
}

// property column names: bare when unambiguous within the edge, qualified otherwise
std::vector<std::string> edge_property_names(const EdgeDef& def) {
  std::map<std::string, int> bare_count;
  for (const auto& s : def.query.select_list) bare_count[s.column]++;
  std::vector<std::string> names;
  for (const auto& s : def.query.select_list)
    names.push_back(bare_count[s.column] > 1 ? s.alias + "." + s.column : s.column);
  return names;
}

EdgeSet edges_from_relation(const EdgeDef& def, const Relation& rel, bool dedup) {
  EdgeSet out;
  out.label = def.label;
  out.src_label = def.src_label;
  out.dst_label = def.dst_label;
  out.property_names = edge_property_names(def);

  std::vector<Row> rows = rel.rows;
  if (dedup) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return compare_rows(a, b) < 0; });
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }
  for (auto& row : rows) {
    out.src.push_back(row[0]);
    out.dst.push_back(row[1]);
    out.properties.push_back(Row(row.begin() + 2, row.end()));
  }
  return out;
}

PlannerOptions planner_options(const RunConfig& cfg) {
  PlannerOptions opts;
  opts.match = cfg.match;
  switch (cfg.mode) {
    case RunMode::Naive:
      opts.allow_merge = false;
      opts.allow_views = false;
      break;
    case RunMode::OjOnly: opts.allow_views = false; break;
    case RunMode::MvOnly: opts.allow_merge = false; break;
    case RunMode::Hybrid: break;
  }
  return opts;
}

}  // namespace

ExtractReport extract(const GraphModelDef& model, const Database& db, const RunConfig& cfg) {
  auto diagnostics = validate_against_catalog(model, db);
  if (!diagnostics.empty()) {
    std::string msg = "model does not match the catalog:";
    for (const auto& d : diagnostics) msg += "\n  " + d.message;
    throw ValidationError(msg, std::move(diagnostics));
  }

  using clock = std::chrono::steady_clock;
  auto wall_start = clock::now();
  auto millis_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  ExtractReport report;

  std::vector<ExecutableQuery> queries;
  queries.reserve(model.edges.size());
  for (const auto& e : model.edges) queries.push_back(query_from_edge(e));

  PlannerOptions opts = planner_options(cfg);
  report.plan = cfg.mode == RunMode::Naive ? baseline_plan(queries, db, cfg.params, opts)
                                           : optimize(queries, db, cfg.params, opts);
  report.estimated_cost = plan_cost(report.plan, db, cfg.params).total;

  ExecContext ctx;

  for (const auto& v : model.vertices) {
    auto t0 = clock::now();
    report.graph.vertices.push_back(extract_vertices(v, db));
    report.unit_times.push_back({"vertices " + v.label, millis_since(t0)});
  }

  Database scoped = db;  // view materialization stays local to this run
  std::map<std::string, Relation> edge_results;
  for (const auto& unit : report.plan.units) {
    if (const auto* s = std::get_if<ViewStageUnit>(&unit)) {
      auto t0 = clock::now();
      Relation rel = build_view_relation(s->view, scoped, cfg.params, &ctx);
      uint64_t bytes = 0;
      scoped.materialize(s->view.name, std::move(rel), &bytes);
      ctx.metrics.bytes_materialized += bytes;
      ctx.metrics.views_materialized++;
      report.unit_times.push_back({"view " + s->view.name, millis_since(t0)});
    } else if (const auto* p = std::get_if<PlainUnit>(&unit)) {
      auto t0 = clock::now();
      edge_results[p->query.name] = run_query(p->query, scoped, cfg.params, &ctx);
      report.unit_times.push_back({"query " + p->query.name, millis_since(t0)});
    } else if (const auto* m = std::get_if<MergedPlanUnit>(&unit)) {
      auto t0 = clock::now();
      auto results = execute_merged(m->unit, scoped, cfg.params, &ctx);
      edge_results[m->unit.origins[0].name] = std::move(results[0]);
      edge_results[m->unit.origins[1].name] = std::move(results[1]);
      report.unit_times.push_back(
          {"merged " + m->unit.origins[0].name + "+" + m->unit.origins[1].name, millis_since(t0)});
    }
  }

  for (const auto& e : model.edges) report.graph.edges.push_back(edges_from_relation(e, edge_results.at(e.label), cfg.dedup_edges));

  if (!cfg.allow_dangling) {
    std::map<std::string, std::set<Value>> ids_by_label;
    for (const auto& vs : report.graph.vertices) {
      auto& ids = ids_by_label[vs.label];
      ids.insert(vs.ids.begin(), vs.ids.end());
    }
    for (const auto& es : report.graph.edges) {
      const auto& src_ids = ids_by_label[es.src_label];
      const auto& dst_ids = ids_by_label[es.dst_label];
      for (size_t i = 0; i < es.src.size(); ++i) {
        if (!src_ids.count(es.src[i]))
          throw std::runtime_error("edge '" + es.label + "': source id " + es.src[i].to_string() +
                                   " has no vertex with label " + es.src_label);
        if (!dst_ids.count(es.dst[i]))
          throw std::runtime_error("edge '" + es.label + "': destination id " + es.dst[i].to_string() +
                                   " has no vertex with label " + es.dst_label);
      }
    }
  }

  report.graph.canonicalize();
  report.metrics = ctx.metrics;
  report.wall_millis = millis_since(wall_start);
  return report;
}

namespace {

void write_csv_file(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i], ',');
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i], ',');
    out << "\n";
  }
}

nlohmann::json value_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return nullptr;
    case ValueKind::Int: return v.as_int();
    case ValueKind::Float: return v.as_float();
    case ValueKind::Text: return v.as_text();
    case ValueKind::Bool: return v.as_bool();
  }
  return nullptr;
}

}  // namespace

void write_graph(const PropertyGraph& graph, const std::string& dir, OutputFormat format) {
  std::filesystem::create_directories(dir);
  auto base = std::filesystem::path(dir);

  for (const auto& vs : graph.vertices) {
    if (format == OutputFormat::Csv) {
      std::vector<std::string> header{"id"};
      header.insert(header.end(), vs.property_names.begin(), vs.property_names.end());
      std::vector<std::vector<std::string>> rows;
      for (size_t i = 0; i < vs.ids.size(); ++i) {
        std::vector<std::string> row{vs.ids[i].to_string()};
        for (const auto& p : vs.properties[i]) row.push_back(p.to_string());
        rows.push_back(std::move(row));
      }
      write_csv_file(base / ("vertices_" + vs.label + ".csv"), header, rows);
    } else {
      std::ofstream out(base / ("vertices_" + vs.label + ".jsonl"));
      for (size_t i = 0; i < vs.ids.size(); ++i) {
        nlohmann::json props;
        for (size_t p = 0; p < vs.property_names.size(); ++p)
          props[vs.property_names[p]] = value_json(vs.properties[i][p]);
        nlohmann::json j{{"label", vs.label}, {"id", value_json(vs.ids[i])}, {"properties", std::move(props)}};
        out << j.dump() << "\n";
      }
    }
  }
  for (const auto& es : graph.edges) {
    if (format == OutputFormat::Csv) {
      std::vector<std::string> header{"src", "dst"};
      header.insert(header.end(), es.property_names.begin(), es.property_names.end());
      std::vector<std::vector<std::string>> rows;
      for (size_t i = 0; i < es.src.size(); ++i) {
        std::vector<std::string> row{es.src[i].to_string(), es.dst[i].to_string()};
        for (const auto& p : es.properties[i]) row.push_back(p.to_string());
        rows.push_back(std::move(row));
      }
      write_csv_file(base / ("edges_" + es.label + ".csv"), header, rows);
    } else {
      std::ofstream out(base / ("edges_" + es.label + ".jsonl"));
      for (size_t i = 0; i < es.src.size(); ++i) {
        nlohmann::json props;
        for (size_t p = 0; p < es.property_names.size(); ++p)
          props[es.property_names[p]] = value_json(es.properties[i][p]);
        nlohmann::json j{{"label", es.label},
                         {"src", value_json(es.src[i])},
                         {"dst", value_json(es.dst[i])},
                         {"properties", std::move(props)}};
        out << j.dump() << "\n";
      }
    }
  }
}

std::string metrics_json(const ExtractReport& report) {
  nlohmann::json j;
  j["wall_millis"] = report.wall_millis;
  j["estimated_cost"] = report.estimated_cost;
  j["vertices"] = report.graph.vertex_count();
  j["edges"] = report.graph.edge_count();
  j["unit_times"] = nlohmann::json::array();
  for (const auto& t : report.unit_times) j["unit_times"].push_back({{"unit", t.label}, {"millis", t.millis}});
  const auto& m = report.metrics;
  j["operators"] = {{"hash_join_steps", m.hash_join_steps},
                    {"nested_loop_steps", m.nested_loop_steps},
                    {"tuples_built", m.tuples_built},
                    {"tuples_probed", m.tuples_probed},
                    {"tuples_emitted", m.tuples_emitted},
                    {"bytes_materialized", m.bytes_materialized},
                    {"views_materialized", m.views_materialized}};
  j["join_builds"] = m.join_builds;
  j["table_scans"] = m.table_scans;
  return j.dump(2);
}

}  // namespace relgraph
