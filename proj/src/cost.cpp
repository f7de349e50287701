#include "relgraph/cost.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace relgraph {

CostParams CostParams::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open cost params: " + json_path);
  nlohmann::json j = nlohmann::json::parse(in);
  CostParams p;
  p.page_access = j.value("page_access", p.page_access);
  p.build_per_tuple = j.value("build_per_tuple", p.build_per_tuple);
  p.probe_per_tuple = j.value("probe_per_tuple", p.probe_per_tuple);
  p.output_per_tuple = j.value("output_per_tuple", p.output_per_tuple);
  p.page_size = j.value("page_size", p.page_size);
  if (p.page_access <= 0 || p.build_per_tuple <= 0 || p.probe_per_tuple <= 0 || p.output_per_tuple <= 0 ||
      p.page_size == 0)
    throw std::runtime_error("cost params must be strictly positive");
  return p;
}

std::string CostParams::to_json() const {
  nlohmann::json j{{"page_access", page_access},
                   {"build_per_tuple", build_per_tuple},
                   {"probe_per_tuple", probe_per_tuple},
                   {"output_per_tuple", output_per_tuple},
                   {"page_size", page_size}};
  return j.dump(2);
}

void CostParams::save(const std::string& json_path) const {
  std::ofstream out(json_path);
  out << to_json() << "\n";
}

bool StatsProvider::has(const std::string& table) const {
  return overrides_.count(table) > 0 || db_->has_table(table);
}

TableProfile StatsProvider::profile(const std::string& table) const {
  auto it = overrides_.find(table);
  if (it != overrides_.end()) return it->second;
  const TableStats& s = db_->stats(table);  // throws for unknown tables
  const Schema& schema = db_->table(table).schema;
  TableProfile p;
  p.rows = double(s.cardinality);
  p.pages = double(s.page_count);
  for (size_t i = 0; i < schema.size(); ++i) {
    p.distinct[schema.at(i).name] = double(s.columns[i].distinct);
    p.width[schema.at(i).name] = s.columns[i].avg_width;
  }
  return p;
}

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& name) {
  auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

struct Estimator {
  const JoinGraph& g;
  const StatsProvider& stats;
  const CostParams& params;
  std::vector<TableProfile> profiles;  // per vertex

  Estimator(const JoinGraph& graph, const StatsProvider& sp, const CostParams& cp)
      : g(graph), stats(sp), params(cp) {
    profiles.reserve(g.vertices.size());
    for (const auto& v : g.vertices) profiles.push_back(stats.profile(v.base));
  }

  double base_distinct(int vertex, const std::string& col) const {
    auto it = profiles[vertex].distinct.find(col);
    if (it == profiles[vertex].distinct.end()) return std::max(1.0, profiles[vertex].rows);
    return std::max(1.0, it->second);
  }

  double col_width(int vertex, const std::string& col) const {
    auto it = profiles[vertex].width.find(col);
    return it == profiles[vertex].width.end() ? 8.0 : it->second;
  }

  // distinct count of a column inside an intermediate of `rows` rows
  double scoped_distinct(int vertex, const std::string& col, double rows) const {
    return std::max(1.0, std::min(base_distinct(vertex, col), std::max(rows, 1.0)));
  }

  double filter_selectivity(int vertex, const Comparison& c) const {
    if (c.rhs.is_column() && c.lhs.is_column()) {
      auto [la, lc] = split_qualified(*c.lhs.column);
      auto [ra, rc] = split_qualified(*c.rhs.column);
      if (c.op == CmpOp::Eq)
        return 1.0 / std::max(base_distinct(vertex, lc), base_distinct(vertex, rc));
      return 1.0 / 3.0;
    }
    auto [alias, col] = split_qualified(*c.lhs.column);
    if (c.op == CmpOp::Eq) return 1.0 / base_distinct(vertex, col);
    return 1.0 / 3.0;
  }

  double filtered_rows(int vertex) const {
    double rows = profiles[vertex].rows;
    for (const auto& f : g.filters[vertex]) rows *= filter_selectivity(vertex, f);
    return rows;
  }

  // selectivity of one join edge, given current row counts of both sides
  double edge_selectivity(const JoinEdge& e, double rows_u, double rows_v) const {
    if (e.cond.op != CmpOp::Eq) return 1.0 / 3.0;
    auto [la, lc] = split_qualified(*e.cond.lhs.column);
    auto [ra, rc] = split_qualified(*e.cond.rhs.column);
    int lv = g.find_vertex(la), rv = g.find_vertex(ra);
    double dl = scoped_distinct(lv, lc, lv == e.u ? rows_u : rows_v);
    double dr = scoped_distinct(rv, rc, rv == e.u ? rows_u : rows_v);
    return 1.0 / std::max(dl, dr);
  }
};

}  // namespace

CardinalityEstimate estimate_cardinality(const JoinGraph& g, const StatsProvider& stats,
                                         const std::vector<std::string>& output_columns, const CostParams& params) {
  Estimator est(g, stats, params);
  CardinalityEstimate out;
  size_t n = g.vertices.size();
  out.filtered_rows.resize(n);
  for (size_t i = 0; i < n; ++i) out.filtered_rows[i] = est.filtered_rows(int(i));

  if (n == 1) {
    out.join_order = {0};
    out.rows = out.filtered_rows[0];
  } else {
    // first join: the pair with the smallest estimate
    double best = -1;
    int bu = -1, bv = -1;
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : g.edges) pairs.insert({e.u, e.v});
    for (auto [u, v] : pairs) {
      double sel = 1.0;
      for (const auto& e : g.edges)
        if (e.u == u && e.v == v) sel *= est.edge_selectivity(e, out.filtered_rows[u], out.filtered_rows[v]);
      double cand = out.filtered_rows[u] * out.filtered_rows[v] * sel;
      bool better = best < 0 || cand < best;
      if (!better && cand == best) {
        auto key = [&](int a, int b) {
          std::string x = g.vertices[a].alias, y = g.vertices[b].alias;
          return x < y ? x + "|" + y : y + "|" + x;
        };
        better = key(u, v) < key(bu, bv);
      }
      if (better) {
        best = cand;
        bu = u;
        bv = v;
      }
    }

    // probe side = the larger input; hash tables build over the rest
    int t1 = bu, t2 = bv;
    if (out.filtered_rows[bv] > out.filtered_rows[bu] ||
        (out.filtered_rows[bv] == out.filtered_rows[bu] && g.vertices[bv].alias < g.vertices[bu].alias)) {
      t1 = bv;
      t2 = bu;
    }
    out.join_order = {t1, t2};
    out.steps.push_back({t2, out.filtered_rows[t1], best});
    double cur = best;

    std::set<int> attached{t1, t2};
    while (attached.size() < n) {
      double best_next = -1;
      int best_vertex = -1;
      for (size_t t = 0; t < n; ++t) {
        if (attached.count(int(t))) continue;
        double sel = 1.0;
        bool adjacent = false;
        for (const auto& e : g.edges) {
          bool tu = e.u == int(t), tv = e.v == int(t);
          if (!tu && !tv) continue;
          int other = tu ? e.v : e.u;
          if (!attached.count(other)) continue;
          adjacent = true;
          sel *= est.edge_selectivity(e, e.u == int(t) ? out.filtered_rows[t] : cur,
                                      e.v == int(t) ? out.filtered_rows[t] : cur);
        }
        if (!adjacent) continue;
        double cand = cur * out.filtered_rows[t] * sel;
        bool better = best_next < 0 || cand < best_next ||
                      (cand == best_next && g.vertices[t].alias < g.vertices[best_vertex].alias);
        if (better) {
          best_next = cand;
          best_vertex = int(t);
        }
      }
      out.steps.push_back({best_vertex, cur, best_next});
      out.join_order.push_back(best_vertex);
      attached.insert(best_vertex);
      cur = best_next;
    }
    out.rows = cur;
  }

  out.width = 0;
  for (const auto& col : output_columns) {
    auto [alias, c] = split_qualified(col);
    int v = g.find_vertex(alias);
    out.width += v < 0 ? 8.0 : est.col_width(v, c);
  }
  double bytes = out.rows * out.width;
  out.pages = std::max(1.0, std::ceil(bytes / double(params.page_size)));
  return out;
}

namespace {

double build_cost(double pages, double rows, const CostParams& p) {
  return p.page_access * pages + p.build_per_tuple * rows;
}

}  // namespace

CostBreakdown cost_query(const JoinGraph& g, const StatsProvider& stats, const CostParams& params,
                         const std::vector<std::string>& output_columns) {
  CostBreakdown out;
  out.estimate = estimate_cardinality(g, stats, output_columns, params);

  if (g.vertices.size() == 1) {
    double scan = params.page_access * stats.profile(g.vertices[0].base).pages;
    out.terms.push_back({"scan " + g.vertices[0].alias, scan});
    out.total = scan;
    return out;
  }

  const auto& order = out.estimate.join_order;
  for (size_t i = 1; i < order.size(); ++i) {
    int t = order[i];
    double c = build_cost(stats.profile(g.vertices[t].base).pages, out.estimate.filtered_rows[t], params);
    out.terms.push_back({"build " + g.vertices[t].alias, c});
    out.total += c;
  }
  double probe = params.page_access * stats.profile(g.vertices[order[0]].base).pages;
  for (const auto& step : out.estimate.steps)
    probe += params.probe_per_tuple * step.input_rows + params.output_per_tuple * step.output_rows;
  out.terms.push_back({"probe " + g.vertices[order[0]].alias, probe});
  out.total += probe;
  return out;
}

CostBreakdown cost_merged_parts(const JoinGraph& shared, const std::vector<std::string>& shared_columns,
                                const std::vector<MergedBranch>& branches, const StatsProvider& stats,
                                const CostParams& params) {
  CostBreakdown out;

  CostBreakdown shared_cost = cost_query(shared, stats, params, shared_columns);
  out.terms.push_back({"shared subquery", shared_cost.total});
  out.total += shared_cost.total;
  out.estimate = shared_cost.estimate;

  std::vector<CardinalityEstimate> branch_est;
  for (const auto& b : branches) {
    CostBreakdown c = cost_query(*b.graph, stats, params, b.output_columns);
    out.terms.push_back({"subquery " + b.label, c.total});
    out.total += c.total;
    branch_est.push_back(c.estimate);
  }

  // outer pass: build each branch result, probe the shared result through them
  double outer = 0;
  for (size_t i = 0; i < branches.size(); ++i)
    outer += build_cost(branch_est[i].pages, branch_est[i].rows, params);

  double cur = shared_cost.estimate.rows;
  double probe = params.page_access * shared_cost.estimate.pages;
  for (size_t i = 0; i < branches.size(); ++i) {
    double sel = 1.0;
    for (const auto& c : branches[i].connecting) {
      if (c.op != CmpOp::Eq) {
        sel *= 1.0 / 3.0;
        continue;
      }
      double d_shared = 1.0, d_branch = 1.0;
      for (const Term* t : {&c.lhs, &c.rhs}) {
        auto [alias, col] = split_qualified(*t->column);
        int sv = shared.find_vertex(alias);
        if (sv >= 0) {
          auto p = stats.profile(shared.vertices[sv].base);
          auto it = p.distinct.find(col);
          double d = it == p.distinct.end() ? std::max(1.0, p.rows) : std::max(1.0, it->second);
          d_shared = std::max(d_shared, std::min(d, std::max(cur, 1.0)));
        } else {
          int bv = branches[i].graph->find_vertex(alias);
          auto p = stats.profile(branches[i].graph->vertices[bv].base);
          auto it = p.distinct.find(col);
          double d = it == p.distinct.end() ? std::max(1.0, p.rows) : std::max(1.0, it->second);
          d_branch = std::max(d_branch, std::min(d, std::max(branch_est[i].rows, 1.0)));
        }
      }
      sel *= 1.0 / std::max(d_shared, d_branch);
    }
    double inner = cur * branch_est[i].rows * sel;
    double next = std::max(inner, cur);  // outer joins keep every preserved-side row
    probe += params.probe_per_tuple * cur + params.output_per_tuple * next;
    cur = next;
  }
  outer += probe;
  out.terms.push_back({"outer combination", outer});
  out.total += outer;
  return out;
}

TableProfile estimate_view_profile(const ViewCostPiece& view, const StatsProvider& stats, const CostParams& params) {
  CardinalityEstimate est = estimate_cardinality(*view.definition, stats, view.output_columns, params);
  TableProfile p;
  p.rows = est.rows;
  p.pages = est.pages;
  for (size_t i = 0; i < view.output_columns.size(); ++i) {
    auto [alias, col] = split_qualified(view.output_columns[i]);
    int v = view.definition->find_vertex(alias);
    TableProfile src = stats.profile(view.definition->vertices[v].base);
    auto dit = src.distinct.find(col);
    double d = dit == src.distinct.end() ? std::max(1.0, src.rows) : dit->second;
    p.distinct[view.stored_columns[i]] = std::min(d, std::max(est.rows, 1.0));
    auto wit = src.width.find(col);
    p.width[view.stored_columns[i]] = wit == src.width.end() ? 8.0 : wit->second;
  }
  return p;
}

CostBreakdown cost_mv_plan(const std::vector<ViewCostPiece>& views, const std::vector<QueryCostPiece>& rewritten,
                           const StatsProvider& stats, const CostParams& params) {
  CostBreakdown out;
  StatsProvider scoped = stats;
  for (const auto& v : views) {
    CostBreakdown def_cost = cost_query(*v.definition, scoped, params, v.output_columns);
    TableProfile profile = estimate_view_profile(v, scoped, params);
    double write = params.page_access * profile.pages;
    out.terms.push_back({"view " + v.stored_name + " join", def_cost.total});
    out.terms.push_back({"view " + v.stored_name + " write", write});
    out.total += def_cost.total + write;
    scoped.add_override(v.stored_name, std::move(profile));
  }
  for (const auto& q : rewritten) {
    CostBreakdown c = cost_query(*q.graph, scoped, params, q.output_columns);
    out.terms.push_back({"query " + q.label, c.total});
    out.total += c.total;
  }
  return out;
}

CalibrationResult calibrate_cost_params(size_t rows) {
  using clock = std::chrono::steady_clock;
  CalibrationResult result;

  std::vector<int64_t> keys(rows);
  uint64_t state = 0x9e3779b97f4a7c15ull;
  for (auto& k : keys) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    k = int64_t(state % (rows / 2 + 1));
  }

  auto t0 = clock::now();
  std::unordered_map<int64_t, uint32_t> table;
  table.reserve(rows);
  for (size_t i = 0; i < rows; ++i) table.emplace(keys[i], uint32_t(i));
  auto t1 = clock::now();

  size_t hits = 0;
  for (size_t i = 0; i < rows; ++i) hits += table.count(keys[rows - 1 - i]);
  auto t2 = clock::now();

  std::vector<std::pair<int64_t, int64_t>> emitted;
  emitted.reserve(rows);
  for (size_t i = 0; i < rows; ++i) emitted.emplace_back(keys[i], int64_t(i));
  auto t3 = clock::now();

  std::string page(8192, 'x');
  std::string sink;
  size_t page_count = 512;
  sink.reserve(page.size() * page_count);
  for (size_t i = 0; i < page_count; ++i) sink.append(page);
  auto t4 = clock::now();

  if (hits == 0) sink.clear();  // defeat dead-code elimination of the probe loop

  auto ns = [](auto a, auto b) { return double(std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count()); };
  result.build_ns_per_tuple = ns(t0, t1) / double(rows);
  result.probe_ns_per_tuple = ns(t1, t2) / double(rows);
  result.output_ns_per_tuple = ns(t2, t3) / double(rows);
  result.page_write_ns = ns(t3, t4) / double(page_count);

  CostParams p;
  double unit = std::max(result.build_ns_per_tuple, 1e-3);
  p.build_per_tuple = 1.0;
  p.probe_per_tuple = std::max(result.probe_ns_per_tuple / unit, 1e-3);
  p.output_per_tuple = std::max(result.output_ns_per_tuple / unit, 1e-3);
  p.page_access = std::max(result.page_write_ns / unit, 1e-3);
  result.suggested = p;
  return result;
}

}  // namespace relgraph
