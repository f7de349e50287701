#include "relgraph/views.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace relgraph {

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& name) {
  auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

std::string stored_name(const std::string& qualified) {
  auto [alias, col] = split_qualified(qualified);
  return alias + "_" + col;
}

bool occurrences_overlap(const std::vector<const ViewOccurrence*>& occs) {
  for (size_t i = 0; i < occs.size(); ++i) {
    std::set<int> vs(occs[i]->map.begin(), occs[i]->map.end());
    for (size_t j = i + 1; j < occs.size(); ++j)
      for (int v : occs[j]->map)
        if (vs.count(v)) return true;
  }
  return false;
}

}  // namespace

std::vector<ViewDef> propose_views(const std::vector<ExecutableQuery>& queries, const Database& db,
                                   const std::string& name_prefix, const std::set<std::string>& taken,
                                   const MatchOptions& opts) {
  std::vector<const JoinGraph*> graphs;
  graphs.reserve(queries.size());
  for (const auto& q : queries) graphs.push_back(&q.graph);

  std::vector<ViewDef> out;
  size_t ordinal = 1;
  for (auto& group : find_pattern_groups(graphs, opts)) {
    ViewDef view;
    view.definition = group.pattern;

    // per-query occurrence lists; queries with overlapping occurrences are unusable
    std::map<size_t, std::vector<const PatternOccurrence*>> per_query;
    for (const auto& occ : group.occurrences) per_query[occ.query_index].push_back(&occ);
    for (auto& [qi, occs] : per_query) {
      std::vector<const ViewOccurrence*> probe;
      std::vector<ViewOccurrence> tmp;
      tmp.reserve(occs.size());
      for (const auto* o : occs) tmp.push_back({o->query_index, o->map, o->edges});
      for (const auto& t : tmp) probe.push_back(&t);
      if (occurrences_overlap(probe)) continue;
      for (auto& t : tmp) view.consumers.push_back(std::move(t));
    }
    if (view.consumers.size() < 2) continue;

    // need-analysis: crossing join keys plus whatever consumers output from inside
    std::set<std::string> needed;
    for (const auto& occ : view.consumers) {
      const ExecutableQuery& q = queries[occ.query_index];
      std::map<int, int> to_pattern;  // consumer vertex -> pattern vertex
      for (size_t p = 0; p < occ.map.size(); ++p) to_pattern[occ.map[p]] = int(p);
      std::set<int> inside(occ.map.begin(), occ.map.end());
      std::set<int> matched(occ.edges.begin(), occ.edges.end());

      for (size_t ei = 0; ei < q.graph.edges.size(); ++ei) {
        if (matched.count(int(ei))) continue;
        const auto& e = q.graph.edges[ei];
        for (const Term* t : {&e.cond.lhs, &e.cond.rhs}) {
          auto [alias, col] = split_qualified(*t->column);
          int v = q.graph.find_vertex(alias);
          if (inside.count(v))
            needed.insert(view.definition.vertices[to_pattern[v]].alias + "." + col);
        }
      }
      for (const auto& ocol : q.output_columns) {
        auto [alias, col] = split_qualified(ocol);
        int v = q.graph.find_vertex(alias);
        if (v >= 0 && inside.count(v))
          needed.insert(view.definition.vertices[to_pattern[v]].alias + "." + col);
      }
    }
    view.output_columns.assign(needed.begin(), needed.end());
    for (const auto& c : view.output_columns) view.stored_columns.push_back(stored_name(c));

    std::string name;
    do {
      name = name_prefix + std::to_string(ordinal++);
    } while (db.has_table(name) || taken.count(name));
    view.name = name;
    out.push_back(std::move(view));
  }
  return out;
}

ExecutableQuery rewrite_with_view(const ExecutableQuery& q, const ViewDef& view, size_t query_index) {
  std::vector<const ViewOccurrence*> occs;
  for (const auto& occ : view.consumers)
    if (occ.query_index == query_index) occs.push_back(&occ);
  if (occs.empty()) return q;
  if (occurrences_overlap(occs))
    throw OccurrenceOverlapError("view " + view.name + ": occurrences overlap in query " + q.name);

  // consumer column -> rewritten column, for every vertex swallowed by a view
  std::map<std::string, std::string> col_map;       // "alias.col" -> "viewalias.stored"
  std::map<int, size_t> vertex_occurrence;          // consumer vertex -> occurrence ordinal
  std::set<int> removed_edges;
  for (size_t k = 0; k < occs.size(); ++k) {
    const ViewOccurrence& occ = *occs[k];
    std::string valias = view.name + "_" + std::to_string(k + 1);
    for (size_t p = 0; p < occ.map.size(); ++p) {
      vertex_occurrence[occ.map[p]] = k;
      const std::string& calias = q.graph.vertices[occ.map[p]].alias;
      const std::string& palias = view.definition.vertices[p].alias;
      for (size_t ci = 0; ci < view.output_columns.size(); ++ci) {
        auto [oa, oc] = split_qualified(view.output_columns[ci]);
        if (oa == palias) col_map[calias + "." + oc] = valias + "." + view.stored_columns[ci];
      }
    }
    removed_edges.insert(occ.edges.begin(), occ.edges.end());
  }

  ExecutableQuery out;
  out.name = q.name;

  std::map<int, int> new_pos;  // surviving consumer vertex -> new index
  for (size_t v = 0; v < q.graph.vertices.size(); ++v) {
    if (vertex_occurrence.count(int(v))) continue;
    new_pos[int(v)] = int(out.graph.vertices.size());
    out.graph.vertices.push_back(q.graph.vertices[v]);
    out.graph.filters.push_back(q.graph.filters[v]);
  }
  std::vector<int> view_vertex(occs.size(), -1);
  for (size_t k = 0; k < occs.size(); ++k) {
    view_vertex[k] = int(out.graph.vertices.size());
    out.graph.vertices.push_back({view.name, view.name + "_" + std::to_string(k + 1)});
    out.graph.filters.push_back({});
  }

  auto remap_term = [&](Term t) {
    if (t.is_column()) {
      auto it = col_map.find(*t.column);
      if (it != col_map.end()) t.column = it->second;
    }
    return t;
  };

  for (size_t ei = 0; ei < q.graph.edges.size(); ++ei) {
    if (removed_edges.count(int(ei))) continue;
    const auto& e = q.graph.edges[ei];
    auto endpoint = [&](int v) {
      auto it = vertex_occurrence.find(v);
      return it == vertex_occurrence.end() ? new_pos.at(v) : view_vertex[it->second];
    };
    JoinEdge ne;
    int u = endpoint(e.u), v = endpoint(e.v);
    ne.u = std::min(u, v);
    ne.v = std::max(u, v);
    ne.type = e.type;
    ne.cond.op = e.cond.op;
    ne.cond.lhs = remap_term(e.cond.lhs);
    ne.cond.rhs = remap_term(e.cond.rhs);
    if (ne.cond.lhs.is_column() && ne.cond.rhs.is_column() && *ne.cond.rhs.column < *ne.cond.lhs.column) {
      std::swap(ne.cond.lhs, ne.cond.rhs);
      ne.cond.op = flip_cmp_op(ne.cond.op);
    }
    out.graph.edges.push_back(std::move(ne));
  }

  for (const auto& col : q.output_columns) {
    auto it = col_map.find(col);
    out.output_columns.push_back(it == col_map.end() ? col : it->second);
  }
  return out;
}

Relation build_view_relation(const ViewDef& view, const Database& db, const CostParams& params, ExecContext* ctx) {
  Relation rel = run_query({view.name, view.definition, view.output_columns}, db, params, ctx);
  std::vector<Column> cols;
  cols.reserve(rel.schema.size());
  for (size_t i = 0; i < rel.schema.size(); ++i) cols.push_back({view.stored_columns[i], rel.schema.at(i).kind});
  rel.schema = Schema(std::move(cols));
  return rel;
}

std::vector<Relation> execute_with_views(const std::vector<ViewDef>& views,
                                         const std::vector<ExecutableQuery>& rewritten, const Database& db,
                                         const CostParams& params, ExecContext* ctx) {
  // topological materialization order: a view may scan earlier views
  std::map<std::string, size_t> by_name;
  for (size_t i = 0; i < views.size(); ++i) by_name[views[i].name] = i;

  std::vector<int> state(views.size(), 0);
  std::vector<size_t> order;
  std::function<void(size_t)> visit = [&](size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) throw std::runtime_error("view dependency cycle at " + views[i].name);
    state[i] = 1;
    for (const auto& v : views[i].definition.vertices) {
      auto it = by_name.find(v.base);
      if (it != by_name.end()) visit(it->second);
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (size_t i = 0; i < views.size(); ++i) visit(i);

  Database scoped = db;  // copies the catalog, shares relation storage
  for (size_t i : order) {
    Relation rel = build_view_relation(views[i], scoped, params, ctx);
    uint64_t bytes = 0;
    scoped.materialize(views[i].name, std::move(rel), &bytes);
    if (ctx) {
      ctx->metrics.bytes_materialized += bytes;
      ctx->metrics.views_materialized++;
    }
  }

  std::vector<Relation> out;
  out.reserve(rewritten.size());
  for (const auto& q : rewritten) out.push_back(run_query(q, scoped, params, ctx));
  return out;
}

}  // namespace relgraph
