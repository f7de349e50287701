#include "relgraph/query.hpp"

#include <algorithm>
#include <set>

namespace relgraph {

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& name) {
  auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

}  // namespace

ExecutableQuery query_from_edge(const EdgeDef& edge) {
  ExecutableQuery q;
  q.name = edge.label;
  q.graph = build_join_graph(edge.query);
  q.output_columns.push_back(edge.src_binding.qualified());
  q.output_columns.push_back(edge.dst_binding.qualified());
  for (const auto& s : edge.query.select_list) q.output_columns.push_back(s.qualified());
  return q;
}

Relation scan_vertex(const JoinGraph& g, int vertex, const Database& db, const std::vector<std::string>& keep,
                     ExecContext* ctx) {
  const TableInstance& inst = g.vertices[size_t(vertex)];
  const Relation& base = db.table(inst.base);
  if (ctx) ctx->metrics.table_scans[inst.base]++;

  Relation out;
  std::vector<Column> cols;
  cols.reserve(base.schema.size());
  for (const auto& c : base.schema.columns()) cols.push_back({inst.alias + "." + c.name, c.kind});
  out.schema = Schema(std::move(cols));
  out.rows = base.rows;

  if (!g.filters[size_t(vertex)].empty()) out = select(out, g.filters[size_t(vertex)]);

  if (!keep.empty()) {
    std::vector<std::string> wanted;
    for (const auto& c : out.schema.columns())
      if (std::find(keep.begin(), keep.end(), c.name) != keep.end()) wanted.push_back(c.name);
    out = project(out, wanted, false);
  }
  return out;
}

namespace {

// Columns required at or after the point where `remaining` vertices are still
// unattached: query outputs plus both sides of any edge touching them.
std::vector<std::string> columns_needed(const ExecutableQuery& q, const std::set<int>& remaining) {
  std::set<std::string> need(q.output_columns.begin(), q.output_columns.end());
  for (const auto& e : q.graph.edges) {
    if (!remaining.count(e.u) && !remaining.count(e.v)) continue;
    need.insert(*e.cond.lhs.column);
    need.insert(*e.cond.rhs.column);
  }
  return {need.begin(), need.end()};
}

Relation prune(Relation rel, const std::vector<std::string>& need) {
  std::vector<std::string> keep;
  for (const auto& c : rel.schema.columns())
    if (std::find(need.begin(), need.end(), c.name) != need.end()) keep.push_back(c.name);
  if (keep.size() == rel.schema.size()) return rel;
  return project(rel, keep, false);
}

}  // namespace

Relation run_query(const ExecutableQuery& q, const Database& db, const CostParams& params, ExecContext* ctx) {
  const JoinGraph& g = q.graph;
  if (g.vertices.empty()) throw std::invalid_argument("query has no tables");

  StatsProvider stats(db);
  CardinalityEstimate est = estimate_cardinality(g, stats, q.output_columns, params);
  const std::vector<int>& order = est.join_order;

  std::set<int> remaining(order.begin(), order.end());
  remaining.erase(order[0]);

  Relation current = scan_vertex(g, order[0], db, columns_needed(q, remaining), ctx);

  for (size_t k = 1; k < order.size(); ++k) {
    int t = order[k];

    std::vector<int> step_edges;
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
      const auto& e = g.edges[ei];
      bool tu = e.u == t, tv = e.v == t;
      if (!tu && !tv) continue;
      int other = tu ? e.v : e.u;
      if (remaining.count(other)) continue;  // joined at a later step
      step_edges.push_back(int(ei));
    }

    // scan while t still counts as remaining, so this step's keys survive
    Relation right = scan_vertex(g, t, db, columns_needed(q, remaining), ctx);
    remaining.erase(t);

    std::vector<JoinKey> keys;
    std::vector<Comparison> residual;
    for (int ei : step_edges) {
      const auto& e = g.edges[ei];
      if (e.cond.op == CmpOp::Eq) {
        auto [la, lc] = split_qualified(*e.cond.lhs.column);
        std::string l = *e.cond.lhs.column, r = *e.cond.rhs.column;
        if (la == g.vertices[t].alias) std::swap(l, r);  // keep the new table on the right
        keys.push_back({l, r});
      } else {
        residual.push_back(e.cond);
      }
    }

    std::string signature = join_step_signature(g, step_edges);
    if (!keys.empty()) {
      current = hash_inner_join(current, right, keys, residual, ctx, signature);
    } else {
      current = nested_loop_join(current, right, residual, false, ctx, signature);
    }
    current = prune(std::move(current), columns_needed(q, remaining));
  }

  return project(current, q.output_columns, false);
}

size_t true_cardinality(const ExecutableQuery& q, const Database& db, const CostParams& params) {
  return run_query(q, db, params).rows.size();
}

}  // namespace relgraph
