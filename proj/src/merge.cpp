#include "relgraph/merge.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace relgraph {

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& name) {
  auto dot = name.find('.');
  return {name.substr(0, dot), name.substr(dot + 1)};
}

Comparison rename_comparison(const Comparison& c, const std::map<std::string, std::string>& rename) {
  Comparison out = c;
  for (Term* t : {&out.lhs, &out.rhs}) {
    if (!t->is_column()) continue;
    auto [alias, col] = split_qualified(*t->column);
    auto it = rename.find(alias);
    if (it != rename.end()) t->column = it->second + "." + col;
  }
  return out;
}

void append_sorted_unique(std::vector<std::string>& dst, const std::string& col) {
  if (std::find(dst.begin(), dst.end(), col) == dst.end()) dst.push_back(col);
}

}  // namespace

std::string MergedUnit::shared_signature() const {
  std::vector<int> all(shared.edges.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = int(i);
  return join_step_signature(shared, all);
}

MergedUnit build_merged_unit(const ExecutableQuery& q1, const ExecutableQuery& q2, const Decomposition& d) {
  MergedUnit unit;
  unit.decomposition = d;
  const JoinGraph& g1 = q1.graph;
  const JoinGraph& g2 = q2.graph;

  // Shared subquery lives in q1's namespace.
  std::map<int, int> shared_pos1;  // g1 vertex id -> shared vertex index
  for (size_t p = 0; p < d.shared.map1.size(); ++p) {
    int v1 = d.shared.map1[p];
    shared_pos1[v1] = int(unit.shared.vertices.size());
    unit.shared.vertices.push_back(g1.vertices[v1]);
    unit.shared.filters.push_back(g1.filters[v1]);
  }
  for (int eid : d.shared.edges1) {
    const auto& e = g1.edges[eid];
    JoinEdge se;
    se.u = std::min(shared_pos1[e.u], shared_pos1[e.v]);
    se.v = std::max(shared_pos1[e.u], shared_pos1[e.v]);
    se.type = JoinType::Inner;
    se.cond = e.cond;
    unit.shared.edges.push_back(std::move(se));
  }

  // q2 alias -> merged alias: shared vertices land on their q1 counterpart,
  // non-shared vertices keep their alias unless it is already taken.
  std::set<std::string> used;
  for (const auto& v : g1.vertices) used.insert(v.alias);
  std::map<std::string, std::string> rename2;
  for (size_t p = 0; p < d.shared.map2.size(); ++p)
    rename2[g2.vertices[d.shared.map2[p]].alias] = g1.vertices[d.shared.map1[p]].alias;
  for (const auto& part : d.parts2) {
    for (int v : part.vertices) {
      std::string alias = g2.vertices[v].alias;
      int bump = 2;
      while (used.count(alias)) alias = g2.vertices[v].alias + "_" + std::to_string(bump++);
      used.insert(alias);
      rename2[g2.vertices[v].alias] = alias;
    }
  }

  // Full merged graph: shared + both sides' branches; connecting edges outer.
  std::map<std::string, int> merged_pos;
  auto add_merged_vertex = [&](const TableInstance& inst, const std::vector<Comparison>& filters) {
    merged_pos[inst.alias] = int(unit.merged.vertices.size());
    unit.merged.vertices.push_back(inst);
    unit.merged.filters.push_back(filters);
  };
  for (size_t p = 0; p < d.shared.map1.size(); ++p) {
    int v1 = d.shared.map1[p];
    add_merged_vertex(g1.vertices[v1], g1.filters[v1]);
  }

  auto add_branch = [&](const JoinGraph& g, const NonSharedPart& part, int origin,
                        const std::map<std::string, std::string>& rename, const std::string& label) {
    MergedSubquery sub;
    sub.origin = origin;
    sub.label = label;
    std::map<int, int> pos;
    for (int v : part.vertices) {
      TableInstance inst = g.vertices[v];
      auto it = rename.find(inst.alias);
      if (it != rename.end()) inst.alias = it->second;
      std::vector<Comparison> filters;
      for (const auto& f : g.filters[v]) filters.push_back(rename_comparison(f, rename));
      pos[v] = int(sub.graph.vertices.size());
      sub.graph.vertices.push_back(inst);
      sub.graph.filters.push_back(filters);
      add_merged_vertex(inst, filters);
    }
    for (int eid : part.internal_edges) {
      const auto& e = g.edges[eid];
      JoinEdge ie;
      ie.u = std::min(pos[e.u], pos[e.v]);
      ie.v = std::max(pos[e.u], pos[e.v]);
      ie.type = JoinType::Inner;
      ie.cond = rename_comparison(e.cond, rename);
      sub.graph.edges.push_back(std::move(ie));
    }
    for (int eid : part.connecting_edges) sub.connecting.push_back(rename_comparison(g.edges[eid].cond, rename));
    return sub;
  };

  // branches, q1 side then q2 side
  std::map<std::string, std::string> identity;
  int branch_no = 0;
  for (const auto& part : d.parts1)
    unit.subqueries.push_back(add_branch(g1, part, 0, identity, "u1_" + std::to_string(++branch_no)));
  branch_no = 0;
  for (const auto& part : d.parts2)
    unit.subqueries.push_back(add_branch(g2, part, 1, rename2, "u2_" + std::to_string(++branch_no)));

  // merged edges: shared inner edges, branch internal edges, connecting outer edges
  auto add_merged_edge = [&](const Comparison& cond, JoinType type) {
    auto [la, lc] = split_qualified(*cond.lhs.column);
    auto [ra, rc] = split_qualified(*cond.rhs.column);
    JoinEdge e;
    int u = merged_pos.at(la), v = merged_pos.at(ra);
    e.u = std::min(u, v);
    e.v = std::max(u, v);
    e.type = type;
    e.cond = cond;
    unit.merged.edges.push_back(std::move(e));
  };
  for (const auto& e : unit.shared.edges) add_merged_edge(e.cond, JoinType::Inner);
  for (const auto& sub : unit.subqueries) {
    for (const auto& e : sub.graph.edges) add_merged_edge(e.cond, JoinType::Inner);
    for (const auto& c : sub.connecting) add_merged_edge(c, JoinType::Outer);
  }

  // origin output mappings
  unit.origins[0].name = q1.name;
  for (const auto& col : q1.output_columns) unit.origins[0].outputs.push_back({col, col});
  unit.origins[1].name = q2.name;
  for (const auto& col : q2.output_columns) {
    auto [alias, c] = split_qualified(col);
    unit.origins[1].outputs.push_back({rename2.at(alias) + "." + c, col});
  }

  // column needs: shared columns serve origin outputs and connecting edges;
  // each branch exposes its own output needs and connecting columns
  std::set<std::string> shared_aliases;
  for (const auto& v : unit.shared.vertices) shared_aliases.insert(v.alias);

  auto branch_of_alias = [&](const std::string& alias) -> MergedSubquery* {
    for (auto& sub : unit.subqueries)
      if (sub.graph.find_vertex(alias) >= 0) return &sub;
    return nullptr;
  };

  for (const auto& origin : unit.origins) {
    for (const auto& [merged_col, origin_col] : origin.outputs) {
      auto [alias, c] = split_qualified(merged_col);
      if (shared_aliases.count(alias)) {
        append_sorted_unique(unit.shared_columns, merged_col);
      } else {
        MergedSubquery* sub = branch_of_alias(alias);
        append_sorted_unique(sub->output_columns, merged_col);
      }
    }
  }
  for (auto& sub : unit.subqueries) {
    for (const auto& c : sub.connecting) {
      for (const Term* t : {&c.lhs, &c.rhs}) {
        auto [alias, col] = split_qualified(*t->column);
        if (shared_aliases.count(alias)) append_sorted_unique(unit.shared_columns, *t->column);
        else append_sorted_unique(sub.output_columns, *t->column);
      }
    }
  }
  std::sort(unit.shared_columns.begin(), unit.shared_columns.end());
  for (auto& sub : unit.subqueries) std::sort(sub.output_columns.begin(), sub.output_columns.end());

  return unit;
}

CostBreakdown cost_merged(const MergedUnit& unit, const StatsProvider& stats, const CostParams& params) {
  std::vector<MergedBranch> branches;
  branches.reserve(unit.subqueries.size());
  for (const auto& sub : unit.subqueries) {
    MergedBranch b;
    b.graph = &sub.graph;
    b.output_columns = sub.output_columns;
    b.connecting = sub.connecting;
    b.label = sub.label;
    branches.push_back(std::move(b));
  }
  return cost_merged_parts(unit.shared, unit.shared_columns, branches, stats, params);
}

MergedUnit merge_pair(const ExecutableQuery& q1, const ExecutableQuery& q2, const StatsProvider& stats,
                      const CostParams& params, const MatchOptions& opts) {
  auto search = enumerate_decompositions(q1.graph, q2.graph, opts);

  MergedUnit best;
  double best_cost = 0;
  std::string best_key;
  bool first = true;
  for (const auto& d : search.decompositions) {
    MergedUnit unit = build_merged_unit(q1, q2, d);
    double cost = cost_merged(unit, stats, params).total;
    std::string key = d.encoding();
    if (first || cost < best_cost || (cost == best_cost && key < best_key)) {
      best = std::move(unit);
      best_cost = cost;
      best_key = key;
      first = false;
    }
  }
  return best;
}

namespace {

struct BranchIndex {
  Relation rel;
  std::vector<size_t> key_cols;            // columns of rel forming the hash key
  std::vector<size_t> shared_key_cols;     // matching columns of the shared relation
  std::vector<Comparison> extra;           // non-equality connecting conditions
  std::unordered_map<size_t, std::vector<size_t>> buckets;  // key hash -> row ids (verified exactly)

  bool has_keys() const { return !key_cols.empty(); }
};

size_t key_hash(const Row& row, const std::vector<size_t>& cols) {
  size_t h = 14695981039346656037ull;
  for (size_t c : cols) {
    h ^= row[c].hash();
    h *= 1099511628211ull;
  }
  return h;
}

bool keys_equal(const Row& a, const std::vector<size_t>& ac, const Row& b, const std::vector<size_t>& bc) {
  for (size_t i = 0; i < ac.size(); ++i)
    if (!sql_eq(a[ac[i]], b[bc[i]])) return false;
  return true;
}

bool eval_extra(const std::vector<Comparison>& extra, const Relation& shared, const Row& srow,
                const Relation& branch, const Row& brow) {
  for (const auto& c : extra) {
    auto value = [&](const Term& t) -> const Value& {
      auto idx = shared.schema.find(*t.column);
      if (idx) return srow[*idx];
      return brow[branch.schema.index_of(*t.column)];
    };
    const Value& a = value(c.lhs);
    const Value& b = value(c.rhs);
    bool ok = false;
    switch (c.op) {
      case CmpOp::Eq: ok = sql_compare(a, b, 0, 1, 0); break;
      case CmpOp::Ne: ok = sql_compare(a, b, 1, 0, 1); break;
      case CmpOp::Lt: ok = sql_compare(a, b, 1, 0, 0); break;
      case CmpOp::Le: ok = sql_compare(a, b, 1, 1, 0); break;
      case CmpOp::Gt: ok = sql_compare(a, b, 0, 0, 1); break;
      case CmpOp::Ge: ok = sql_compare(a, b, 0, 1, 1); break;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::array<Relation, 2> execute_merged(const MergedUnit& unit, const Database& db, const CostParams& params,
                                       ExecContext* ctx) {
  ExecutableQuery shared_q{"shared", unit.shared, unit.shared_columns};
  Relation shared = run_query(shared_q, db, params, ctx);

  std::vector<BranchIndex> branches;
  branches.reserve(unit.subqueries.size());
  for (const auto& sub : unit.subqueries) {
    BranchIndex bi;
    bi.rel = run_query({sub.label, sub.graph, sub.output_columns}, db, params, ctx);
    for (const auto& c : sub.connecting) {
      bool eq = c.op == CmpOp::Eq;
      auto l = *c.lhs.column, r = *c.rhs.column;
      auto l_shared = shared.schema.find(l), r_shared = shared.schema.find(r);
      if (eq && l_shared && !r_shared) {
        bi.shared_key_cols.push_back(*l_shared);
        bi.key_cols.push_back(bi.rel.schema.index_of(r));
      } else if (eq && r_shared && !l_shared) {
        bi.shared_key_cols.push_back(*r_shared);
        bi.key_cols.push_back(bi.rel.schema.index_of(l));
      } else {
        bi.extra.push_back(c);
      }
    }
    if (bi.has_keys()) {
      bi.buckets.reserve(bi.rel.rows.size());
      for (size_t i = 0; i < bi.rel.rows.size(); ++i) {
        bool has_null = false;
        for (size_t c : bi.key_cols)
          if (bi.rel.rows[i][c].is_null()) { has_null = true; break; }
        if (!has_null) bi.buckets[key_hash(bi.rel.rows[i], bi.key_cols)].push_back(i);
      }
    }
    if (ctx) {
      ctx->metrics.hash_join_steps++;
      ctx->metrics.tuples_built += bi.rel.rows.size();
    }
    branches.push_back(std::move(bi));
  }

  // output wiring: every origin column comes from the shared row or one branch
  struct Source {
    int branch = -1;  // -1 = shared
    size_t col = 0;
  };
  std::array<Relation, 2> results;
  std::array<std::vector<Source>, 2> wiring;
  for (int o = 0; o < 2; ++o) {
    std::vector<Column> cols;
    for (const auto& [merged_col, origin_col] : unit.origins[o].outputs) {
      Source src;
      if (auto idx = shared.schema.find(merged_col)) {
        src.col = *idx;
      } else {
        for (size_t b = 0; b < branches.size(); ++b) {
          auto bidx = branches[b].rel.schema.find(merged_col);
          if (bidx) {
            src.branch = int(b);
            src.col = *bidx;
            break;
          }
        }
      }
      wiring[o].push_back(src);
      const Schema& s = src.branch < 0 ? shared.schema : branches[src.branch].rel.schema;
      cols.push_back({origin_col, s.at(src.col).kind});
    }
    results[o].schema = Schema(std::move(cols));
  }

  std::array<std::vector<int>, 2> origin_branches;
  for (size_t b = 0; b < branches.size(); ++b) origin_branches[unit.subqueries[b].origin].push_back(int(b));

  std::vector<std::vector<size_t>> matches(branches.size());
  for (const auto& srow : shared.rows) {
    if (ctx) ctx->metrics.tuples_probed += branches.size();
    for (size_t b = 0; b < branches.size(); ++b) {
      auto& m = matches[b];
      m.clear();
      BranchIndex& bi = branches[b];
      if (bi.has_keys()) {
        bool has_null = false;
        for (size_t c : bi.shared_key_cols)
          if (srow[c].is_null()) { has_null = true; break; }
        if (!has_null) {
          auto it = bi.buckets.find(key_hash(srow, bi.shared_key_cols));
          if (it != bi.buckets.end()) {
            for (size_t ri : it->second) {
              if (!keys_equal(srow, bi.shared_key_cols, bi.rel.rows[ri], bi.key_cols)) continue;
              if (!eval_extra(bi.extra, shared, srow, bi.rel, bi.rel.rows[ri])) continue;
              m.push_back(ri);
            }
          }
        }
      } else {
        for (size_t ri = 0; ri < bi.rel.rows.size(); ++ri)
          if (eval_extra(bi.extra, shared, srow, bi.rel, bi.rel.rows[ri])) m.push_back(ri);
      }
    }

    for (int o = 0; o < 2; ++o) {
      const auto& bids = origin_branches[o];
      bool all = true;
      for (int b : bids)
        if (matches[b].empty()) { all = false; break; }
      if (!all) continue;

      // cross-combination of this origin's branch matches only
      std::vector<size_t> pick(bids.size(), 0);
      while (true) {
        Row row;
        row.reserve(wiring[o].size());
        for (const auto& src : wiring[o]) {
          if (src.branch < 0) {
            row.push_back(srow[src.col]);
          } else {
            size_t pos = size_t(std::find(bids.begin(), bids.end(), src.branch) - bids.begin());
            row.push_back(branches[src.branch].rel.rows[matches[src.branch][pick[pos]]][src.col]);
          }
        }
        results[o].rows.push_back(std::move(row));

        size_t k = 0;
        while (k < pick.size()) {
          if (++pick[k] < matches[bids[k]].size()) break;
          pick[k] = 0;
          ++k;
        }
        if (k == pick.size()) break;
      }
    }
  }
  if (ctx) ctx->metrics.tuples_emitted += results[0].rows.size() + results[1].rows.size();
  return results;
}

Relation merged_outer_relation(const MergedUnit& unit, const Database& db, const CostParams& params,
                               ExecContext* ctx) {
  Relation acc = run_query({"shared", unit.shared, unit.shared_columns}, db, params, ctx);
  for (const auto& sub : unit.subqueries) {
    Relation branch = run_query({sub.label, sub.graph, sub.output_columns}, db, params, ctx);
    std::vector<JoinKey> keys;
    std::vector<Comparison> residual;
    for (const auto& c : sub.connecting) {
      bool l_acc = acc.schema.find(*c.lhs.column).has_value();
      if (c.op == CmpOp::Eq) {
        keys.push_back(l_acc ? JoinKey{*c.lhs.column, *c.rhs.column} : JoinKey{*c.rhs.column, *c.lhs.column});
      } else {
        residual.push_back(c);
      }
    }
    if (!keys.empty()) acc = hash_left_outer_join(acc, branch, keys, residual, ctx);
    else acc = nested_loop_join(acc, branch, residual, true, ctx);
  }
  return acc;
}

}  // namespace relgraph
