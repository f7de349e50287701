#pragma once

// Independent reference evaluation: nested loops in FROM order, predicates
// applied as soon as both sides are present, no hashing, no reordering and no
// column pruning. Deliberately shares nothing with the engine's join path.

#include <map>
#include <string>
#include <vector>

#include "relgraph/database.hpp"
#include "relgraph/query.hpp"

namespace relgraph::testing {

inline bool oracle_eval(const Comparison& c, const std::map<std::string, Value>& row) {
  auto term = [&](const Term& t) -> const Value& {
    if (!t.is_column()) return t.constant;
    return row.at(*t.column);
  };
  const Value& a = term(c.lhs);
  const Value& b = term(c.rhs);
  switch (c.op) {
    case CmpOp::Eq: return sql_compare(a, b, 0, 1, 0);
    case CmpOp::Ne: return sql_compare(a, b, 1, 0, 1);
    case CmpOp::Lt: return sql_compare(a, b, 1, 0, 0);
    case CmpOp::Le: return sql_compare(a, b, 1, 1, 0);
    case CmpOp::Gt: return sql_compare(a, b, 0, 0, 1);
    case CmpOp::Ge: return sql_compare(a, b, 0, 1, 1);
  }
  return false;
}

// Every filter and join condition of the graph, tagged with the aliases it
// references so it fires at the first point both are bound.
struct OraclePredicate {
  Comparison cmp;
  std::vector<std::string> aliases;
};

inline Relation oracle_execute(const ExecutableQuery& q, const Database& db) {
  const JoinGraph& g = q.graph;

  std::vector<OraclePredicate> predicates;
  for (size_t v = 0; v < g.vertices.size(); ++v)
    for (const auto& f : g.filters[v]) predicates.push_back({f, {g.vertices[v].alias}});
  for (const auto& e : g.edges)
    predicates.push_back({e.cond, {g.vertices[e.u].alias, g.vertices[e.v].alias}});

  std::vector<std::map<std::string, Value>> acc{{}};
  std::vector<std::string> bound;
  std::vector<bool> applied(predicates.size(), false);

  for (const auto& inst : g.vertices) {
    bound.push_back(inst.alias);
    std::vector<size_t> due;
    for (size_t p = 0; p < predicates.size(); ++p) {
      if (applied[p]) continue;
      bool ready = true;
      for (const auto& a : predicates[p].aliases)
        ready = ready && std::find(bound.begin(), bound.end(), a) != bound.end();
      if (ready) {
        due.push_back(p);
        applied[p] = true;
      }
    }

    const Relation& table = db.table(inst.base);
    std::vector<std::map<std::string, Value>> next;
    for (const auto& partial : acc) {
      for (const auto& trow : table.rows) {
        std::map<std::string, Value> combined = partial;
        for (size_t c = 0; c < table.schema.size(); ++c)
          combined[inst.alias + "." + table.schema.at(c).name] = trow[c];
        bool ok = true;
        for (size_t p : due)
          if (!oracle_eval(predicates[p].cmp, combined)) { ok = false; break; }
        if (ok) next.push_back(std::move(combined));
      }
    }
    acc = std::move(next);
  }

  Relation out;
  std::vector<Column> cols;
  for (const auto& name : q.output_columns) {
    auto dot = name.find('.');
    std::string alias = name.substr(0, dot), col = name.substr(dot + 1);
    int v = g.find_vertex(alias);
    const Schema& schema = db.table(g.vertices[v].base).schema;
    cols.push_back({name, schema.at(schema.index_of(col)).kind});
  }
  out.schema = Schema(std::move(cols));
  for (const auto& row : acc) {
    Row r;
    r.reserve(q.output_columns.size());
    for (const auto& name : q.output_columns) r.push_back(row.at(name));
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace relgraph::testing
