#pragma once

// Small construction helpers shared by the test suites.

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "relgraph/database.hpp"
#include "relgraph/query.hpp"

namespace relgraph::testing {

inline Value iv(int64_t v) { return Value::of_int(v); }
inline Value tv(const std::string& v) { return Value::of_text(v); }
inline Value fv(double v) { return Value::of_float(v); }
inline Value nv() { return Value::null(); }

// Integer relation with columns named c0, c1, ...; nullopt becomes null.
inline Relation int_rel(std::initializer_list<std::vector<std::optional<int64_t>>> rows, size_t arity) {
  Relation rel;
  std::vector<Column> cols;
  for (size_t i = 0; i < arity; ++i) cols.push_back({"c" + std::to_string(i), ValueKind::Int});
  rel.schema = Schema(std::move(cols));
  for (const auto& r : rows) {
    Row row;
    for (const auto& v : r) row.push_back(v ? iv(*v) : nv());
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

inline ExecutableQuery make_query(const std::string& name, const std::string& sql,
                                  std::vector<std::string> outputs, const Database& db) {
  ExecutableQuery q;
  q.name = name;
  q.graph = build_join_graph(parse_query(sql));
  if (outputs.empty()) {
    for (const auto& v : q.graph.vertices) {
      const Schema& schema = db.table(v.base).schema;
      for (const auto& c : schema.columns()) outputs.push_back(v.alias + "." + c.name);
    }
  }
  q.output_columns = std::move(outputs);
  return q;
}

inline std::vector<std::string> pattern_bases(const JoinGraph& g) {
  std::vector<std::string> out;
  for (const auto& v : g.vertices) out.push_back(v.base);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace relgraph::testing
