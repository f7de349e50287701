#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relgraph/metrics.hpp"
#include "relgraph/relation.hpp"

namespace relgraph {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_text(CmpOp op);
CmpOp flip_cmp_op(CmpOp op);  // swaps operand sides: a < b  ->  b > a

/// One side of a comparison: a column reference or a constant.
struct Term {
  std::optional<std::string> column;  // qualified name when set
  Value constant;

  static Term col(std::string name) { return Term{std::move(name), Value()}; }
  static Term lit(Value v) { return Term{std::nullopt, std::move(v)}; }
  bool is_column() const { return column.has_value(); }
};

struct Comparison {
  Term lhs;
  CmpOp op = CmpOp::Eq;
  Term rhs;

  std::string render() const;
};

bool eval_comparison(const Comparison& cmp, const Relation& rel, const Row& row);

/// Filters rows by a conjunction of comparisons; null fails every comparison.
Relation select(const Relation& rel, const std::vector<Comparison>& conjuncts);

/// Column subset/reorder; collapses the multiset to a set when dedup is set.
Relation project(const Relation& rel, const std::vector<std::string>& columns, bool dedup);

struct JoinKey {
  std::string left;   // column in the left/outer input
  std::string right;  // column in the right/inner input
};

/// Hash equi-join; output schema is left ++ right. Rows whose key contains a
/// null never match. `residual` holds extra comparisons (possibly non-equality)
/// over the combined row that matched pairs must also satisfy.
Relation hash_inner_join(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys,
                         const std::vector<Comparison>& residual = {}, ExecContext* ctx = nullptr,
                         const std::string& signature = {});

/// Left outer flavor: every left row appears at least once; unmatched rows are
/// padded with nulls on the right columns.
Relation hash_left_outer_join(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys,
                              const std::vector<Comparison>& residual = {}, ExecContext* ctx = nullptr,
                              const std::string& signature = {});

/// Fallback join for predicates with no equality conjunct.
Relation nested_loop_join(const Relation& left, const Relation& right, const std::vector<Comparison>& condition,
                          bool left_outer, ExecContext* ctx = nullptr, const std::string& signature = {});

}  // namespace relgraph
