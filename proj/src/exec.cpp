#include "relgraph/exec.hpp"

#include <algorithm>
#include <unordered_map>

namespace relgraph {

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

CmpOp flip_cmp_op(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

std::string Comparison::render() const {
  auto term = [](const Term& t) { return t.is_column() ? *t.column : t.constant.to_string(); };
  return term(lhs) + cmp_op_text(op) + term(rhs);
}

static bool apply_op(const Value& a, CmpOp op, const Value& b) {
  switch (op) {
    case CmpOp::Eq: return sql_compare(a, b, 0, 1, 0);
    case CmpOp::Ne: return sql_compare(a, b, 1, 0, 1);
    case CmpOp::Lt: return sql_compare(a, b, 1, 0, 0);
    case CmpOp::Le: return sql_compare(a, b, 1, 1, 0);
    case CmpOp::Gt: return sql_compare(a, b, 0, 0, 1);
    case CmpOp::Ge: return sql_compare(a, b, 0, 1, 1);
  }
  return false;
}

static const Value& term_value(const Term& t, const Schema& schema, const Row& row) {
  if (!t.is_column()) return t.constant;
  return row[schema.index_of(*t.column)];
}

bool eval_comparison(const Comparison& cmp, const Relation& rel, const Row& row) {
  return apply_op(term_value(cmp.lhs, rel.schema, row), cmp.op, term_value(cmp.rhs, rel.schema, row));
}

namespace {

// Pre-resolved comparison over a fixed schema.
struct BoundCmp {
  int l = -1, r = -1;  // column indices, -1 = constant
  Value lc, rc;
  CmpOp op;
};

std::vector<BoundCmp> bind_comparisons(const std::vector<Comparison>& cs, const Schema& schema) {
  std::vector<BoundCmp> out;
  out.reserve(cs.size());
  for (const auto& c : cs) {
    BoundCmp b;
    b.op = c.op;
    if (c.lhs.is_column()) b.l = int(schema.index_of(*c.lhs.column));
    else b.lc = c.lhs.constant;
    if (c.rhs.is_column()) b.r = int(schema.index_of(*c.rhs.column));
    else b.rc = c.rhs.constant;
    out.push_back(std::move(b));
  }
  return out;
}

bool eval_bound(const std::vector<BoundCmp>& cs, const Row& row) {
  for (const auto& c : cs) {
    const Value& a = c.l >= 0 ? row[c.l] : c.lc;
    const Value& b = c.r >= 0 ? row[c.r] : c.rc;
    if (!apply_op(a, c.op, b)) return false;
  }
  return true;
}

// Residual predicates get evaluated over the concatenated row before it is built;
// bind against the combined schema but evaluate on (left_row, right_row) pieces.
struct SplitCmp {
  std::vector<BoundCmp> bound;
  size_t left_width = 0;
  bool eval(const Row& l, const Row& r) const {
    for (const auto& c : bound) {
      const Value& a = c.l >= 0 ? (size_t(c.l) < left_width ? l[c.l] : r[c.l - left_width]) : c.lc;
      const Value& b = c.r >= 0 ? (size_t(c.r) < left_width ? l[c.r] : r[c.r - left_width]) : c.rc;
      if (!apply_op(a, c.op, b)) return false;
    }
    return true;
  }
};

Schema concat_schema(const Schema& a, const Schema& b) {
  std::vector<Column> cols = a.columns();
  cols.insert(cols.end(), b.columns().begin(), b.columns().end());
  return Schema(std::move(cols));
}

struct RowKeyHash {
  size_t operator()(const Row& key) const {
    size_t h = 14695981039346656037ull;
    for (const auto& v : key) {
      h ^= v.hash();
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct RowKeyEq {
  bool operator()(const Row& a, const Row& b) const {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
      if (!sql_eq(a[i], b[i])) return false;
    return true;
  }
};

void check_key_kinds(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys) {
  for (const auto& k : keys) {
    ValueKind lk = left.schema.at(left.schema.index_of(k.left)).kind;
    ValueKind rk = right.schema.at(right.schema.index_of(k.right)).kind;
    if (lk != rk)
      throw std::invalid_argument("join key kind mismatch: " + k.left + " is " + kind_name(lk) + ", " + k.right +
                                  " is " + kind_name(rk));
  }
}

Relation hash_join_impl(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys,
                        const std::vector<Comparison>& residual, bool left_outer, ExecContext* ctx,
                        const std::string& signature) {
  if (keys.empty()) throw std::invalid_argument("hash join requires at least one equality key");
  check_key_kinds(left, right, keys);

  std::vector<size_t> lcols, rcols;
  for (const auto& k : keys) {
    lcols.push_back(left.schema.index_of(k.left));
    rcols.push_back(right.schema.index_of(k.right));
  }

  Relation out;
  out.schema = concat_schema(left.schema, right.schema);

  SplitCmp split;
  split.left_width = left.schema.size();
  split.bound = bind_comparisons(residual, out.schema);

  std::unordered_map<Row, std::vector<size_t>, RowKeyHash, RowKeyEq> table;
  table.reserve(right.rows.size());
  for (size_t i = 0; i < right.rows.size(); ++i) {
    Row key;
    key.reserve(rcols.size());
    bool has_null = false;
    for (size_t c : rcols) {
      if (right.rows[i][c].is_null()) { has_null = true; break; }
      key.push_back(right.rows[i][c]);
    }
    if (!has_null) table[std::move(key)].push_back(i);
  }

  if (ctx) {
    ctx->metrics.hash_join_steps++;
    ctx->metrics.tuples_built += right.rows.size();
    ctx->metrics.tuples_probed += left.rows.size();
    if (!signature.empty()) ctx->metrics.join_builds[signature]++;
  }

  Row null_pad(right.schema.size(), Value::null());
  for (const auto& lrow : left.rows) {
    Row key;
    key.reserve(lcols.size());
    bool has_null = false;
    for (size_t c : lcols) {
      if (lrow[c].is_null()) { has_null = true; break; }
      key.push_back(lrow[c]);
    }
    bool matched = false;
    if (!has_null) {
      auto it = table.find(key);
      if (it != table.end()) {
        for (size_t ri : it->second) {
          const Row& rrow = right.rows[ri];
          if (!split.eval(lrow, rrow)) continue;
          matched = true;
          Row combined = lrow;
          combined.insert(combined.end(), rrow.begin(), rrow.end());
          out.rows.push_back(std::move(combined));
        }
      }
    }
    if (left_outer && !matched) {
      Row combined = lrow;
      combined.insert(combined.end(), null_pad.begin(), null_pad.end());
      out.rows.push_back(std::move(combined));
    }
  }
  if (ctx) ctx->metrics.tuples_emitted += out.rows.size();
  return out;
}

}  // namespace

Relation select(const Relation& rel, const std::vector<Comparison>& conjuncts) {
  auto bound = bind_comparisons(conjuncts, rel.schema);
  Relation out;
  out.schema = rel.schema;
  for (const auto& row : rel.rows)
    if (eval_bound(bound, row)) out.rows.push_back(row);
  return out;
}

Relation project(const Relation& rel, const std::vector<std::string>& columns, bool dedup) {
  std::vector<size_t> idx;
  std::vector<Column> cols;
  for (const auto& name : columns) {
    size_t i = rel.schema.index_of(name);
    idx.push_back(i);
    cols.push_back(rel.schema.at(i));
  }
  Relation out;
  out.schema = Schema(std::move(cols));
  out.rows.reserve(rel.rows.size());
  for (const auto& row : rel.rows) {
    Row r;
    r.reserve(idx.size());
    for (size_t i : idx) r.push_back(row[i]);
    out.rows.push_back(std::move(r));
  }
  if (dedup) {
    std::sort(out.rows.begin(), out.rows.end(),
              [](const Row& a, const Row& b) { return compare_rows(a, b) < 0; });
    out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  }
  return out;
}

Relation hash_inner_join(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys,
                         const std::vector<Comparison>& residual, ExecContext* ctx, const std::string& signature) {
  return hash_join_impl(left, right, keys, residual, false, ctx, signature);
}

Relation hash_left_outer_join(const Relation& left, const Relation& right, const std::vector<JoinKey>& keys,
                              const std::vector<Comparison>& residual, ExecContext* ctx,
                              const std::string& signature) {
  return hash_join_impl(left, right, keys, residual, true, ctx, signature);
}

Relation nested_loop_join(const Relation& left, const Relation& right, const std::vector<Comparison>& condition,
                          bool left_outer, ExecContext* ctx, const std::string& signature) {
  Relation out;
  out.schema = concat_schema(left.schema, right.schema);
  SplitCmp split;
  split.left_width = left.schema.size();
  split.bound = bind_comparisons(condition, out.schema);

  if (ctx) {
    ctx->metrics.nested_loop_steps++;
    ctx->metrics.tuples_probed += left.rows.size();
    ctx->metrics.tuples_built += right.rows.size();
    if (!signature.empty()) ctx->metrics.join_builds[signature]++;
  }

  Row null_pad(right.schema.size(), Value::null());
  for (const auto& lrow : left.rows) {
    bool matched = false;
    for (const auto& rrow : right.rows) {
      if (!split.eval(lrow, rrow)) continue;
      matched = true;
      Row combined = lrow;
      combined.insert(combined.end(), rrow.begin(), rrow.end());
      out.rows.push_back(std::move(combined));
    }
    if (left_outer && !matched) {
      Row combined = lrow;
      combined.insert(combined.end(), null_pad.begin(), null_pad.end());
      out.rows.push_back(std::move(combined));
    }
  }
  if (ctx) ctx->metrics.tuples_emitted += out.rows.size();
  return out;
}

}  // namespace relgraph
