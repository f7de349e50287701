#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace relgraph {

/// Column type of a relational value.
enum class ValueKind : uint8_t { Null = 0, Int, Float, Text, Bool };

const char* kind_name(ValueKind k);

/// Parses a kind name ("int", "float", "text", "bool"). Throws std::invalid_argument.
ValueKind kind_from_name(const std::string& name);

/// A single relational value. Null is a distinct marker: it compares unequal
/// to everything (including itself) under predicate equality, but sorts as a
/// least element so deduplication and ordering stay total.
class Value {
 public:
  Value() = default;

  static Value null() { return Value(); }
  static Value of_int(int64_t v);
  static Value of_float(double v);
  static Value of_text(std::string v);
  static Value of_bool(bool v);

  ValueKind kind() const { return kind_; }
  bool is_null() const { return kind_ == ValueKind::Null; }

  int64_t as_int() const { return int_; }
  double as_float() const { return float_; }
  bool as_bool() const { return bool_; }
  const std::string& as_text() const { return text_; }

  /// Numeric view: Int and Float both convert; others are invalid.
  double numeric() const { return kind_ == ValueKind::Int ? double(int_) : float_; }

  /// Total order used for sorting/dedup: null first, then by kind tag, then value.
  int compare(const Value& other) const;

  /// Exact equality including null==null (storage identity, not predicate equality).
  bool operator==(const Value& other) const { return compare(other) == 0; }
  bool operator<(const Value& other) const { return compare(other) < 0; }

  size_t hash() const;

  /// Bytes this value occupies in the serialized page accounting.
  size_t serialized_size() const;

  /// Render for CSV/debug output. Null renders as the empty string.
  std::string to_string() const;

 private:
  ValueKind kind_ = ValueKind::Null;
  int64_t int_ = 0;
  double float_ = 0.0;
  bool bool_ = false;
  std::string text_;
};

/// Predicate comparison under SQL-style three-valued logic collapsed to bool:
/// any comparison involving null is false. Int/Float compare numerically.
bool sql_compare(const Value& a, const Value& b, int op_lt, int op_eq, int op_gt);

bool sql_eq(const Value& a, const Value& b);
bool sql_lt(const Value& a, const Value& b);
bool sql_le(const Value& a, const Value& b);

/// Parses text into a value of the requested kind. Empty text yields null.
/// Throws std::invalid_argument on malformed input.
Value parse_value(const std::string& text, ValueKind kind);

struct ValueHash {
  size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace relgraph
