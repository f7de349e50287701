#include "relgraph/value.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace relgraph {

const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Null: return "null";
    case ValueKind::Int: return "int";
    case ValueKind::Float: return "float";
    case ValueKind::Text: return "text";
    case ValueKind::Bool: return "bool";
  }
  return "?";
}

ValueKind kind_from_name(const std::string& name) {
  if (name == "int" || name == "integer" || name == "int64") return ValueKind::Int;
  if (name == "float" || name == "double" || name == "float64") return ValueKind::Float;
  if (name == "text" || name == "string" || name == "varchar") return ValueKind::Text;
  if (name == "bool" || name == "boolean") return ValueKind::Bool;
  throw std::invalid_argument("unknown value kind: " + name);
}

Value Value::of_int(int64_t v) {
  Value out;
  out.kind_ = ValueKind::Int;
  out.int_ = v;
  return out;
}

Value Value::of_float(double v) {
  Value out;
  out.kind_ = ValueKind::Float;
  out.float_ = v;
  return out;
}

Value Value::of_text(std::string v) {
  Value out;
  out.kind_ = ValueKind::Text;
  out.text_ = std::move(v);
  return out;
}

Value Value::of_bool(bool v) {
  Value out;
  out.kind_ = ValueKind::Bool;
  out.bool_ = v;
  return out;
}

int Value::compare(const Value& other) const {
  if (kind_ != other.kind_) {
    // Int and Float interleave numerically so mixed columns still sort sanely.
    bool a_num = kind_ == ValueKind::Int || kind_ == ValueKind::Float;
    bool b_num = other.kind_ == ValueKind::Int || other.kind_ == ValueKind::Float;
    if (a_num && b_num) {
      double x = numeric(), y = other.numeric();
      if (x < y) return -1;
      if (x > y) return 1;
      return kind_ < other.kind_ ? -1 : 1;
    }
    return kind_ < other.kind_ ? -1 : 1;
  }
  switch (kind_) {
    case ValueKind::Null: return 0;
    case ValueKind::Int: return int_ < other.int_ ? -1 : (int_ > other.int_ ? 1 : 0);
    case ValueKind::Float:
      return float_ < other.float_ ? -1 : (float_ > other.float_ ? 1 : 0);
    case ValueKind::Text: return text_.compare(other.text_) < 0 ? -1 : (text_ == other.text_ ? 0 : 1);
    case ValueKind::Bool: return bool_ == other.bool_ ? 0 : (bool_ ? 1 : -1);
  }
  return 0;
}

size_t Value::hash() const {
  switch (kind_) {
    case ValueKind::Null: return 0x9e3779b97f4a7c15ull;
    case ValueKind::Int: return std::hash<int64_t>()(int_);
    case ValueKind::Float: {
      // Hash integral floats like their int counterparts is not required:
      // join keys are same-kind by contract.
      return std::hash<double>()(float_);
    }
    case ValueKind::Text: return std::hash<std::string>()(text_);
    case ValueKind::Bool: return bool_ ? 0x5bd1e995u : 0xc2b2ae35u;
  }
  return 0;
}

size_t Value::serialized_size() const {
  switch (kind_) {
    case ValueKind::Null: return 1;
    case ValueKind::Int: return 8;
    case ValueKind::Float: return 8;
    case ValueKind::Text: return text_.size() + 4;
    case ValueKind::Bool: return 1;
  }
  return 1;
}

std::string Value::to_string() const {
  switch (kind_) {
    case ValueKind::Null: return "";
    case ValueKind::Int: return std::to_string(int_);
    case ValueKind::Float: {
      char buf[32];
      snprintf(buf, sizeof(buf), "%.17g", float_);
      return buf;
    }
    case ValueKind::Text: return text_;
    case ValueKind::Bool: return bool_ ? "true" : "false";
  }
  return "";
}

bool sql_compare(const Value& a, const Value& b, int op_lt, int op_eq, int op_gt) {
  if (a.is_null() || b.is_null()) return false;
  int c;
  if (a.kind() != b.kind()) {
    bool numeric = (a.kind() == ValueKind::Int || a.kind() == ValueKind::Float) &&
                   (b.kind() == ValueKind::Int || b.kind() == ValueKind::Float);
    if (!numeric) return false;
    double x = a.numeric(), y = b.numeric();
    c = x < y ? -1 : (x > y ? 1 : 0);
  } else {
    c = a.compare(b);
  }
  if (c < 0) return op_lt != 0;
  if (c == 0) return op_eq != 0;
  return op_gt != 0;
}

bool sql_eq(const Value& a, const Value& b) { return sql_compare(a, b, 0, 1, 0); }
bool sql_lt(const Value& a, const Value& b) { return sql_compare(a, b, 1, 0, 0); }
bool sql_le(const Value& a, const Value& b) { return sql_compare(a, b, 1, 1, 0); }

Value parse_value(const std::string& text, ValueKind kind) {
  if (text.empty() && kind != ValueKind::Text) return Value::null();
  switch (kind) {
    case ValueKind::Null: return Value::null();
    case ValueKind::Int: {
      errno = 0;
      char* end = nullptr;
      long long v = strtoll(text.c_str(), &end, 10);
      if (errno != 0 || end == text.c_str() || *end != '\0')
        throw std::invalid_argument("not an integer: '" + text + "'");
      return Value::of_int(v);
    }
    case ValueKind::Float: {
      errno = 0;
      char* end = nullptr;
      double v = strtod(text.c_str(), &end);
      if (errno != 0 || end == text.c_str() || *end != '\0')
        throw std::invalid_argument("not a float: '" + text + "'");
      return Value::of_float(v);
    }
    case ValueKind::Text: return Value::of_text(text);
    case ValueKind::Bool: {
      if (text == "true" || text == "1" || text == "t") return Value::of_bool(true);
      if (text == "false" || text == "0" || text == "f") return Value::of_bool(false);
      throw std::invalid_argument("not a bool: '" + text + "'");
    }
  }
  throw std::invalid_argument("bad kind");
}

}  // namespace relgraph
