#include "relgraph/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "json.hpp"

namespace relgraph {

std::string Diagnostic::to_json_line() const {
  nlohmann::json j{{"code", code}, {"message", message}, {"line", line}, {"col", col}};
  return j.dump();
}

bool ParsedQuery::has_alias(const std::string& alias) const { return find_alias(alias) != nullptr; }

const FromItem* ParsedQuery::find_alias(const std::string& alias) const {
  for (const auto& f : from_list)
    if (f.alias == alias) return &f;
  return nullptr;
}

namespace {

enum class Tok { Ident, Int, Float, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // punct text is the operator/symbol itself
  size_t line = 1, col = 1;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0, line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg, size_t l, size_t c) { throw ParseError(msg, l, c); }

  void advance(size_t n = 1) {
    for (size_t i = 0; i < n && pos < src.size(); ++i) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_space() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && pos + 1 < src.size() && src[pos + 1] == '-') {
        while (pos < src.size() && src[pos] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token next() {
    skip_space();
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size()) return t;
    char c = src[pos];
    if (std::isalpha(uint8_t(c)) || c == '_') {
      t.kind = Tok::Ident;
      size_t start = pos;
      while (pos < src.size() && (std::isalnum(uint8_t(src[pos])) || src[pos] == '_')) advance();
      t.text = src.substr(start, pos - start);
      return t;
    }
    if (std::isdigit(uint8_t(c)) ||
        ((c == '-' || c == '+') && pos + 1 < src.size() && std::isdigit(uint8_t(src[pos + 1])))) {
      size_t start = pos;
      advance();
      bool is_float = false;
      while (pos < src.size() && (std::isdigit(uint8_t(src[pos])) || src[pos] == '.')) {
        if (src[pos] == '.') {
          if (is_float) break;
          is_float = true;
        }
        advance();
      }
      t.kind = is_float ? Tok::Float : Tok::Int;
      t.text = src.substr(start, pos - start);
      return t;
    }
    if (c == '\'') {
      t.kind = Tok::String;
      advance();
      std::string s;
      while (true) {
        if (pos >= src.size()) fail("unterminated string literal", t.line, t.col);
        if (src[pos] == '\'') {
          if (pos + 1 < src.size() && src[pos + 1] == '\'') {
            s += '\'';
            advance(2);
          } else {
            advance();
            break;
          }
        } else {
          s += src[pos];
          advance();
        }
      }
      t.text = std::move(s);
      return t;
    }
    t.kind = Tok::Punct;
    if (c == '<') {
      if (pos + 1 < src.size() && (src[pos + 1] == '=' || src[pos + 1] == '>')) {
        t.text = src.substr(pos, 2);
        advance(2);
        return t;
      }
    }
    if (c == '>' && pos + 1 < src.size() && src[pos + 1] == '=') {
      t.text = ">=";
      advance(2);
      return t;
    }
    static const std::string single = "(),;:.=<>";
    if (single.find(c) != std::string::npos) {
      t.text = std::string(1, c);
      advance();
      return t;
    }
    fail(std::string("unexpected character '") + c + "'", t.line, t.col);
  }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Parser {
  Lexer lex;
  Token cur;

  explicit Parser(const std::string& src) : lex(src) { cur = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur.line, cur.col); }
  [[noreturn]] void fail_at(const std::string& msg, const Token& t) { throw ParseError(msg, t.line, t.col); }

  void bump() { cur = lex.next(); }

  bool at_punct(const std::string& p) const { return cur.kind == Tok::Punct && cur.text == p; }
  bool at_keyword(const std::string& kw) const { return cur.kind == Tok::Ident && lower(cur.text) == kw; }

  void expect_punct(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "'");
    bump();
  }

  std::string expect_ident(const std::string& what) {
    if (cur.kind != Tok::Ident) fail("expected " + what);
    std::string s = cur.text;
    bump();
    return s;
  }

  void expect_keyword(const std::string& kw) {
    if (!at_keyword(kw)) fail("expected keyword " + kw);
    bump();
  }

  // ---- embedded SQL subset ----

  ColumnRef parse_col_ref() {
    Token start = cur;
    std::string first = expect_ident("column reference");
    if (at_punct(".")) {
      bump();
      std::string col = expect_ident("column name after '.'");
      return {first, col};
    }
    return {"", first};  // bare column, alias resolved during normalization
  }

  CmpOp parse_op() {
    if (cur.kind != Tok::Punct) fail("expected comparison operator");
    std::string p = cur.text;
    bump();
    if (p == "=") return CmpOp::Eq;
    if (p == "<>") return CmpOp::Ne;
    if (p == "<") return CmpOp::Lt;
    if (p == "<=") return CmpOp::Le;
    if (p == ">") return CmpOp::Gt;
    if (p == ">=") return CmpOp::Ge;
    fail_at("expected comparison operator, got '" + p + "'", cur);
  }

  bool at_literal() const {
    return cur.kind == Tok::Int || cur.kind == Tok::Float || cur.kind == Tok::String ||
           at_keyword("true") || at_keyword("false");
  }

  Value parse_literal() {
    Value v;
    try {
      if (cur.kind == Tok::Int) v = Value::of_int(std::stoll(cur.text));
      else if (cur.kind == Tok::Float) v = Value::of_float(std::stod(cur.text));
      else if (cur.kind == Tok::String) v = Value::of_text(cur.text);
      else if (at_keyword("true")) v = Value::of_bool(true);
      else if (at_keyword("false")) v = Value::of_bool(false);
      else fail("expected literal");
    } catch (const std::out_of_range&) {
      fail("numeric literal out of range");
    } catch (const std::invalid_argument&) {
      fail("malformed numeric literal");
    }
    bump();
    return v;
  }

  ParsedQuery parse_query() {
    ParsedQuery q;
    expect_keyword("select");
    if (at_keyword("null")) {
      bump();  // property-less query
    } else {
      q.select_list.push_back(parse_col_ref());
      while (at_punct(",")) {
        bump();
        q.select_list.push_back(parse_col_ref());
      }
    }
    expect_keyword("from");
    q.from_list.push_back(parse_from_item());
    while (at_punct(",")) {
      bump();
      q.from_list.push_back(parse_from_item());
    }
    if (at_keyword("where")) {
      bump();
      q.where.push_back(parse_comparison());
      while (at_keyword("and")) {
        bump();
        q.where.push_back(parse_comparison());
      }
    }
    return q;
  }

  // A bare name with a trailing number is an alias of the prefix table
  // (C1, C2 name instances of C); explicit "base alias" overrides.
  FromItem parse_from_item() {
    std::string first = expect_ident("table name");
    if (at_keyword("as")) {
      bump();
      return {first, expect_ident("alias")};
    }
    if (cur.kind == Tok::Ident && !at_keyword("where") && !at_keyword("as")) {
      std::string alias = cur.text;
      bump();
      return {first, alias};
    }
    size_t i = first.size();
    while (i > 0 && std::isdigit(uint8_t(first[i - 1]))) --i;
    if (i > 0 && i < first.size()) return {first.substr(0, i), first};
    return {first, first};
  }

  Comparison parse_comparison() {
    Token start = cur;
    Term lhs, rhs;
    if (at_literal()) lhs = Term::lit(parse_literal());
    else lhs = Term::col(parse_col_ref().qualified());
    CmpOp op = parse_op();
    if (at_literal()) rhs = Term::lit(parse_literal());
    else rhs = Term::col(parse_col_ref().qualified());
    if (!lhs.is_column() && !rhs.is_column())
      fail_at("comparison must reference at least one column", start);
    return {std::move(lhs), op, std::move(rhs)};
  }

  // ---- statements ----

  struct Statement {
    std::string kind;  // graph | vertex | edge
    std::map<std::string, std::string> values;
    ParsedQuery query;
    bool has_query = false;
    size_t line = 1, col = 1;
  };

  Statement parse_statement() {
    Statement st;
    st.line = cur.line;
    st.col = cur.col;
    expect_keyword("create");
    if (at_keyword("graph")) st.kind = "graph";
    else if (at_keyword("vertex")) st.kind = "vertex";
    else if (at_keyword("edge")) st.kind = "edge";
    else fail("expected GRAPH, VERTEX or EDGE after CREATE");
    bump();
    expect_punct("(");
    while (true) {
      Token key_tok = cur;
      std::string key = lower(expect_ident("option name"));
      expect_punct(":");
      if (key == "query") {
        if (st.has_query) fail_at("duplicate Query option", key_tok);
        st.query = parse_query();
        st.has_query = true;
      } else {
        static const std::map<std::string, int> known = {{"graph_name", 0},  {"label", 0},     {"id_column", 0},
                                                         {"src_label", 0},   {"dst_label", 0}, {"src_alias", 0},
                                                         {"dst_alias", 0}};
        if (!known.count(key)) fail_at("unknown option '" + key + "'", key_tok);
        if (st.values.count(key)) fail_at("duplicate option '" + key + "'", key_tok);
        st.values[key] = expect_ident("value for " + key);
      }
      if (at_punct(",")) {
        bump();
        continue;
      }
      break;
    }
    expect_punct(")");
    expect_punct(";");
    return st;
  }

  std::string require(const Statement& st, const std::string& key) {
    auto it = st.values.find(key);
    if (it == st.values.end())
      throw ParseError("CREATE " + st.kind + " is missing option " + key, st.line, st.col);
    return it->second;
  }
};

// Normalizes one comparison: constants to the right, two-column comparisons
// ordered by qualified name (flipping the operator as needed).
Comparison normalize_comparison(Comparison c) {
  if (!c.lhs.is_column()) {
    std::swap(c.lhs, c.rhs);
    c.op = flip_cmp_op(c.op);
  }
  if (c.lhs.is_column() && c.rhs.is_column() && *c.rhs.column < *c.lhs.column) {
    std::swap(c.lhs, c.rhs);
    c.op = flip_cmp_op(c.op);
  }
  return c;
}

void normalize_query(ParsedQuery& q, size_t line, size_t col) {
  for (size_t i = 0; i < q.from_list.size(); ++i)
    for (size_t j = i + 1; j < q.from_list.size(); ++j)
      if (q.from_list[i].alias == q.from_list[j].alias)
        throw ParseError("duplicate alias '" + q.from_list[i].alias + "' in FROM", line, col);

  auto resolve = [&](ColumnRef& ref) {
    if (ref.alias.empty()) {
      if (q.from_list.size() != 1)
        throw ParseError("unqualified column '" + ref.column + "' in a multi-table query", line, col);
      ref.alias = q.from_list[0].alias;
    } else if (!q.has_alias(ref.alias)) {
      throw ParseError("unknown alias '" + ref.alias + "'", line, col);
    }
  };

  for (auto& s : q.select_list) resolve(s);
  for (auto& c : q.where) {
    for (Term* t : {&c.lhs, &c.rhs}) {
      if (!t->is_column()) continue;
      std::string name = *t->column;
      auto dot = name.find('.');
      ColumnRef ref = dot == std::string::npos ? ColumnRef{"", name}
                                               : ColumnRef{name.substr(0, dot), name.substr(dot + 1)};
      resolve(ref);
      t->column = ref.qualified();
    }
    c = normalize_comparison(std::move(c));
  }
  std::sort(q.where.begin(), q.where.end(),
            [](const Comparison& a, const Comparison& b) { return a.render() < b.render(); });
}

// Endpoint binding: the first FROM alias over the endpoint table binds the
// source and the last binds the destination; Src_Alias/Dst_Alias override.
ColumnRef resolve_binding(const ParsedQuery& q, const VertexDef& vertex, const std::string& explicit_alias,
                          bool first, const std::string& edge_label, size_t line, size_t col) {
  if (!explicit_alias.empty()) {
    const FromItem* item = q.find_alias(explicit_alias);
    if (!item) throw ParseError("edge '" + edge_label + "': alias '" + explicit_alias + "' not in FROM", line, col);
    if (item->base != vertex.table)
      throw ParseError("edge '" + edge_label + "': alias '" + explicit_alias + "' is over table '" + item->base +
                       "', endpoint label '" + vertex.label + "' requires '" + vertex.table + "'", line, col);
    return {explicit_alias, vertex.id_column};
  }
  const FromItem* found = nullptr;
  for (const auto& f : q.from_list) {
    if (f.base != vertex.table) continue;
    found = &f;
    if (first) break;
  }
  if (!found)
    throw ParseError("edge '" + edge_label + "': endpoint table '" + vertex.table + "' (label '" + vertex.label +
                     "') does not appear in FROM", line, col);
  return {found->alias, vertex.id_column};
}

}  // namespace

GraphModelDef parse_model(const std::string& text) {
  Parser parser(text);
  std::vector<Parser::Statement> statements;
  while (parser.cur.kind != Tok::End) statements.push_back(parser.parse_statement());

  GraphModelDef model;
  bool have_graph = false;
  for (auto& st : statements) {
    if (st.kind != "graph") continue;
    if (have_graph) throw ParseError("duplicate CREATE GRAPH", st.line, st.col);
    model.graph_name = parser.require(st, "graph_name");
    have_graph = true;
  }
  if (!have_graph && !statements.empty())
    throw ParseError("model must start with CREATE GRAPH", statements[0].line, statements[0].col);

  for (auto& st : statements) {
    if (st.kind != "vertex") continue;
    if (parser.require(st, "graph_name") != model.graph_name)
      throw ParseError("unknown graph '" + st.values["graph_name"] + "'", st.line, st.col);
    VertexDef v;
    v.label = parser.require(st, "label");
    v.id_column = parser.require(st, "id_column");
    if (!st.has_query) throw ParseError("CREATE VERTEX is missing option query", st.line, st.col);
    v.query = std::move(st.query);
    normalize_query(v.query, st.line, st.col);
    if (v.query.from_list.size() != 1)
      throw ParseError("vertex query must reference exactly one table", st.line, st.col);
    if (!v.query.where.empty())
      throw ParseError("vertex query does not take a WHERE clause", st.line, st.col);
    v.table = v.query.from_list[0].base;
    if (model.find_vertex(v.label)) throw ParseError("duplicate vertex label '" + v.label + "'", st.line, st.col);
    model.vertices.push_back(std::move(v));
  }

  for (auto& st : statements) {
    if (st.kind != "edge") continue;
    if (parser.require(st, "graph_name") != model.graph_name)
      throw ParseError("unknown graph '" + st.values["graph_name"] + "'", st.line, st.col);
    EdgeDef e;
    e.label = parser.require(st, "label");
    e.src_label = parser.require(st, "src_label");
    e.dst_label = parser.require(st, "dst_label");
    if (!st.has_query) throw ParseError("CREATE EDGE is missing option query", st.line, st.col);
    e.query = std::move(st.query);
    normalize_query(e.query, st.line, st.col);
    if (model.find_edge(e.label)) throw ParseError("duplicate edge label '" + e.label + "'", st.line, st.col);

    const VertexDef* src = model.find_vertex(e.src_label);
    if (!src) throw ParseError("edge '" + e.label + "': undeclared vertex label '" + e.src_label + "'", st.line, st.col);
    const VertexDef* dst = model.find_vertex(e.dst_label);
    if (!dst) throw ParseError("edge '" + e.label + "': undeclared vertex label '" + e.dst_label + "'", st.line, st.col);

    std::string src_alias = st.values.count("src_alias") ? st.values["src_alias"] : "";
    std::string dst_alias = st.values.count("dst_alias") ? st.values["dst_alias"] : "";
    e.src_binding = resolve_binding(e.query, *src, src_alias, true, e.label, st.line, st.col);
    e.dst_binding = resolve_binding(e.query, *dst, dst_alias, false, e.label, st.line, st.col);
    model.edges.push_back(std::move(e));
  }
  return model;
}

ParsedQuery parse_query(const std::string& sql) {
  Parser parser(sql);
  ParsedQuery q = parser.parse_query();
  if (parser.cur.kind != Tok::End) parser.fail("unexpected trailing input");
  normalize_query(q, 1, 1);
  return q;
}

const VertexDef* GraphModelDef::find_vertex(const std::string& label) const {
  for (const auto& v : vertices)
    if (v.label == label) return &v;
  return nullptr;
}

const EdgeDef* GraphModelDef::find_edge(const std::string& label) const {
  for (const auto& e : edges)
    if (e.label == label) return &e;
  return nullptr;
}

namespace {

std::string render_literal(const Value& v) {
  if (v.kind() == ValueKind::Text) {
    std::string out = "'";
    for (char c : v.as_text()) {
      if (c == '\'') out += "''";
      else out += c;
    }
    return out + "'";
  }
  return v.to_string();
}

std::string render_term(const Term& t) { return t.is_column() ? *t.column : render_literal(t.constant); }

}  // namespace

std::string ParsedQuery::render() const {
  std::ostringstream out;
  out << "SELECT ";
  if (select_list.empty()) {
    out << "null";
  } else {
    for (size_t i = 0; i < select_list.size(); ++i) {
      if (i) out << ", ";
      out << select_list[i].qualified();
    }
  }
  out << " FROM ";
  for (size_t i = 0; i < from_list.size(); ++i) {
    if (i) out << ", ";
    out << from_list[i].base;
    if (from_list[i].alias != from_list[i].base) out << " " << from_list[i].alias;
  }
  if (!where.empty()) {
    out << " WHERE ";
    for (size_t i = 0; i < where.size(); ++i) {
      if (i) out << " AND ";
      out << render_term(where[i].lhs) << " " << cmp_op_text(where[i].op) << " " << render_term(where[i].rhs);
    }
  }
  return out.str();
}

std::string render_model(const GraphModelDef& model) {
  std::ostringstream out;
  out << "CREATE GRAPH(Graph_Name: " << model.graph_name << ");\n";
  for (const auto& v : model.vertices) {
    out << "CREATE VERTEX(Graph_Name: " << model.graph_name << ", Label: " << v.label
        << ", ID_Column: " << v.id_column << ", Query: " << v.query.render() << ");\n";
  }
  for (const auto& e : model.edges) {
    out << "CREATE EDGE(Graph_Name: " << model.graph_name << ", Label: " << e.label
        << ", Src_Label: " << e.src_label << ", Dst_Label: " << e.dst_label
        << ", Src_Alias: " << e.src_binding.alias << ", Dst_Alias: " << e.dst_binding.alias
        << ", Query: " << e.query.render() << ");\n";
  }
  return out.str();
}

namespace {

void check_query_columns(const ParsedQuery& q, const Database& db, const std::string& where_label,
                         std::vector<Diagnostic>& out) {
  auto table_of = [&](const std::string& alias) -> const Relation* {
    const FromItem* f = q.find_alias(alias);
    if (!f || !db.has_table(f->base)) return nullptr;
    return &db.table(f->base);
  };

  for (const auto& f : q.from_list)
    if (!db.has_table(f.base))
      out.push_back({"unknown-table", where_label + ": table '" + f.base + "' not in catalog"});

  auto column_kind = [&](const std::string& qualified) -> std::optional<ValueKind> {
    auto dot = qualified.find('.');
    std::string alias = qualified.substr(0, dot), col = qualified.substr(dot + 1);
    const Relation* t = table_of(alias);
    if (!t) return std::nullopt;  // table missing, reported above
    auto idx = t->schema.find(col);
    if (!idx) {
      out.push_back({"unknown-column", where_label + ": column '" + qualified + "' not in table '" +
                                           q.find_alias(alias)->base + "'"});
      return std::nullopt;
    }
    return t->schema.at(*idx).kind;
  };

  for (const auto& s : q.select_list) column_kind(s.qualified());
  for (const auto& c : q.where) {
    std::optional<ValueKind> lk;
    if (c.lhs.is_column()) lk = column_kind(*c.lhs.column);
    if (c.rhs.is_column()) {
      auto rk = column_kind(*c.rhs.column);
      if (lk && rk && *lk != *rk)
        out.push_back({"kind-mismatch", where_label + ": '" + c.render() + "' compares " + kind_name(*lk) +
                                            " with " + kind_name(*rk)});
    } else if (lk) {
      ValueKind ck = c.rhs.constant.kind();
      bool numeric_pair = (*lk == ValueKind::Int || *lk == ValueKind::Float) &&
                          (ck == ValueKind::Int || ck == ValueKind::Float);
      if (*lk != ck && !numeric_pair)
        out.push_back({"kind-mismatch", where_label + ": '" + c.render() + "' compares " + kind_name(*lk) +
                                            " with a " + kind_name(ck) + " constant"});
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_against_catalog(const GraphModelDef& model, const Database& db) {
  std::vector<Diagnostic> out;
  for (const auto& v : model.vertices) {
    std::string label = "vertex '" + v.label + "'";
    if (!db.has_table(v.table)) {
      out.push_back({"unknown-table", label + ": table '" + v.table + "' not in catalog"});
      continue;
    }
    const auto& schema = db.table(v.table).schema;
    if (!schema.find(v.id_column))
      out.push_back({"unknown-column", label + ": id column '" + v.id_column + "' not in table '" + v.table + "'"});
    check_query_columns(v.query, db, label, out);
  }
  for (const auto& e : model.edges) {
    std::string label = "edge '" + e.label + "'";
    check_query_columns(e.query, db, label, out);
    for (const auto& binding : {e.src_binding, e.dst_binding}) {
      const FromItem* f = e.query.find_alias(binding.alias);
      if (f && db.has_table(f->base) && !db.table(f->base).schema.find(binding.column))
        out.push_back({"unknown-column",
                       label + ": endpoint id column '" + binding.qualified() + "' not in table '" + f->base + "'"});
    }
  }
  return out;
}

}  // namespace relgraph
