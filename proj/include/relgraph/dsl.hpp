#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "relgraph/database.hpp"
#include "relgraph/exec.hpp"

namespace relgraph {

/// Syntax or resolution failure with a 1-based source position.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, size_t line_arg, size_t col_arg)
      : std::runtime_error(msg + " (line " + std::to_string(line_arg) + ", column " + std::to_string(col_arg) + ")"),
        line(line_arg),
        col(col_arg),
        detail(msg) {}
  size_t line;
  size_t col;
  std::string detail;
};

struct Diagnostic {
  std::string code;
  std::string message;
  size_t line = 0;
  size_t col = 0;

  std::string to_json_line() const;
};

struct ColumnRef {
  std::string alias;
  std::string column;

  std::string qualified() const { return alias + "." + column; }
  bool operator==(const ColumnRef& o) const { return alias == o.alias && column == o.column; }
};

struct FromItem {
  std::string base;   // stored table name
  std::string alias;  // unique within the query
};

/// A SELECT/FROM/WHERE query in normalized form: aliases resolved, constants
/// on the right of each comparison, two-column comparisons ordered by
/// qualified name, conjuncts sorted.
struct ParsedQuery {
  std::vector<ColumnRef> select_list;  // empty means "SELECT null" (no properties)
  std::vector<FromItem> from_list;
  std::vector<Comparison> where;  // column terms hold qualified names

  bool has_alias(const std::string& alias) const;
  const FromItem* find_alias(const std::string& alias) const;
  std::string render() const;
};

struct VertexDef {
  std::string label;
  std::string table;      // source table
  std::string id_column;  // appended implicitly to the extracted columns
  ParsedQuery query;      // single-table projection
};

struct EdgeDef {
  std::string label;
  std::string src_label;
  std::string dst_label;
  ParsedQuery query;
  ColumnRef src_binding;  // alias.column producing source vertex ids
  ColumnRef dst_binding;
};

struct GraphModelDef {
  std::string graph_name;
  std::vector<VertexDef> vertices;
  std::vector<EdgeDef> edges;

  const VertexDef* find_vertex(const std::string& label) const;
  const EdgeDef* find_edge(const std::string& label) const;
};

/// Parses DSL source into a resolved model. Throws ParseError with position.
GraphModelDef parse_model(const std::string& text);

/// Parses a standalone SELECT query (the same subset the model grammar
/// embeds) into normalized form.
ParsedQuery parse_query(const std::string& sql);

/// Canonical rendering; parse_model(render_model(m)) reproduces m.
std::string render_model(const GraphModelDef& model);

/// Checks every table/column reference and join kind compatibility against a
/// loaded catalog. Returns diagnostics; empty means the model is executable.
std::vector<Diagnostic> validate_against_catalog(const GraphModelDef& model, const Database& db);

}  // namespace relgraph
