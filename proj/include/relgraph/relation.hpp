#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relgraph/value.hpp"

namespace relgraph {

struct Column {
  std::string name;  // bare in stored tables, "alias.column" in derived relations
  ValueKind kind = ValueKind::Null;

  bool operator==(const Column& o) const { return name == o.name && kind == o.kind; }
};

/// Ordered column list with unique names.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> cols);

  size_t size() const { return columns_.size(); }
  const Column& at(size_t i) const { return columns_[i]; }
  const std::vector<Column>& columns() const { return columns_; }

  std::optional<size_t> find(const std::string& name) const;

  /// Index of a column; throws std::out_of_range naming the column if absent.
  size_t index_of(const std::string& name) const;

  bool operator==(const Schema& o) const { return columns_ == o.columns_; }

 private:
  std::vector<Column> columns_;
};

using Row = std::vector<Value>;

/// In-memory relation: a schema plus an ordered multiset of rows.
/// Relations are immutable once handed to the catalog; operators build new ones.
struct Relation {
  Schema schema;
  std::vector<Row> rows;

  size_t row_count() const { return rows.size(); }

  size_t serialized_bytes() const;

  /// Rows sorted under the total value order; used for canonical comparison.
  std::vector<Row> sorted_rows() const;
};

using RelationPtr = std::shared_ptr<const Relation>;

int compare_rows(const Row& a, const Row& b);

/// Multiset equality of row sets, ignoring row order (schemas must already agree).
bool same_multiset(const Relation& a, const Relation& b);

}  // namespace relgraph
