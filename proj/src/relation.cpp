#include "relgraph/relation.hpp"

#include <algorithm>

namespace relgraph {

Schema::Schema(std::vector<Column> cols) : columns_(std::move(cols)) {
  for (size_t i = 0; i < columns_.size(); ++i)
    for (size_t j = i + 1; j < columns_.size(); ++j)
      if (columns_[i].name == columns_[j].name)
        throw std::invalid_argument("duplicate column name: " + columns_[i].name);
}

std::optional<size_t> Schema::find(const std::string& name) const {
  for (size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

size_t Schema::index_of(const std::string& name) const {
  auto i = find(name);
  if (!i) throw std::out_of_range("unknown column: " + name);
  return *i;
}

size_t Relation::serialized_bytes() const {
  size_t total = 0;
  for (const auto& row : rows)
    for (const auto& v : row) total += v.serialized_size();
  return total;
}

int compare_rows(const Row& a, const Row& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = a[i].compare(b[i]);
    if (c != 0) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

std::vector<Row> Relation::sorted_rows() const {
  std::vector<Row> out = rows;
  std::sort(out.begin(), out.end(), [](const Row& a, const Row& b) { return compare_rows(a, b) < 0; });
  return out;
}

bool same_multiset(const Relation& a, const Relation& b) {
  if (a.rows.size() != b.rows.size()) return false;
  return a.sorted_rows() == b.sorted_rows();
}

}  // namespace relgraph
