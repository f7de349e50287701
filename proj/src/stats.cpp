#include "relgraph/stats.hpp"

#include <unordered_set>

namespace relgraph {

TableStats compute_stats(const Relation& rel, uint64_t page_size) {
  TableStats stats;
  stats.cardinality = rel.rows.size();
  stats.total_bytes = rel.serialized_bytes();
  stats.page_count = stats.total_bytes == 0 ? 1 : (stats.total_bytes + page_size - 1) / page_size;
  if (stats.page_count == 0) stats.page_count = 1;

  stats.columns.resize(rel.schema.size());
  for (size_t c = 0; c < rel.schema.size(); ++c) {
    std::unordered_set<Value, ValueHash> seen;
    uint64_t bytes = 0;
    for (const auto& row : rel.rows) {
      bytes += row[c].serialized_size();
      if (!row[c].is_null()) seen.insert(row[c]);
    }
    stats.columns[c].distinct = seen.size();
    stats.columns[c].avg_width =
        rel.rows.empty() ? default_width(rel.schema.at(c).kind) : double(bytes) / double(rel.rows.size());
  }
  return stats;
}

}  // namespace relgraph
