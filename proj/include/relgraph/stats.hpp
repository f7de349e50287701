#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relgraph/relation.hpp"

namespace relgraph {

struct ColumnStats {
  uint64_t distinct = 0;  // non-null distinct values, capped by cardinality
  double avg_width = 1.0; // serialized bytes per value, averaged over rows
};

/// Catalog statistics for one stored table.
struct TableStats {
  uint64_t cardinality = 0;
  uint64_t total_bytes = 0;
  uint64_t page_count = 1;  // ceil(total_bytes / page_size), never below 1
  std::vector<ColumnStats> columns;

  const ColumnStats& column(size_t i) const { return columns[i]; }
};

/// Nominal value width used when a table has no rows to average over.
inline double default_width(ValueKind k) {
  switch (k) {
    case ValueKind::Int:
    case ValueKind::Float: return 8.0;
    case ValueKind::Bool: return 1.0;
    case ValueKind::Text: return 12.0;
    default: return 1.0;
  }
}

TableStats compute_stats(const Relation& rel, uint64_t page_size);

}  // namespace relgraph
