#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace relgraph {

/// Operator-level counters collected while executing a plan. Join builds are
/// keyed by a base-table-normalized condition signature so repeated work on
/// the same join is visible across units.
struct ExecMetrics {
  uint64_t hash_join_steps = 0;
  uint64_t nested_loop_steps = 0;
  uint64_t tuples_built = 0;
  uint64_t tuples_probed = 0;
  uint64_t tuples_emitted = 0;
  uint64_t bytes_materialized = 0;
  uint64_t views_materialized = 0;
  std::map<std::string, uint64_t> join_builds;  // signature -> count
  std::map<std::string, uint64_t> table_scans;  // table/view name -> count

  void merge(const ExecMetrics& other) {
    hash_join_steps += other.hash_join_steps;
    nested_loop_steps += other.nested_loop_steps;
    tuples_built += other.tuples_built;
    tuples_probed += other.tuples_probed;
    tuples_emitted += other.tuples_emitted;
    bytes_materialized += other.bytes_materialized;
    views_materialized += other.views_materialized;
    for (const auto& [k, v] : other.join_builds) join_builds[k] += v;
    for (const auto& [k, v] : other.table_scans) table_scans[k] += v;
  }

  uint64_t join_build_count(const std::string& signature) const {
    auto it = join_builds.find(signature);
    return it == join_builds.end() ? 0 : it->second;
  }

  uint64_t scan_count(const std::string& table) const {
    auto it = table_scans.find(table);
    return it == table_scans.end() ? 0 : it->second;
  }
};

/// Optional sink passed through the executor; null means "don't count".
struct ExecContext {
  ExecMetrics metrics;
};

}  // namespace relgraph
