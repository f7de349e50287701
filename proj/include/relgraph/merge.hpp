#pragma once

#include <array>
#include <string>
#include <vector>

#include "relgraph/query.hpp"

namespace relgraph {

/// One non-shared branch of a merged unit, executable on its own.
struct MergedSubquery {
  JoinGraph graph;  // merged-namespace aliases
  int origin = 0;   // which original query this branch belongs to
  std::vector<Comparison> connecting;       // conditions against the shared result
  std::vector<std::string> output_columns;  // what this branch must expose
  std::string label;
};

struct MergedOrigin {
  std::string name;
  // (merged column, origin-local output name), in the origin's output order
  std::vector<std::pair<std::string, std::string>> outputs;
};

/// Two queries folded into one evaluation: the shared subgraph keeps its inner
/// joins and every non-shared branch hangs off it through outer-marked edges.
/// Execution streams the shared result once and recovers each origin's exact
/// multiset through its own branches only.
struct MergedUnit {
  JoinGraph merged;  // full graph; connecting edges carry JoinType::Outer
  JoinGraph shared;  // the shared subquery, with its filters
  std::vector<std::string> shared_columns;
  std::vector<MergedSubquery> subqueries;
  std::array<MergedOrigin, 2> origins;
  Decomposition decomposition;

  std::string shared_signature() const;  // base-normalized signature of the shared joins
};

/// Assembles the merged unit of one decomposition.
MergedUnit build_merged_unit(const ExecutableQuery& q1, const ExecutableQuery& q2, const Decomposition& d);

/// Cost of a merged unit: shared subquery + non-shared subqueries + the
/// outer-combination pass.
CostBreakdown cost_merged(const MergedUnit& unit, const StatsProvider& stats, const CostParams& params);

/// Merges two queries, picking the cheapest decomposition; ties fall back to
/// the canonical decomposition order. Throws NoCommonJoinError when the
/// queries share no join.
MergedUnit merge_pair(const ExecutableQuery& q1, const ExecutableQuery& q2, const StatsProvider& stats,
                      const CostParams& params, const MatchOptions& opts = {});

/// Evaluates the merged unit: the shared subquery runs once, each branch runs
/// once and is indexed by its connecting columns, then every shared row emits
/// the cross-combination of its per-origin branch matches. Outputs are the
/// origins' exact result multisets, in their own schemas.
std::array<Relation, 2> execute_merged(const MergedUnit& unit, const Database& db, const CostParams& params,
                                       ExecContext* ctx = nullptr);

/// The wide outer-join relation (shared result left-outer-joined with every
/// branch). Set-level containment diagnostics; multiplicities come from
/// execute_merged instead.
Relation merged_outer_relation(const MergedUnit& unit, const Database& db, const CostParams& params,
                               ExecContext* ctx = nullptr);

}  // namespace relgraph
