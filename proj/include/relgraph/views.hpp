#pragma once

#include <set>
#include <string>
#include <vector>

#include "relgraph/query.hpp"

namespace relgraph {

struct ViewOccurrence {
  size_t query_index = 0;
  std::vector<int> map;    // definition vertex -> consumer graph vertex
  std::vector<int> edges;  // consumer edge ids aligned with definition edges
};

/// A shared subgraph worth materializing: its defining join, the columns any
/// consumer needs from it, and every occurrence it replaces.
struct ViewDef {
  std::string name;                         // stored table name
  JoinGraph definition;                     // canonical aliases, filters included
  std::vector<std::string> output_columns;  // qualified columns of the definition
  std::vector<std::string> stored_columns;  // flattened names in the stored table
  std::vector<ViewOccurrence> consumers;    // per occurrence; one query may appear several times

  ViewCostPiece cost_piece() const { return {&definition, output_columns, name, stored_columns}; }
  std::string pattern_key() const { return definition.encoding(); }
};

struct OccurrenceOverlapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Proposes one view per shared pattern with at least two usable occurrences
/// across the query set. Occurrences that overlap within one query cannot be
/// rewritten, so that query is skipped for that candidate. Output columns come
/// from need-analysis over the surviving consumers. Deterministic order;
/// names are name_prefix + ordinal, skipping catalog names and `taken`.
std::vector<ViewDef> propose_views(const std::vector<ExecutableQuery>& queries, const Database& db,
                                   const std::string& name_prefix = "mv",
                                   const std::set<std::string>& taken = {}, const MatchOptions& opts = {});

/// Replaces every occurrence of the view in consumer `query_index` with a scan
/// of the view table (aliases name_1, name_2, ... per occurrence), re-targeting
/// crossing edges and output columns onto the view's stored columns. Throws
/// OccurrenceOverlapError if two occurrences share a vertex.
ExecutableQuery rewrite_with_view(const ExecutableQuery& q, const ViewDef& view, size_t query_index);

/// Materializes each view exactly once (topological order, so a view may read
/// earlier views) and runs the rewritten queries against the augmented
/// catalog. Returns per-query results in input order.
std::vector<Relation> execute_with_views(const std::vector<ViewDef>& views,
                                         const std::vector<ExecutableQuery>& rewritten, const Database& db,
                                         const CostParams& params, ExecContext* ctx = nullptr);

/// The view's defining query with stored column names, ready to materialize.
Relation build_view_relation(const ViewDef& view, const Database& db, const CostParams& params,
                             ExecContext* ctx = nullptr);

}  // namespace relgraph
