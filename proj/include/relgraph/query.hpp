#pragma once

#include <string>
#include <vector>

#include "relgraph/cost.hpp"
#include "relgraph/database.hpp"
#include "relgraph/dsl.hpp"
#include "relgraph/join_graph.hpp"
#include "relgraph/metrics.hpp"

namespace relgraph {

/// A join graph paired with the columns its result must expose, in order.
struct ExecutableQuery {
  std::string name;
  JoinGraph graph;
  std::vector<std::string> output_columns;  // qualified alias.column
};

/// Builds the executable query of an edge definition: endpoint id bindings
/// first, then the selected property columns.
ExecutableQuery query_from_edge(const EdgeDef& edge);

/// Executes a join graph: vertices are scanned (filters applied, columns
/// pruned to what later steps and the output need), then joined left-deep in
/// the cost model's greedy order. Equality conjuncts drive hash joins;
/// edges with no equality conjunct fall back to a nested-loop step.
Relation run_query(const ExecutableQuery& q, const Database& db, const CostParams& params,
                   ExecContext* ctx = nullptr);

/// Scans one table instance: qualifies column names with the alias, applies
/// the vertex filters, and prunes to `keep` (empty keep = all columns).
Relation scan_vertex(const JoinGraph& g, int vertex, const Database& db,
                     const std::vector<std::string>& keep, ExecContext* ctx = nullptr);

/// True result cardinality by execution; the estimator's testing oracle.
size_t true_cardinality(const ExecutableQuery& q, const Database& db, const CostParams& params);

}  // namespace relgraph
