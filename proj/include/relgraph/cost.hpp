#pragma once

#include <map>
#include <string>
#include <vector>

#include "relgraph/database.hpp"
#include "relgraph/join_graph.hpp"

namespace relgraph {

/// Cost-model constants. Page access is the dominant disk term; the per-tuple
/// constants price hash builds, probes, and output emission. Scaling all four
/// by the same factor scales every plan cost and changes no planner choice.
struct CostParams {
  double page_access = 4.0;       // cost of touching one disk page
  double build_per_tuple = 1.0;   // hash-table insert
  double probe_per_tuple = 1.0;   // hash-table lookup
  double output_per_tuple = 0.5;  // emitting one result tuple
  uint64_t page_size = 8192;

  static CostParams load(const std::string& json_path);
  void save(const std::string& json_path) const;
  std::string to_json() const;
};

/// Per-table numbers feeding estimation: exact for catalog tables, estimated
/// for views that are not materialized yet.
struct TableProfile {
  double rows = 0;
  double pages = 1;
  std::map<std::string, double> distinct;  // column -> non-null distinct count
  std::map<std::string, double> width;     // column -> avg serialized bytes
};

/// Catalog statistics plus overrides for planned-but-not-built views.
class StatsProvider {
 public:
  explicit StatsProvider(const Database& db) : db_(&db) {}

  void add_override(const std::string& table, TableProfile profile) { overrides_[table] = std::move(profile); }
  bool has(const std::string& table) const;
  TableProfile profile(const std::string& table) const;

  const Database& db() const { return *db_; }

 private:
  const Database* db_;
  std::map<std::string, TableProfile> overrides_;
};

struct JoinStepEstimate {
  int vertex = 0;       // vertex attached at this step
  double input_rows = 0;
  double output_rows = 0;
};

struct CardinalityEstimate {
  std::vector<int> join_order;        // vertex ids; front is the probe side
  std::vector<double> filtered_rows;  // per vertex, after its filters
  std::vector<JoinStepEstimate> steps;
  double rows = 0;   // final result estimate
  double width = 0;  // bytes per result row over the output columns
  double pages = 1;  // result pages at that width
};

/// Left-deep greedy estimation: smallest intermediate first, equi-join
/// selectivity 1/max(distinct sides), independent conjuncts, 1/d equality
/// filters and 1/3 inequality filters. Base tables estimate exactly.
CardinalityEstimate estimate_cardinality(const JoinGraph& g, const StatsProvider& stats,
                                         const std::vector<std::string>& output_columns, const CostParams& params);

struct CostTerm {
  std::string label;
  double amount = 0;
};

struct CostBreakdown {
  double total = 0;
  std::vector<CostTerm> terms;
  CardinalityEstimate estimate;
};

/// Hash-join query cost: the leftmost table is probed through the chain of
/// hash tables built over every other input.
CostBreakdown cost_query(const JoinGraph& g, const StatsProvider& stats, const CostParams& params,
                         const std::vector<std::string>& output_columns);

/// One non-shared branch of a merged query, as costing input.
struct MergedBranch {
  const JoinGraph* graph = nullptr;
  std::vector<std::string> output_columns;
  std::vector<Comparison> connecting;  // conditions between this branch and the shared result
  std::string label;
};

/// Merged-query cost: the shared subquery, each non-shared subquery, and the
/// outer-combination pass that probes the shared result against them.
CostBreakdown cost_merged_parts(const JoinGraph& shared, const std::vector<std::string>& shared_columns,
                                const std::vector<MergedBranch>& branches, const StatsProvider& stats,
                                const CostParams& params);

struct ViewCostPiece {
  const JoinGraph* definition = nullptr;
  std::vector<std::string> output_columns;  // qualified names within the definition
  std::string stored_name;
  std::vector<std::string> stored_columns;  // names the view table exposes, aligned with output_columns
};

struct QueryCostPiece {
  const JoinGraph* graph = nullptr;
  std::vector<std::string> output_columns;
  std::string label;
};

/// Estimated profile a view would have once materialized.
TableProfile estimate_view_profile(const ViewCostPiece& view, const StatsProvider& stats, const CostParams& params);

/// View-plan cost: every view is charged its defining join plus a disk write
/// of its pages, then each rewritten query is costed against estimated view
/// statistics. With no views this is exactly the plain per-query sum.
CostBreakdown cost_mv_plan(const std::vector<ViewCostPiece>& views, const std::vector<QueryCostPiece>& rewritten,
                           const StatsProvider& stats, const CostParams& params);

struct CalibrationResult {
  CostParams suggested;
  double build_ns_per_tuple = 0;
  double probe_ns_per_tuple = 0;
  double output_ns_per_tuple = 0;
  double page_write_ns = 0;
};

/// Measures per-tuple build/probe/output times on a synthetic table and
/// derives constants normalized to build_per_tuple = 1.
CalibrationResult calibrate_cost_params(size_t rows = 200000);

}  // namespace relgraph
