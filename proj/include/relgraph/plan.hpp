#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relgraph/merge.hpp"
#include "relgraph/views.hpp"

namespace relgraph {

struct PlainUnit {
  size_t query_index = 0;  // position in the original query list
  ExecutableQuery query;   // current (possibly view-rewritten) form
  std::vector<std::string> views_used;
};

struct MergedPlanUnit {
  size_t qa_index = 0, qb_index = 0;
  MergedUnit unit;
};

struct ViewStageUnit {
  ViewDef view;
};

using PlanUnit = std::variant<ViewStageUnit, PlainUnit, MergedPlanUnit>;

struct RewriteStep {
  std::string kind;         // "js-oj" or "js-mv"
  std::string description;  // human-readable target
  double cost_before = 0;
  double cost_after = 0;
};

/// The chosen execution shape: view stages first (in acceptance order), then
/// one unit per remaining query or merged pair. Every original query's result
/// is produced by exactly one plain or merged unit.
struct ExtractionPlan {
  std::vector<PlanUnit> units;
  double total_cost = 0;
  std::vector<RewriteStep> provenance;

  std::vector<const PlainUnit*> plain_units() const;
  std::vector<const MergedPlanUnit*> merged_units() const;
  std::vector<const ViewDef*> views() const;
};

using CostOracleFn = std::function<double(const ExtractionPlan&)>;

struct PlannerOptions {
  bool allow_merge = true;  // JS-OJ candidates
  bool allow_views = true;  // JS-MV candidates
  MatchOptions match;
  CostOracleFn oracle;  // defaults to the cost model
};

/// Statistics provider seeded with estimated profiles for every view the plan
/// introduces; planning always runs on estimates.
StatsProvider plan_stats(const ExtractionPlan& plan, const Database& db, const CostParams& params);

/// Cost-model evaluation of a whole plan (views charged join + page write,
/// merged units by the merged form, plain units by the query form).
CostBreakdown plan_cost(const ExtractionPlan& plan, const Database& db, const CostParams& params);

struct PlanCandidate {
  std::string kind;
  std::string description;
  ExtractionPlan plan;
  double cost = 0;
};

/// Every single-step rewrite of the current plan: one merge per eligible pair
/// of plain units, one view introduction per proposal. Deterministic order.
std::vector<PlanCandidate> enumerate_candidates(const ExtractionPlan& plan, const Database& db,
                                                const CostParams& params, const PlannerOptions& opts = {});

/// Greedy descent: repeatedly apply the cheapest candidate while it strictly
/// improves the plan cost. Deterministic for fixed inputs.
ExtractionPlan optimize(const std::vector<ExecutableQuery>& queries, const Database& db, const CostParams& params,
                        const PlannerOptions& opts = {});

/// Builds the baseline plan (one plain unit per query, no rewrites).
ExtractionPlan baseline_plan(const std::vector<ExecutableQuery>& queries, const Database& db,
                             const CostParams& params, const PlannerOptions& opts = {});

std::string explain_text(const ExtractionPlan& plan, const Database& db, const CostParams& params);
std::string explain_json(const ExtractionPlan& plan, const Database& db, const CostParams& params);

/// Shape summary recovered from explain_json, for report round-trips.
struct ExplainSummary {
  std::vector<std::string> unit_kinds;   // "view-stage" / "query" / "merged"
  std::vector<std::string> unit_names;   // view name / query name / "a+b"
  size_t provenance_steps = 0;
  double total_cost = 0;
};
ExplainSummary parse_explain_json(const std::string& json_text);
ExplainSummary summarize_plan(const ExtractionPlan& plan);

}  // namespace relgraph
