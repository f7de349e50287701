#include "relgraph/plan.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace relgraph {

std::vector<const PlainUnit*> ExtractionPlan::plain_units() const {
  std::vector<const PlainUnit*> out;
  for (const auto& u : units)
    if (const auto* p = std::get_if<PlainUnit>(&u)) out.push_back(p);
  return out;
}

std::vector<const MergedPlanUnit*> ExtractionPlan::merged_units() const {
  std::vector<const MergedPlanUnit*> out;
  for (const auto& u : units)
    if (const auto* m = std::get_if<MergedPlanUnit>(&u)) out.push_back(m);
  return out;
}

std::vector<const ViewDef*> ExtractionPlan::views() const {
  std::vector<const ViewDef*> out;
  for (const auto& u : units)
    if (const auto* s = std::get_if<ViewStageUnit>(&u)) out.push_back(&s->view);
  return out;
}

StatsProvider plan_stats(const ExtractionPlan& plan, const Database& db, const CostParams& params) {
  StatsProvider stats(db);
  for (const ViewDef* v : plan.views()) {
    if (db.has_table(v->name)) continue;  // already materialized
    stats.add_override(v->name, estimate_view_profile(v->cost_piece(), stats, params));
  }
  return stats;
}

CostBreakdown plan_cost(const ExtractionPlan& plan, const Database& db, const CostParams& params) {
  CostBreakdown out;
  StatsProvider stats(db);
  for (const auto& u : plan.units) {
    if (const auto* s = std::get_if<ViewStageUnit>(&u)) {
      const ViewDef& v = s->view;
      CostBreakdown def_cost = cost_query(v.definition, stats, params, v.output_columns);
      TableProfile profile = estimate_view_profile(v.cost_piece(), stats, params);
      double write = params.page_access * profile.pages;
      out.terms.push_back({"view " + v.name + " join", def_cost.total});
      out.terms.push_back({"view " + v.name + " write", write});
      out.total += def_cost.total + write;
      stats.add_override(v.name, std::move(profile));
    } else if (const auto* p = std::get_if<PlainUnit>(&u)) {
      CostBreakdown c = cost_query(p->query.graph, stats, params, p->query.output_columns);
      out.terms.push_back({"query " + p->query.name, c.total});
      out.total += c.total;
    } else if (const auto* m = std::get_if<MergedPlanUnit>(&u)) {
      CostBreakdown c = cost_merged(m->unit, stats, params);
      out.terms.push_back({"merged " + m->unit.origins[0].name + "+" + m->unit.origins[1].name, c.total});
      out.total += c.total;
    }
  }
  return out;
}

namespace {

double oracle_cost(const ExtractionPlan& plan, const Database& db, const CostParams& params,
                   const PlannerOptions& opts) {
  if (opts.oracle) return opts.oracle(plan);
  return plan_cost(plan, db, params).total;
}

// stages first (given order), then query units by smallest origin index
std::vector<PlanUnit> ordered_units(std::vector<PlanUnit> units) {
  std::stable_sort(units.begin(), units.end(), [](const PlanUnit& a, const PlanUnit& b) {
    auto rank = [](const PlanUnit& u) {
      if (std::holds_alternative<ViewStageUnit>(u)) return std::pair<int, size_t>{0, 0};
      if (const auto* p = std::get_if<PlainUnit>(&u)) return std::pair<int, size_t>{1, p->query_index};
      const auto* m = std::get_if<MergedPlanUnit>(&u);
      return std::pair<int, size_t>{1, std::min(m->qa_index, m->qb_index)};
    };
    return rank(a) < rank(b);
  });
  return units;
}

std::string pattern_tables(const JoinGraph& pattern) {
  std::vector<std::string> bases;
  for (const auto& v : pattern.vertices) bases.push_back(v.base);
  std::sort(bases.begin(), bases.end());
  std::string out;
  for (size_t i = 0; i < bases.size(); ++i) out += (i ? "*" : "") + bases[i];
  return out;
}

}  // namespace

ExtractionPlan baseline_plan(const std::vector<ExecutableQuery>& queries, const Database& db,
                             const CostParams& params, const PlannerOptions& opts) {
  ExtractionPlan plan;
  for (size_t i = 0; i < queries.size(); ++i) plan.units.push_back(PlainUnit{i, queries[i], {}});
  plan.total_cost = oracle_cost(plan, db, params, opts);
  return plan;
}

std::vector<PlanCandidate> enumerate_candidates(const ExtractionPlan& plan, const Database& db,
                                                const CostParams& params, const PlannerOptions& opts) {
  std::vector<PlanCandidate> out;
  StatsProvider stats = plan_stats(plan, db, params);

  // positions of plain units within the unit list
  std::vector<size_t> plain_pos;
  for (size_t i = 0; i < plan.units.size(); ++i)
    if (std::holds_alternative<PlainUnit>(plan.units[i])) plain_pos.push_back(i);

  if (opts.allow_merge) {
    for (size_t a = 0; a < plain_pos.size(); ++a) {
      for (size_t b = a + 1; b < plain_pos.size(); ++b) {
        const auto& qa = std::get<PlainUnit>(plan.units[plain_pos[a]]);
        const auto& qb = std::get<PlainUnit>(plan.units[plain_pos[b]]);
        MergedUnit merged;
        try {
          merged = merge_pair(qa.query, qb.query, stats, params, opts.match);
        } catch (const NoCommonJoinError&) {
          continue;
        }
        PlanCandidate cand;
        cand.kind = "js-oj";
        cand.description = "js-oj " + qa.query.name + "+" + qb.query.name + " shared " +
                           pattern_tables(merged.decomposition.shared.pattern);
        cand.plan = plan;
        cand.plan.units[plain_pos[a]] = MergedPlanUnit{qa.query_index, qb.query_index, std::move(merged)};
        cand.plan.units.erase(cand.plan.units.begin() + long(plain_pos[b]));
        cand.plan.units = ordered_units(std::move(cand.plan.units));
        cand.cost = oracle_cost(cand.plan, db, params, opts);
        out.push_back(std::move(cand));
      }
    }
  }

  if (opts.allow_views) {
    std::vector<ExecutableQuery> queries;
    queries.reserve(plain_pos.size());
    for (size_t pos : plain_pos) queries.push_back(std::get<PlainUnit>(plan.units[pos]).query);

    std::set<std::string> taken;
    for (const ViewDef* v : plan.views()) taken.insert(v->name);
    for (const auto& view : propose_views(queries, db, "mv", taken, opts.match)) {
      PlanCandidate cand;
      cand.kind = "js-mv";
      std::set<size_t> consumer_set;
      for (const auto& occ : view.consumers) consumer_set.insert(occ.query_index);
      cand.description = "js-mv " + view.name + " over " + pattern_tables(view.definition) + " x" +
                         std::to_string(view.consumers.size());
      cand.plan = plan;
      for (size_t qi : consumer_set) {
        auto& unit = std::get<PlainUnit>(cand.plan.units[plain_pos[qi]]);
        unit.query = rewrite_with_view(unit.query, view, qi);
        unit.views_used.push_back(view.name);
      }
      // the new stage goes after existing stages, before query units
      size_t insert_at = 0;
      while (insert_at < cand.plan.units.size() && std::holds_alternative<ViewStageUnit>(cand.plan.units[insert_at]))
        ++insert_at;
      cand.plan.units.insert(cand.plan.units.begin() + long(insert_at), ViewStageUnit{view});
      cand.cost = oracle_cost(cand.plan, db, params, opts);
      out.push_back(std::move(cand));
    }
  }
  return out;
}

ExtractionPlan optimize(const std::vector<ExecutableQuery>& queries, const Database& db, const CostParams& params,
                        const PlannerOptions& opts) {
  ExtractionPlan plan = baseline_plan(queries, db, params, opts);
  while (true) {
    auto candidates = enumerate_candidates(plan, db, params, opts);
    if (candidates.empty()) break;
    size_t best = 0;
    for (size_t i = 1; i < candidates.size(); ++i)
      if (candidates[i].cost < candidates[best].cost) best = i;
    if (!(candidates[best].cost < plan.total_cost)) break;  // strict improvement only

    RewriteStep step{candidates[best].kind, candidates[best].description, plan.total_cost, candidates[best].cost};
    plan = std::move(candidates[best].plan);
    plan.total_cost = step.cost_after;
    plan.provenance.push_back(std::move(step));
  }
  return plan;
}

namespace {

nlohmann::json unit_json(const PlanUnit& u, const Database& db, StatsProvider& stats, const CostParams& params) {
  nlohmann::json j;
  if (const auto* s = std::get_if<ViewStageUnit>(&u)) {
    const ViewDef& v = s->view;
    TableProfile profile = estimate_view_profile(v.cost_piece(), stats, params);
    j["kind"] = "view-stage";
    j["name"] = v.name;
    j["definition"] = nlohmann::json::parse(v.definition.to_json());
    j["columns"] = v.stored_columns;
    j["occurrences"] = v.consumers.size();
    j["estimated_rows"] = profile.rows;
    j["estimated_pages"] = profile.pages;
    if (db.has_table(v.name)) {
      j["actual_rows"] = db.stats(v.name).cardinality;
      j["actual_pages"] = db.stats(v.name).page_count;
    }
    stats.add_override(v.name, std::move(profile));
  } else if (const auto* p = std::get_if<PlainUnit>(&u)) {
    CostBreakdown c = cost_query(p->query.graph, stats, params, p->query.output_columns);
    j["kind"] = "query";
    j["name"] = p->query.name;
    j["graph"] = nlohmann::json::parse(p->query.graph.to_json());
    j["estimated_cost"] = c.total;
    j["estimated_rows"] = c.estimate.rows;
    if (!p->views_used.empty()) j["uses_views"] = p->views_used;
  } else if (const auto* m = std::get_if<MergedPlanUnit>(&u)) {
    CostBreakdown c = cost_merged(m->unit, stats, params);
    j["kind"] = "merged";
    j["name"] = m->unit.origins[0].name + "+" + m->unit.origins[1].name;
    j["origins"] = {m->unit.origins[0].name, m->unit.origins[1].name};
    j["graph"] = nlohmann::json::parse(m->unit.merged.to_json());
    j["shared"] = nlohmann::json::parse(m->unit.shared.to_json());
    j["estimated_cost"] = c.total;
    nlohmann::json outer = nlohmann::json::array();
    for (const auto& e : m->unit.merged.edges)
      if (e.type == JoinType::Outer) outer.push_back(e.cond.render());
    j["outer_edges"] = std::move(outer);
  }
  return j;
}

}  // namespace

std::string explain_json(const ExtractionPlan& plan, const Database& db, const CostParams& params) {
  nlohmann::json j;
  j["total_estimated_cost"] = plan_cost(plan, db, params).total;
  j["units"] = nlohmann::json::array();
  StatsProvider stats(db);
  for (const auto& u : plan.units) j["units"].push_back(unit_json(u, db, stats, params));
  j["provenance"] = nlohmann::json::array();
  for (const auto& s : plan.provenance)
    j["provenance"].push_back(
        {{"kind", s.kind}, {"description", s.description}, {"before", s.cost_before}, {"after", s.cost_after}});
  return j.dump(2);
}

std::string explain_text(const ExtractionPlan& plan, const Database& db, const CostParams& params) {
  std::ostringstream out;
  CostBreakdown total = plan_cost(plan, db, params);
  out << "plan: estimated cost " << total.total << "\n";
  StatsProvider stats(db);
  size_t n = 0;
  for (const auto& u : plan.units) {
    ++n;
    if (const auto* s = std::get_if<ViewStageUnit>(&u)) {
      const ViewDef& v = s->view;
      TableProfile profile = estimate_view_profile(v.cost_piece(), stats, params);
      out << n << ". view stage: " << v.name << " over " << pattern_tables(v.definition) << ", "
          << v.consumers.size() << " occurrence(s), est rows " << profile.rows << ", est pages " << profile.pages
          << "\n";
      for (const auto& e : v.definition.edges) out << "     join " << e.cond.render() << "\n";
      stats.add_override(v.name, std::move(profile));
    } else if (const auto* p = std::get_if<PlainUnit>(&u)) {
      CostBreakdown c = cost_query(p->query.graph, stats, params, p->query.output_columns);
      out << n << ". query " << p->query.name << ": est cost " << c.total << ", est rows " << c.estimate.rows;
      if (!p->views_used.empty()) {
        out << " (uses";
        for (const auto& v : p->views_used) out << " " << v;
        out << ")";
      }
      out << "\n";
    } else if (const auto* m = std::get_if<MergedPlanUnit>(&u)) {
      CostBreakdown c = cost_merged(m->unit, stats, params);
      out << n << ". merged " << m->unit.origins[0].name << "+" << m->unit.origins[1].name << ": est cost "
          << c.total << "\n";
      for (const auto& e : m->unit.merged.edges)
        out << "     " << (e.type == JoinType::Outer ? "outer " : "inner ") << e.cond.render() << "\n";
    }
  }
  if (!plan.provenance.empty()) {
    out << "provenance:\n";
    for (const auto& s : plan.provenance)
      out << "  " << s.kind << " " << s.description << ": " << s.cost_before << " -> " << s.cost_after << "\n";
  }
  return out.str();
}

ExplainSummary parse_explain_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ExplainSummary s;
  s.total_cost = j.at("total_estimated_cost").get<double>();
  for (const auto& u : j.at("units")) {
    s.unit_kinds.push_back(u.at("kind").get<std::string>());
    s.unit_names.push_back(u.at("name").get<std::string>());
  }
  s.provenance_steps = j.at("provenance").size();
  return s;
}

ExplainSummary summarize_plan(const ExtractionPlan& plan) {
  ExplainSummary s;
  for (const auto& u : plan.units) {
    if (const auto* v = std::get_if<ViewStageUnit>(&u)) {
      s.unit_kinds.push_back("view-stage");
      s.unit_names.push_back(v->view.name);
    } else if (const auto* p = std::get_if<PlainUnit>(&u)) {
      s.unit_kinds.push_back("query");
      s.unit_names.push_back(p->query.name);
    } else if (const auto* m = std::get_if<MergedPlanUnit>(&u)) {
      s.unit_kinds.push_back("merged");
      s.unit_names.push_back(m->unit.origins[0].name + "+" + m->unit.origins[1].name);
    }
  }
  s.provenance_steps = plan.provenance.size();
  return s;
}

}  // namespace relgraph
