#pragma once

#include <string>
#include <vector>

#include "relgraph/plan.hpp"

namespace relgraph {

enum class RunMode { Naive, OjOnly, MvOnly, Hybrid };

RunMode run_mode_from_name(const std::string& name);  // naive | js-oj-only | js-mv-only | hybrid
const char* run_mode_name(RunMode mode);

enum class OutputFormat { Csv, JsonLines };

struct RunConfig {
  RunMode mode = RunMode::Hybrid;
  bool dedup_edges = true;
  bool allow_dangling = false;
  OutputFormat format = OutputFormat::Csv;
  CostParams params;
  MatchOptions match;
};

struct VertexSet {
  std::string label;
  std::vector<std::string> property_names;
  std::vector<Value> ids;
  std::vector<Row> properties;  // aligned with ids
};

struct EdgeSet {
  std::string label;
  std::string src_label, dst_label;
  std::vector<std::string> property_names;
  std::vector<Value> src, dst;  // aligned
  std::vector<Row> properties;
};

/// Extraction output: labeled vertices and edges in canonical order (labels
/// sorted, rows sorted by id / (src, dst, properties)), so two graphs are
/// comparable field by field.
struct PropertyGraph {
  std::vector<VertexSet> vertices;
  std::vector<EdgeSet> edges;

  void canonicalize();
  size_t vertex_count() const;
  size_t edge_count() const;
};

bool graphs_equal(const PropertyGraph& a, const PropertyGraph& b);

struct ValidationError : std::runtime_error {
  ValidationError(std::string msg, std::vector<Diagnostic> diags)
      : std::runtime_error(std::move(msg)), diagnostics(std::move(diags)) {}
  std::vector<Diagnostic> diagnostics;
};

struct UnitTiming {
  std::string label;
  double millis = 0;
};

struct ExtractReport {
  PropertyGraph graph;
  ExtractionPlan plan;
  double estimated_cost = 0;
  double wall_millis = 0;
  std::vector<UnitTiming> unit_times;
  ExecMetrics metrics;
};

/// Runs the full pipeline: validate the model, plan edge queries under the
/// configured mode, execute the plan, and assemble the property graph.
ExtractReport extract(const GraphModelDef& model, const Database& db, const RunConfig& cfg);

/// Writes vertices_<label> / edges_<label> files plus metrics.json.
void write_graph(const PropertyGraph& graph, const std::string& dir, OutputFormat format);

std::string metrics_json(const ExtractReport& report);

}  // namespace relgraph
