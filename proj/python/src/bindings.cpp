#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relgraph/pipeline.hpp"
#include "relgraph/synth.hpp"

namespace py = pybind11;
using namespace relgraph;

namespace {

py::object value_to_py(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return py::none();
    case ValueKind::Int: return py::int_(v.as_int());
    case ValueKind::Float: return py::float_(v.as_float());
    case ValueKind::Text: return py::str(v.as_text());
    case ValueKind::Bool: return py::bool_(v.as_bool());
  }
  return py::none();
}

py::dict graph_to_py(const PropertyGraph& graph) {
  py::dict vertices, edges;
  for (const auto& vs : graph.vertices) {
    py::list rows;
    for (size_t i = 0; i < vs.ids.size(); ++i) {
      py::dict props;
      for (size_t p = 0; p < vs.property_names.size(); ++p)
        props[py::str(vs.property_names[p])] = value_to_py(vs.properties[i][p]);
      rows.append(py::make_tuple(value_to_py(vs.ids[i]), props));
    }
    vertices[py::str(vs.label)] = rows;
  }
  for (const auto& es : graph.edges) {
    py::list rows;
    for (size_t i = 0; i < es.src.size(); ++i) {
      py::dict props;
      for (size_t p = 0; p < es.property_names.size(); ++p)
        props[py::str(es.property_names[p])] = value_to_py(es.properties[i][p]);
      rows.append(py::make_tuple(value_to_py(es.src[i]), value_to_py(es.dst[i]), props));
    }
    edges[py::str(es.label)] = rows;
  }
  py::dict out;
  out["vertices"] = vertices;
  out["edges"] = edges;
  return out;
}

RunConfig config_for(const std::string& mode, bool dedup_edges, const std::string& params_path) {
  RunConfig cfg;
  cfg.mode = run_mode_from_name(mode);
  cfg.dedup_edges = dedup_edges;
  if (!params_path.empty()) cfg.params = CostParams::load(params_path);
  return cfg;
}

std::vector<ExecutableQuery> model_queries(const GraphModelDef& model) {
  std::vector<ExecutableQuery> queries;
  for (const auto& e : model.edges) queries.push_back(query_from_edge(e));
  return queries;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Property-graph extraction from relational tables with join-sharing query optimization.";

  py::register_exception<ParseError>(m, "ModelParseError", PyExc_ValueError);

  py::class_<Database>(m, "Database")
      .def(py::init<uint64_t>(), py::arg("page_size") = 8192)
      .def("table_names", &Database::table_names)
      .def("has_table", &Database::has_table)
      .def("row_count", [](const Database& db, const std::string& name) { return db.stats(name).cardinality; })
      .def("page_count", [](const Database& db, const std::string& name) { return db.stats(name).page_count; })
      .def("__repr__", [](const Database& db) {
        return "<relgraph.Database with " + std::to_string(db.table_names().size()) + " tables>";
      });

  py::class_<GraphModelDef>(m, "GraphModel")
      .def_property_readonly("graph_name", [](const GraphModelDef& model) { return model.graph_name; })
      .def_property_readonly("vertex_labels",
                             [](const GraphModelDef& model) {
                               std::vector<std::string> out;
                               for (const auto& v : model.vertices) out.push_back(v.label);
                               return out;
                             })
      .def_property_readonly("edge_labels",
                             [](const GraphModelDef& model) {
                               std::vector<std::string> out;
                               for (const auto& e : model.edges) out.push_back(e.label);
                               return out;
                             })
      .def("render", &render_model);

  m.def("parse_model", &parse_model, py::arg("text"),
        "Parse graph-model DSL text; raises ModelParseError with a position on bad input.");

  m.def(
      "validate",
      [](const GraphModelDef& model, const Database& db) {
        py::list out;
        for (const auto& d : validate_against_catalog(model, db)) {
          py::dict item;
          item["code"] = d.code;
          item["message"] = d.message;
          out.append(item);
        }
        return out;
      },
      py::arg("model"), py::arg("db"), "Catalog diagnostics; an empty list means the model is executable.");

  m.def("load_catalog", &load_catalog, py::arg("catalog_path"));

  m.def(
      "generate_synthetic",
      [](uint64_t sales, uint64_t customers, uint64_t items, uint64_t promos, uint64_t stores, double zipf_skew,
         uint64_t seed) {
        return generate_synthetic({sales, customers, items, promos, stores, zipf_skew, 8192}, seed);
      },
      py::arg("sales") = 10000, py::arg("customers") = 500, py::arg("items") = 200, py::arg("promos") = 50,
      py::arg("stores") = 20, py::arg("zipf_skew") = 0.5, py::arg("seed") = 7);

  m.def("write_database_csvs", &write_database_csvs, py::arg("db"), py::arg("dir"));
  m.def("database_checksum", &database_checksum, py::arg("db"));
  m.def("demo_model_text", &demo_model_text);
  m.def("workload_model_text", &workload_model_text);

  m.def(
      "plan",
      [](const GraphModelDef& model, const Database& db, const std::string& mode, const std::string& params_path) {
        RunConfig cfg = config_for(mode, true, params_path);
        auto queries = model_queries(model);
        PlannerOptions opts;
        opts.allow_merge = cfg.mode == RunMode::OjOnly || cfg.mode == RunMode::Hybrid;
        opts.allow_views = cfg.mode == RunMode::MvOnly || cfg.mode == RunMode::Hybrid;
        ExtractionPlan plan = cfg.mode == RunMode::Naive ? baseline_plan(queries, db, cfg.params, opts)
                                                         : optimize(queries, db, cfg.params, opts);
        return explain_json(plan, db, cfg.params);
      },
      py::arg("model"), py::arg("db"), py::arg("mode") = "hybrid", py::arg("params_path") = "",
      "Optimize the model's edge queries and return the plan explanation as JSON text.");

  m.def(
      "extract",
      [](const GraphModelDef& model, const Database& db, const std::string& mode, bool dedup_edges,
         const std::string& out_dir, const std::string& format, const std::string& params_path) {
        RunConfig cfg = config_for(mode, dedup_edges, params_path);
        if (format == "json-lines") cfg.format = OutputFormat::JsonLines;
        ExtractReport report = extract(model, db, cfg);
        if (!out_dir.empty()) write_graph(report.graph, out_dir, cfg.format);

        py::dict out = graph_to_py(report.graph);
        out["mode"] = run_mode_name(cfg.mode);
        out["wall_millis"] = report.wall_millis;
        out["estimated_cost"] = report.estimated_cost;
        out["metrics_json"] = metrics_json(report);
        return out;
      },
      py::arg("model"), py::arg("db"), py::arg("mode") = "hybrid", py::arg("dedup_edges") = true,
      py::arg("out_dir") = "", py::arg("format") = "csv", py::arg("params_path") = "",
      "Run the pipeline and return the property graph plus run metrics.");
}
