// Command-line front end: synthetic data generation, model checking, plan
// inspection, extraction, and a four-mode benchmark.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "relgraph/pipeline.hpp"
#include "relgraph/synth.hpp"

namespace {

using namespace relgraph;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CostParams load_params(const std::string& path) {
  if (path.empty()) return CostParams{};
  return CostParams::load(path);
}

int cmd_gen(const std::string& out_dir, SynthSpec spec, uint64_t seed, const std::string& preset) {
  if (preset == "bench") {
    // wide item/promo dimensions keep the self-join fan-out flat while the
    // repeated dimension builds stay expensive enough to be worth sharing
    spec.items = spec.sales * 4;
    spec.promos = spec.sales * 2;
    spec.stores = 100;
    spec.customers = 500;
  } else if (!preset.empty() && preset != "demo") {
    std::cerr << "unknown preset '" << preset << "' (demo, bench)\n";
    return 1;
  }
  Database db = generate_synthetic(spec, seed);
  write_database_csvs(db, out_dir);
  std::ofstream demo(std::filesystem::path(out_dir) / "demo.dsl");
  demo << demo_model_text();
  std::ofstream workload(std::filesystem::path(out_dir) / "workload.dsl");
  workload << workload_model_text();
  std::cout << "wrote " << out_dir << "/catalog.json (checksum " << database_checksum(db) << ")\n";
  for (const auto& name : db.table_names())
    std::cout << "  " << name << ": " << db.stats(name).cardinality << " rows, " << db.stats(name).page_count
              << " pages\n";
  return 0;
}

int cmd_load(const std::string& catalog) {
  Database db = load_catalog(catalog);
  for (const auto& name : db.table_names()) {
    const auto& s = db.stats(name);
    std::cout << name << ": " << s.cardinality << " rows, " << s.page_count << " pages, distinct [";
    const auto& schema = db.table(name).schema;
    for (size_t i = 0; i < schema.size(); ++i)
      std::cout << (i ? ", " : "") << schema.at(i).name << "=" << s.columns[i].distinct;
    std::cout << "]\n";
  }
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& catalog) {
  GraphModelDef model = parse_model(read_file(model_path));
  std::cout << render_model(model);
  if (!catalog.empty()) {
    Database db = load_catalog(catalog);
    auto diags = validate_against_catalog(model, db);
    for (const auto& d : diags) std::cerr << d.to_json_line() << "\n";
    if (!diags.empty()) return 1;
  }
  return 0;
}

RunConfig make_config(const std::string& mode, const std::string& params_path, const std::string& format,
                      bool no_dedup, bool allow_dangling) {
  RunConfig cfg;
  cfg.mode = run_mode_from_name(mode);
  cfg.params = load_params(params_path);
  if (format == "csv") cfg.format = OutputFormat::Csv;
  else if (format == "json-lines") cfg.format = OutputFormat::JsonLines;
  else throw std::invalid_argument("unknown format '" + format + "' (csv, json-lines)");
  cfg.dedup_edges = !no_dedup;
  cfg.allow_dangling = allow_dangling;
  return cfg;
}

int cmd_plan(const std::string& catalog, const std::string& model_path, const std::string& mode,
             const std::string& params_path, bool as_json, const std::string& dot_dir) {
  Database db = load_catalog(catalog);
  GraphModelDef model = parse_model(read_file(model_path));
  RunConfig cfg = make_config(mode, params_path, "csv", false, false);
  auto diags = validate_against_catalog(model, db);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << d.to_json_line() << "\n";
    return 1;
  }

  std::vector<ExecutableQuery> queries;
  for (const auto& e : model.edges) queries.push_back(query_from_edge(e));
  PlannerOptions opts;
  opts.allow_merge = cfg.mode == RunMode::OjOnly || cfg.mode == RunMode::Hybrid;
  opts.allow_views = cfg.mode == RunMode::MvOnly || cfg.mode == RunMode::Hybrid;
  ExtractionPlan plan = cfg.mode == RunMode::Naive ? baseline_plan(queries, db, cfg.params, opts)
                                                   : optimize(queries, db, cfg.params, opts);
  std::cout << (as_json ? explain_json(plan, db, cfg.params) : explain_text(plan, db, cfg.params));

  if (!dot_dir.empty()) {
    std::filesystem::create_directories(dot_dir);
    auto dump = [&](const std::string& file, const JoinGraph& g) {
      std::ofstream out(std::filesystem::path(dot_dir) / (file + ".dot"));
      out << g.to_dot();
    };
    for (const auto& unit : plan.units) {
      if (const auto* s = std::get_if<ViewStageUnit>(&unit)) dump("view_" + s->view.name, s->view.definition);
      else if (const auto* p = std::get_if<PlainUnit>(&unit)) dump("query_" + p->query.name, p->query.graph);
      else if (const auto* m = std::get_if<MergedPlanUnit>(&unit))
        dump("merged_" + m->unit.origins[0].name + "_" + m->unit.origins[1].name, m->unit.merged);
    }
    std::cout << "wrote join-graph dot files to " << dot_dir << "\n";
  }
  return 0;
}

int cmd_extract(const std::string& catalog, const std::string& model_path, const std::string& mode,
                const std::string& params_path, const std::string& out_dir, const std::string& format,
                bool no_dedup, bool allow_dangling) {
  Database db = load_catalog(catalog);
  GraphModelDef model = parse_model(read_file(model_path));
  RunConfig cfg = make_config(mode, params_path, format, no_dedup, allow_dangling);
  ExtractReport report = extract(model, db, cfg);
  write_graph(report.graph, out_dir, cfg.format);
  std::ofstream metrics(std::filesystem::path(out_dir) / "metrics.json");
  metrics << metrics_json(report) << "\n";
  std::cout << "mode " << run_mode_name(cfg.mode) << ": " << report.graph.vertex_count() << " vertices, "
            << report.graph.edge_count() << " edges, " << report.wall_millis << " ms, estimated cost "
            << report.estimated_cost << "\n";
  return 0;
}

int cmd_bench(const std::string& catalog, const std::string& model_path, const std::string& params_path,
              bool no_dedup) {
  Database db = load_catalog(catalog);
  GraphModelDef model = parse_model(read_file(model_path));

  printf("%-12s %12s %16s %10s %10s\n", "mode", "wall_ms", "estimated_cost", "vertices", "edges");
  PropertyGraph reference;
  bool have_reference = false;
  bool all_equal = true;
  for (const char* mode : {"naive", "js-oj-only", "js-mv-only", "hybrid"}) {
    RunConfig cfg = make_config(mode, params_path, "csv", no_dedup, false);
    ExtractReport report = extract(model, db, cfg);
    printf("%-12s %12.1f %16.1f %10zu %10zu\n", mode, report.wall_millis, report.estimated_cost,
           report.graph.vertex_count(), report.graph.edge_count());
    if (!have_reference) {
      reference = std::move(report.graph);
      have_reference = true;
    } else if (!graphs_equal(reference, report.graph)) {
      all_equal = false;
    }
  }
  std::cout << (all_equal ? "all modes produced identical graphs\n" : "MODE MISMATCH: graphs differ\n");
  return all_equal ? 0 : 1;
}

int cmd_calibrate(size_t rows, const std::string& out_path) {
  CalibrationResult r = calibrate_cost_params(rows);
  std::cout << "build:  " << r.build_ns_per_tuple << " ns/tuple\n"
            << "probe:  " << r.probe_ns_per_tuple << " ns/tuple\n"
            << "output: " << r.output_ns_per_tuple << " ns/tuple\n"
            << "page:   " << r.page_write_ns << " ns/page\n"
            << "suggested constants:\n"
            << r.suggested.to_json() << "\n";
  if (!out_path.empty()) {
    r.suggested.save(out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property-graph extraction from relational tables with join-sharing optimization"};
  app.require_subcommand(1);

  std::string out_dir = "data", preset, catalog, model_path, mode = "hybrid", params_path, format = "csv", dot_dir;
  bool as_json = false, no_dedup = false, allow_dangling = false;
  uint64_t seed = 7;
  SynthSpec spec;
  size_t calib_rows = 200000;
  std::string calib_out;

  auto* gen = app.add_subcommand("gen", "generate a synthetic star-schema database");
  gen->add_option("--out", out_dir, "output directory")->capture_default_str();
  gen->add_option("--sales", spec.sales, "fact table rows")->capture_default_str();
  gen->add_option("--customers", spec.customers)->capture_default_str();
  gen->add_option("--items", spec.items)->capture_default_str();
  gen->add_option("--promos", spec.promos)->capture_default_str();
  gen->add_option("--stores", spec.stores)->capture_default_str();
  gen->add_option("--skew", spec.zipf_skew, "zipf exponent for foreign keys")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--preset", preset, "demo or bench (bench derives dimension sizes from --sales)");

  auto* load = app.add_subcommand("load", "load a catalog and print table statistics");
  load->add_option("--catalog", catalog, "catalog.json path")->required();

  auto* parse = app.add_subcommand("parse", "parse a model file and print its normalized form");
  parse->add_option("--model", model_path)->required();
  parse->add_option("--catalog", catalog, "optionally validate against this catalog");

  auto* plan = app.add_subcommand("plan", "print the optimized plan for a model");
  plan->add_option("--catalog", catalog)->required();
  plan->add_option("--model", model_path)->required();
  plan->add_option("--mode", mode, "naive | js-oj-only | js-mv-only | hybrid")->capture_default_str();
  plan->add_option("--params", params_path, "cost constants JSON");
  plan->add_flag("--json", as_json, "structured output");
  plan->add_option("--dot", dot_dir, "also write each unit's join graph as a dot file into this directory");

  auto* extract_cmd = app.add_subcommand("extract", "run the extraction and write the graph");
  extract_cmd->add_option("--catalog", catalog)->required();
  extract_cmd->add_option("--model", model_path)->required();
  extract_cmd->add_option("--mode", mode)->capture_default_str();
  extract_cmd->add_option("--params", params_path);
  extract_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
  extract_cmd->add_option("--format", format, "csv | json-lines")->capture_default_str();
  extract_cmd->add_flag("--no-dedup", no_dedup, "keep duplicate edges (multigraph semantics)");
  extract_cmd->add_flag("--allow-dangling", allow_dangling, "skip the endpoint existence check");

  auto* bench = app.add_subcommand("bench", "run all four modes and compare");
  bench->add_option("--catalog", catalog)->required();
  bench->add_option("--model", model_path)->required();
  bench->add_option("--params", params_path);
  bench->add_flag("--no-dedup", no_dedup);

  auto* calibrate = app.add_subcommand("calibrate", "measure per-tuple costs and suggest constants");
  calibrate->add_option("--rows", calib_rows)->capture_default_str();
  calibrate->add_option("--out", calib_out, "write suggested constants to this JSON file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(out_dir, spec, seed, preset);
    if (load->parsed()) return cmd_load(catalog);
    if (parse->parsed()) return cmd_parse(model_path, catalog);
    if (plan->parsed()) return cmd_plan(catalog, model_path, mode, params_path, as_json, dot_dir);
    if (extract_cmd->parsed())
      return cmd_extract(catalog, model_path, mode, params_path, out_dir, format, no_dedup, allow_dangling);
    if (bench->parsed()) return cmd_bench(catalog, model_path, params_path, no_dedup);
    if (calibrate->parsed()) return cmd_calibrate(calib_rows, calib_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    for (const auto& d : e.diagnostics) std::cerr << d.to_json_line() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
