#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "relgraph/pipeline.hpp"
#include "relgraph/synth.hpp"
#include "support/build.hpp"

using namespace relgraph;
using namespace relgraph::testing;

namespace {

const char* kRetailModel = R"(
CREATE GRAPH(Graph_Name: RetailG);
CREATE VERTEX(Graph_Name: RetailG, Label: Customer, ID_Column: c_id, Query: SELECT name FROM C);
CREATE VERTEX(Graph_Name: RetailG, Label: Item, ID_Column: i_no, Query: SELECT name, price FROM I);
CREATE EDGE(Graph_Name: RetailG, Label: GetDisc, Src_Label: Customer, Dst_Label: Item,
  Query: SELECT null FROM C, SS, P, I
  WHERE C.c_id=SS.c_id AND I.i_no=SS.i_no AND P.p_no=SS.p_no AND I.i_no=P.i_no);
CREATE EDGE(Graph_Name: RetailG, Label: CoPur, Src_Label: Customer, Dst_Label: Customer,
  Query: SELECT null FROM C1, SS1, I, SS2, C2
  WHERE C1.c_id=SS1.c_id AND I.i_no=SS1.i_no AND C2.c_id=SS2.c_id AND I.i_no=SS2.i_no);
)";

// two customers, two items, one promotion; customer 1 bought the promoted
// item under its promotion, both customers bought item 10
Database toy_retail_db() {
  Database db;
  Relation c;
  c.schema = Schema({{"c_id", ValueKind::Int}, {"name", ValueKind::Text}});
  c.rows = {{iv(1), tv("ann")}, {iv(2), tv("bob")}};
  Relation i;
  i.schema = Schema({{"i_no", ValueKind::Int}, {"name", ValueKind::Text}, {"price", ValueKind::Float}});
  i.rows = {{iv(10), tv("tea"), fv(2.5)}, {iv(11), tv("mug"), fv(8.0)}};
  Relation p;
  p.schema = Schema({{"p_no", ValueKind::Int}, {"i_no", ValueKind::Int}});
  p.rows = {{iv(5), iv(10)}};
  Relation ss;
  ss.schema = Schema({{"c_id", ValueKind::Int}, {"i_no", ValueKind::Int}, {"p_no", ValueKind::Int}});
  ss.rows = {{iv(1), iv(10), iv(5)}, {iv(2), iv(11), iv(5)}, {iv(2), iv(10), iv(6)}};
  db.put_table("C", std::move(c));
  db.put_table("I", std::move(i));
  db.put_table("P", std::move(p));
  db.put_table("SS", std::move(ss));
  return db;
}

}  // namespace

TEST_CASE("toy extraction produces the expected discount and co-purchase edges") {
  Database db = toy_retail_db();
  GraphModelDef model = parse_model(kRetailModel);
  RunConfig cfg;
  cfg.mode = RunMode::Naive;
  ExtractReport report = extract(model, db, cfg);

  REQUIRE(report.graph.vertices.size() == 2);
  const VertexSet& customers = report.graph.vertices[0];
  CHECK(customers.label == "Customer");
  REQUIRE(customers.ids.size() == 2);
  CHECK(customers.ids[0] == iv(1));
  CHECK(customers.properties[0] == Row{tv("ann")});
  const VertexSet& items = report.graph.vertices[1];
  CHECK(items.label == "Item");
  CHECK(items.property_names == std::vector<std::string>{"name", "price"});

  REQUIRE(report.graph.edges.size() == 2);
  const EdgeSet& copur = report.graph.edges[0];
  CHECK(copur.label == "CoPur");
  // item 10 connects customers 1 and 2 in both directions plus self-pairs,
  // item 11 adds only the 2-2 self-pair (deduplicated)
  REQUIRE(copur.src.size() == 4);
  CHECK(copur.src[0] == iv(1));
  CHECK(copur.dst[0] == iv(1));
  CHECK(copur.src[1] == iv(1));
  CHECK(copur.dst[1] == iv(2));
  CHECK(copur.src[2] == iv(2));
  CHECK(copur.dst[2] == iv(1));
  CHECK(copur.src[3] == iv(2));
  CHECK(copur.dst[3] == iv(2));

  const EdgeSet& disc = report.graph.edges[1];
  CHECK(disc.label == "GetDisc");
  REQUIRE(disc.src.size() == 1);  // only customer 1 bought the promoted item under promotion 5
  CHECK(disc.src[0] == iv(1));
  CHECK(disc.dst[0] == iv(10));
}

TEST_CASE("a model with vertices only extracts no edges") {
  Database db = toy_retail_db();
  GraphModelDef model = parse_model(R"(
CREATE GRAPH(Graph_Name: G);
CREATE VERTEX(Graph_Name: G, Label: Customer, ID_Column: c_id, Query: SELECT name FROM C);
)");
  RunConfig cfg;
  ExtractReport report = extract(model, db, cfg);
  CHECK(report.graph.edge_count() == 0);
  CHECK(report.graph.vertex_count() == 2);
}

TEST_CASE("all four modes produce the identical canonical graph") {
  Database db = generate_synthetic({3000, 40, 100, 30, 8, 0.7, 8192}, 21);
  GraphModelDef model = parse_model(workload_model_text());

  RunConfig cfg;
  cfg.mode = RunMode::Naive;
  PropertyGraph reference = extract(model, db, cfg).graph;
  for (RunMode mode : {RunMode::OjOnly, RunMode::MvOnly, RunMode::Hybrid}) {
    cfg.mode = mode;
    PropertyGraph got = extract(model, db, cfg).graph;
    CHECK(graphs_equal(reference, got));
  }
}

TEST_CASE("edge multiplicities match naive mode exactly when dedup is off") {
  Database db = generate_synthetic({2000, 30, 60, 20, 6, 0.7, 8192}, 22);
  GraphModelDef model = parse_model(workload_model_text());

  RunConfig cfg;
  cfg.dedup_edges = false;
  cfg.mode = RunMode::Naive;
  PropertyGraph reference = extract(model, db, cfg).graph;
  CHECK(reference.edge_count() > 0);
  for (RunMode mode : {RunMode::OjOnly, RunMode::MvOnly, RunMode::Hybrid}) {
    cfg.mode = mode;
    PropertyGraph got = extract(model, db, cfg).graph;
    CHECK(graphs_equal(reference, got));
  }
}

TEST_CASE("generation is deterministic per seed") {
  SynthSpec spec{10000, 500, 200, 50, 20, 0.5, 8192};
  Database a = generate_synthetic(spec, 7);
  Database b = generate_synthetic(spec, 7);
  Database c = generate_synthetic(spec, 8);
  CHECK(database_checksum(a) == database_checksum(b));
  CHECK(database_checksum(a) != database_checksum(c));
}

TEST_CASE("an empty fact table empties every edge") {
  Database db = generate_synthetic({0, 10, 10, 5, 3, 0.5, 8192}, 3);
  CHECK(db.stats("SS").cardinality == 0);
  GraphModelDef model = parse_model(workload_model_text());
  RunConfig cfg;
  ExtractReport report = extract(model, db, cfg);
  CHECK(report.graph.edge_count() == 0);
  CHECK(report.graph.vertex_count() > 0);
}

TEST_CASE("fact foreign keys cover dimensions with exact distinct counts") {
  SynthSpec spec{10000, 500, 200, 50, 20, 0.5, 8192};
  Database db = generate_synthetic(spec, 7);
  const Schema& schema = db.table("SS").schema;
  auto distinct_of = [&](const std::string& col) {
    return db.stats("SS").columns[schema.index_of(col)].distinct;
  };
  CHECK(distinct_of("c_id") == 500);
  CHECK(distinct_of("i_no") == 200);
  CHECK(distinct_of("p_no") == 50);
  CHECK(distinct_of("s_id") == 20);
  CHECK(db.stats("C").columns[0].distinct == 500);
  CHECK(db.stats("I").columns[0].distinct == 200);

  // columns larger than the fact cover exactly the fact's row count
  Database sparse = generate_synthetic({100, 500, 200, 50, 20, 0.5, 8192}, 7);
  CHECK(sparse.stats("SS").columns[0].distinct == 100);
}

TEST_CASE("rejecting invalid specs") {
  CHECK_THROWS_AS(generate_synthetic({100, 0, 10, 5, 3, 0.5, 8192}, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic({100, 10, 10, 5, 3, -1.0, 8192}, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_mode_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("validation failures abort extraction with diagnostics") {
  Database db = toy_retail_db();
  GraphModelDef model = parse_model(R"(
CREATE GRAPH(Graph_Name: G);
CREATE VERTEX(Graph_Name: G, Label: A, ID_Column: zz, Query: SELECT name FROM C);
)");
  RunConfig cfg;
  CHECK_THROWS_AS(extract(model, db, cfg), ValidationError);
}

TEST_CASE("graph files land on disk in both formats") {
  Database db = toy_retail_db();
  GraphModelDef model = parse_model(kRetailModel);
  RunConfig cfg;
  ExtractReport report = extract(model, db, cfg);

  auto dir = std::filesystem::temp_directory_path() / "relgraph_out_test";
  std::filesystem::remove_all(dir);
  write_graph(report.graph, dir.string(), OutputFormat::Csv);
  CHECK(std::filesystem::exists(dir / "vertices_Customer.csv"));
  CHECK(std::filesystem::exists(dir / "edges_CoPur.csv"));
  {
    std::ifstream in(dir / "vertices_Item.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,name,price");
  }

  write_graph(report.graph, dir.string(), OutputFormat::JsonLines);
  CHECK(std::filesystem::exists(dir / "edges_GetDisc.jsonl"));
  {
    std::ifstream in(dir / "edges_GetDisc.jsonl");
    std::string line;
    std::getline(in, line);
    CHECK(line.find("\"src\":1") != std::string::npos);
  }

  std::string metrics = metrics_json(report);
  CHECK(metrics.find("wall_millis") != std::string::npos);
  CHECK(metrics.find("join_builds") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("hybrid metrics expose shared work elimination") {
  Database db = generate_synthetic({8000, 200, 32000, 16000, 40, 0.5, 8192}, 23);
  GraphModelDef model = parse_model(workload_model_text());

  RunConfig cfg;
  cfg.mode = RunMode::Naive;
  ExtractReport naive = extract(model, db, cfg);
  cfg.mode = RunMode::Hybrid;
  ExtractReport hybrid = extract(model, db, cfg);

  std::string shared_sig = "I.i_no=SS.i_no";
  CHECK(naive.metrics.join_build_count(shared_sig) == 2);   // once in Sell, once in Buy
  CHECK(hybrid.metrics.join_build_count(shared_sig) == 1);  // merged unit builds it once
  CHECK(hybrid.metrics.views_materialized == 1);
  CHECK(naive.metrics.views_materialized == 0);
}
