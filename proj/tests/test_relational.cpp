#include <random>
#include <sstream>

#include "doctest.h"
#include "relgraph/database.hpp"
#include "relgraph/exec.hpp"
#include "support/build.hpp"

using namespace relgraph;
using namespace relgraph::testing;

namespace {

Schema two_col_schema() { return Schema({{"name", ValueKind::Text}, {"qty", ValueKind::Int}}); }

Relation random_int_rel(std::mt19937_64& rng, size_t rows, size_t arity, int64_t domain, int null_pct = 10) {
  Relation rel;
  std::vector<Column> cols;
  for (size_t i = 0; i < arity; ++i) cols.push_back({"c" + std::to_string(i), ValueKind::Int});
  rel.schema = Schema(std::move(cols));
  for (size_t r = 0; r < rows; ++r) {
    Row row;
    for (size_t c = 0; c < arity; ++c)
      row.push_back(int(rng() % 100) < null_pct ? nv() : iv(int64_t(rng() % uint64_t(domain))));
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

// brute-force inner equi-join on a single key pair
Relation nested_loop_equi(const Relation& l, const Relation& r, size_t lc, size_t rc) {
  Relation out;
  std::vector<Column> cols = l.schema.columns();
  for (auto c : r.schema.columns()) {
    c.name = "r." + c.name;
    cols.push_back(c);
  }
  out.schema = Schema(std::move(cols));
  for (const auto& a : l.rows)
    for (const auto& b : r.rows)
      if (sql_eq(a[lc], b[rc])) {
        Row row = a;
        row.insert(row.end(), b.begin(), b.end());
        out.rows.push_back(std::move(row));
      }
  return out;
}

}  // namespace

TEST_CASE("load_table parses header and rows") {
  Database db;
  std::istringstream csv("name,qty\nape,1\nbee,2\ncat,3\n");
  const Relation& rel = db.load_table("t", csv, two_col_schema());
  CHECK(rel.rows.size() == 3);
  CHECK(db.stats("t").cardinality == 3);
  CHECK(db.stats("t").columns[0].distinct == 3);
}

TEST_CASE("load_table of a header-only file gives an empty table on one page") {
  Database db;
  std::istringstream csv("name,qty\n");
  db.load_table("t", csv, two_col_schema());
  CHECK(db.stats("t").cardinality == 0);
  CHECK(db.stats("t").page_count == 1);
}

TEST_CASE("load_table reports the offending line for a type violation") {
  Database db;
  std::istringstream csv("name,qty\nx,notanumber\n");
  try {
    db.load_table("t", csv, two_col_schema());
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("qty") != std::string::npos);
  }
}

TEST_CASE("load_table rejects duplicate names and bad headers") {
  Database db;
  std::istringstream a("name,qty\n"), b("name,qty\n"), c("wrong,qty\n");
  db.load_table("t", a, two_col_schema());
  CHECK_THROWS_AS(db.load_table("t", b, two_col_schema()), std::invalid_argument);
  CHECK_THROWS_AS(db.load_table("u", c, two_col_schema()), LoadError);
}

TEST_CASE("hash_inner_join keeps multiset semantics") {
  Relation r = int_rel({{1}, {2}}, 1);
  Relation s = int_rel({{2}, {2}, {3}}, 1);
  s.schema = Schema({{"d0", ValueKind::Int}});
  Relation out = hash_inner_join(r, s, {{"c0", "d0"}});
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0] == Row{iv(2), iv(2)});
  CHECK(out.rows[1] == Row{iv(2), iv(2)});
}

TEST_CASE("join with an empty side is empty") {
  Relation r = int_rel({{1}, {2}}, 1);
  Relation empty = int_rel({}, 1);
  empty.schema = Schema({{"d0", ValueKind::Int}});
  CHECK(hash_inner_join(r, empty, {{"c0", "d0"}}).rows.empty());
}

TEST_CASE("hash join equals the nested-loop oracle on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Relation l = random_int_rel(rng, 20, 2, 4);
    Relation r = random_int_rel(rng, 20, 2, 4);
    Relation rr = r;
    {
      std::vector<Column> cols;
      for (auto c : r.schema.columns()) cols.push_back({"r." + c.name, c.kind});
      rr.schema = Schema(cols);
    }
    Relation got = hash_inner_join(l, rr, {{"c0", "r.c0"}});
    Relation want = nested_loop_equi(l, r, 0, 0);
    CHECK(same_multiset(got, want));
    CHECK(got.rows.size() <= l.rows.size() * r.rows.size());
  }
}

TEST_CASE("left outer join pads unmatched rows with nulls") {
  Relation r = int_rel({{1}, {2}}, 1);
  Relation s = int_rel({{2}}, 1);
  s.schema = Schema({{"d0", ValueKind::Int}});
  Relation out = hash_left_outer_join(r, s, {{"c0", "d0"}});
  REQUIRE(out.rows.size() == 2);
  CHECK(out.rows[0] == Row{iv(1), nv()});
  CHECK(out.rows[1] == Row{iv(2), iv(2)});

  Relation empty = int_rel({}, 1);
  empty.schema = Schema({{"d0", ValueKind::Int}});
  Relation padded = hash_left_outer_join(r, empty, {{"c0", "d0"}});
  CHECK(padded.rows.size() == 2);
  CHECK(padded.rows[0][1].is_null());
}

TEST_CASE("outer join decomposes into inner matches plus anti-join padding") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    Relation l = random_int_rel(rng, 25, 2, 4);
    Relation r = random_int_rel(rng, 25, 2, 4);
    Relation rr = r;
    {
      std::vector<Column> cols;
      for (auto c : r.schema.columns()) cols.push_back({"r." + c.name, c.kind});
      rr.schema = Schema(cols);
    }
    Relation outer = hash_left_outer_join(l, rr, {{"c0", "r.c0"}});

    // a matched row always carries a non-null join key, so "all right columns
    // null" identifies exactly the padded rows
    Relation inner_part{outer.schema, {}};
    Relation padded_part{outer.schema, {}};
    size_t key_col = l.schema.size();
    for (const auto& row : outer.rows)
      (row[key_col].is_null() ? padded_part : inner_part).rows.push_back(row);

    Relation inner_oracle = nested_loop_equi(l, r, 0, 0);
    std::vector<Row> anti;
    for (const auto& a : l.rows) {
      bool matched = false;
      for (const auto& b : r.rows) matched = matched || sql_eq(a[0], b[0]);
      if (!matched) {
        Row row = a;
        for (size_t c = 0; c < r.schema.size(); ++c) row.push_back(nv());
        anti.push_back(std::move(row));
      }
    }
    Relation anti_rel{outer.schema, anti};

    CHECK(outer.rows.size() >= l.rows.size());
    CHECK(same_multiset(inner_part, inner_oracle));
    CHECK(same_multiset(padded_part, anti_rel));
  }
}

TEST_CASE("select applies null-rejecting conjunctions") {
  Relation r = int_rel({{5}, {6}}, 1);
  Relation out = select(r, {{Term::col("c0"), CmpOp::Eq, Term::lit(iv(5))}});
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0][0] == iv(5));

  Relation with_null = int_rel({{std::nullopt}}, 1);
  CHECK(select(with_null, {{Term::col("c0"), CmpOp::Eq, Term::col("c0")}}).rows.empty());
}

TEST_CASE("select matches a row-scan oracle on random instances") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Relation r = random_int_rel(rng, 40, 3, 6);
    std::vector<Comparison> conj{{Term::col("c0"), CmpOp::Le, Term::col("c1")},
                                 {Term::col("c2"), CmpOp::Ne, Term::lit(iv(3))}};
    Relation got = select(r, conj);
    size_t expect = 0;
    for (const auto& row : r.rows)
      if (sql_le(row[0], row[1]) && sql_compare(row[2], iv(3), 1, 0, 1)) ++expect;
    CHECK(got.rows.size() == expect);
  }
}

TEST_CASE("project reorders, subsets and dedups") {
  Relation r;
  r.schema = Schema({{"a", ValueKind::Int}, {"b", ValueKind::Text}});
  r.rows = {{iv(1), tv("x")}, {iv(1), tv("y")}};
  Relation dedup = project(r, {"a"}, true);
  CHECK(dedup.rows.size() == 1);
  Relation keep = project(r, {"a", "b"}, false);
  CHECK(same_multiset(keep, r));
  Relation swapped = project(r, {"b", "a"}, false);
  CHECK(swapped.schema.at(0).name == "b");
  CHECK_THROWS_AS(project(r, {"zz"}, false), std::out_of_range);
}

TEST_CASE("join is commutative up to column permutation") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    Relation l = random_int_rel(rng, 15, 2, 4);
    Relation r = random_int_rel(rng, 15, 2, 4);
    Relation lq = l, rq = r;
    lq.schema = Schema({{"l.c0", ValueKind::Int}, {"l.c1", ValueKind::Int}});
    rq.schema = Schema({{"r.c0", ValueKind::Int}, {"r.c1", ValueKind::Int}});
    Relation ab = hash_inner_join(lq, rq, {{"l.c0", "r.c0"}});
    Relation ba = hash_inner_join(rq, lq, {{"r.c0", "l.c0"}});
    Relation ba_perm = project(ba, {"l.c0", "l.c1", "r.c0", "r.c1"}, false);
    CHECK(same_multiset(ab, ba_perm));
  }
}

TEST_CASE("materialize registers a queryable view with fresh stats") {
  Database db;
  Relation r = int_rel({{1}, {2}, {3}}, 1);
  uint64_t bytes = 0;
  const TableStats& stats = db.materialize("v", r, &bytes);
  CHECK(stats.cardinality == 3);
  CHECK(bytes == r.serialized_bytes());
  CHECK(db.is_view("v"));
  CHECK(same_multiset(db.table("v"), r));
  CHECK_THROWS_AS(db.materialize("v", r), std::invalid_argument);

  Relation empty = int_rel({}, 1);
  db.materialize("v0", empty);
  CHECK(db.stats("v0").cardinality == 0);
  CHECK(db.stats("v0").page_count == 1);
}

TEST_CASE("page count equals ceil(serialized bytes / page size)") {
  Database db(8192);
  Relation wide;
  wide.schema = Schema({{"a", ValueKind::Int}, {"b", ValueKind::Text}});
  for (int i = 0; i < 10000; ++i) wide.rows.push_back({iv(i), tv("row" + std::to_string(i))});
  db.materialize("v", wide);

  // independent byte accounting: 8 per int, length+4 per text
  uint64_t bytes = 0;
  for (int i = 0; i < 10000; ++i) bytes += 8 + ("row" + std::to_string(i)).size() + 4;
  CHECK(db.stats("v").total_bytes == bytes);
  CHECK(db.stats("v").page_count == (bytes + 8191) / 8192);
}

TEST_CASE("null join keys never match") {
  Relation l = int_rel({{std::nullopt}, {1}}, 1);
  Relation r = int_rel({{std::nullopt}, {1}}, 1);
  r.schema = Schema({{"d0", ValueKind::Int}});
  Relation out = hash_inner_join(l, r, {{"c0", "d0"}});
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0][0] == iv(1));
}

TEST_CASE("join key kind mismatch is rejected") {
  Relation l = int_rel({{1}}, 1);
  Relation r;
  r.schema = Schema({{"d0", ValueKind::Text}});
  r.rows = {{tv("1")}};
  CHECK_THROWS_AS(hash_inner_join(l, r, {{"c0", "d0"}}), std::invalid_argument);
}

TEST_CASE("null sorts first and custom delimiters load") {
  std::vector<Value> vals{iv(3), nv(), iv(-1), tv("z")};
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0].is_null());
  CHECK(vals[1] == iv(-1));

  Database db;
  std::istringstream csv("name;qty\nape;1\n");
  CsvOptions opts;
  opts.delimiter = ';';
  const Relation& rel = db.load_table("t", csv, two_col_schema(), opts);
  CHECK(rel.rows.size() == 1);
  CHECK(rel.rows[0][0] == tv("ape"));
}
