#include <random>
#include <set>

#include "doctest.h"
#include "relgraph/merge.hpp"
#include "support/build.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace relgraph;
using namespace relgraph::testing;

namespace {

// the two fraud-scenario queries: stores and customers hanging off sales-item
Database fig_store_db() {
  Database db;
  Relation ss;
  ss.schema = Schema({{"c_id", ValueKind::Int}, {"i_no", ValueKind::Int}, {"s_id", ValueKind::Int}});
  ss.rows = {{iv(1), iv(10), iv(100)},
             {iv(1), iv(11), iv(100)},
             {iv(2), iv(10), iv(101)},
             {iv(2), iv(12), iv(101)},  // item 12 has no I row: filtered by the shared join
             {iv(3), iv(11), iv(102)}}; // store 102 and customer 3 have no dimension row
  Relation i;
  i.schema = Schema({{"i_no", ValueKind::Int}, {"price", ValueKind::Float}});
  i.rows = {{iv(10), fv(1.0)}, {iv(11), fv(2.0)}, {iv(13), fv(3.0)}};
  Relation s;
  s.schema = Schema({{"s_id", ValueKind::Int}, {"sname", ValueKind::Text}});
  s.rows = {{iv(100), tv("north")}, {iv(101), tv("south")}};
  Relation c;
  c.schema = Schema({{"c_id", ValueKind::Int}, {"cname", ValueKind::Text}});
  c.rows = {{iv(1), tv("ann")}, {iv(2), tv("bob")}};
  db.put_table("SS", std::move(ss));
  db.put_table("I", std::move(i));
  db.put_table("S", std::move(s));
  db.put_table("C", std::move(c));
  return db;
}

ExecutableQuery sell_query(const Database& db) {
  return make_query("Sell", "SELECT null FROM SS, I, S WHERE SS.i_no=I.i_no AND SS.s_id=S.s_id", {}, db);
}

ExecutableQuery buy_query(const Database& db) {
  return make_query("Buy", "SELECT null FROM SS, I, C WHERE SS.i_no=I.i_no AND SS.c_id=C.c_id", {}, db);
}

}  // namespace

TEST_CASE("merging the fraud pair keeps the sales-item join inner and hangs stores and customers outer") {
  Database db = fig_store_db();
  StatsProvider stats(db);
  CostParams params;
  MergedUnit unit = merge_pair(sell_query(db), buy_query(db), stats, params);

  CHECK(pattern_bases(unit.decomposition.shared.pattern) == std::vector<std::string>{"I", "SS"});
  CHECK(unit.merged.vertices.size() == 4);
  REQUIRE(unit.merged.edges.size() == 3);

  std::set<std::string> shared_aliases;
  for (const auto& v : unit.shared.vertices) shared_aliases.insert(v.alias);

  size_t inner = 0, outer = 0;
  for (const auto& e : unit.merged.edges) {
    if (e.type == JoinType::Inner) {
      ++inner;
      continue;
    }
    ++outer;
    // the preserved side of every outer edge is the sales table inside the
    // shared subgraph
    bool u_shared = shared_aliases.count(unit.merged.vertices[e.u].alias) > 0;
    bool v_shared = shared_aliases.count(unit.merged.vertices[e.v].alias) > 0;
    CHECK(u_shared != v_shared);
    CHECK(unit.merged.vertices[u_shared ? e.u : e.v].base == "SS");
  }
  CHECK(inner == 1);
  CHECK(outer == 2);
  CHECK(unit.subqueries.size() == 2);
  for (const auto& sub : unit.subqueries) CHECK(sub.graph.vertices.size() == 1);
}

TEST_CASE("merged execution reproduces both original results on the constructed instance") {
  Database db = fig_store_db();
  StatsProvider stats(db);
  CostParams params;
  auto sell = sell_query(db);
  auto buy = buy_query(db);
  MergedUnit unit = merge_pair(sell, buy, stats, params);

  auto results = execute_merged(unit, db, params);
  Relation want_sell = oracle_execute(sell, db);
  Relation want_buy = oracle_execute(buy, db);
  CHECK(same_multiset(results[0], want_sell));
  CHECK(same_multiset(results[1], want_buy));
  CHECK(results[0].rows.size() == 3);  // sales rows with both item and store dimension rows
  CHECK(results[1].rows.size() == 3);
}

TEST_CASE("an empty branch empties its own origin only") {
  Database db = fig_store_db();
  StatsProvider stats(db);
  CostParams params;
  auto sell = sell_query(db);
  auto buy = buy_query(db);

  // drop every store: Sell must come back empty, Buy untouched
  Database no_stores;
  no_stores.put_table("SS", Relation(db.table("SS")));
  no_stores.put_table("I", Relation(db.table("I")));
  no_stores.put_table("C", Relation(db.table("C")));
  Relation s;
  s.schema = db.table("S").schema;
  no_stores.put_table("S", std::move(s));

  MergedUnit unit = merge_pair(sell, buy, stats, params);
  auto results = execute_merged(unit, no_stores, params);
  CHECK(results[0].rows.empty());
  CHECK(same_multiset(results[1], oracle_execute(buy, no_stores)));
}

TEST_CASE("degenerate merge of identical queries has no outer edges") {
  Database db = fig_store_db();
  StatsProvider stats(db);
  CostParams params;
  auto q1 = make_query("a", "SELECT null FROM SS, I WHERE SS.i_no=I.i_no", {}, db);
  auto q2 = make_query("b", "SELECT null FROM SS x, I y WHERE x.i_no=y.i_no", {}, db);
  MergedUnit unit = merge_pair(q1, q2, stats, params);
  CHECK(unit.subqueries.empty());
  for (const auto& e : unit.merged.edges) CHECK(e.type == JoinType::Inner);

  auto results = execute_merged(unit, db, params);
  CHECK(same_multiset(results[0], oracle_execute(q1, db)));
  CHECK(same_multiset(results[1], oracle_execute(q2, db)));
}

TEST_CASE("every decomposition of random shared pairs executes losslessly") {
  CaseGenerator gen(42);
  size_t checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    SharedPairCase c = gen.shared_pair();
    Relation want1 = oracle_execute(c.q1, c.db);
    Relation want2 = oracle_execute(c.q2, c.db);

    StatsProvider stats(c.db);
    CostParams params;
    auto search = enumerate_decompositions(c.q1.graph, c.q2.graph);
    size_t limit = 0;
    for (const auto& d : search.decompositions) {
      if (++limit > 6) break;  // bound the per-case work; variety comes from trials
      MergedUnit unit = build_merged_unit(c.q1, c.q2, d);
      auto results = execute_merged(unit, c.db, params);
      CHECK(same_multiset(results[0], want1));
      CHECK(same_multiset(results[1], want2));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("the wide outer relation contains each origin as a set projection") {
  CaseGenerator gen(43, 0);  // null padding is the match marker here
  for (int trial = 0; trial < 15; ++trial) {
    SharedPairCase c = gen.shared_pair();
    StatsProvider stats(c.db);
    CostParams params;
    MergedUnit unit = merge_pair(c.q1, c.q2, stats, params);
    Relation wide = merged_outer_relation(unit, c.db, params);

    for (int origin = 0; origin < 2; ++origin) {
      // branch columns of this origin; a row with every one of them non-null
      // corresponds to a full match of this origin's branches
      std::vector<size_t> branch_cols;
      for (size_t b = 0; b < unit.subqueries.size(); ++b) {
        if (unit.subqueries[b].origin != origin) continue;
        for (const auto& col : unit.subqueries[b].output_columns)
          branch_cols.push_back(wide.schema.index_of(col));
      }
      std::vector<std::string> out_cols;
      for (const auto& [merged_col, origin_col] : unit.origins[origin].outputs) out_cols.push_back(merged_col);

      Relation filtered{wide.schema, {}};
      for (const auto& row : wide.rows) {
        bool full = true;
        for (size_t ci : branch_cols) full = full && !row[ci].is_null();
        if (full) filtered.rows.push_back(row);
      }
      Relation projected = project(filtered, out_cols, true);

      const ExecutableQuery& q = origin == 0 ? c.q1 : c.q2;
      Relation direct = oracle_execute(q, c.db);
      Relation direct_set{direct.schema, direct.sorted_rows()};
      direct_set.rows.erase(std::unique(direct_set.rows.begin(), direct_set.rows.end()), direct_set.rows.end());
      CHECK(projected.rows == direct_set.rows);
    }
  }
}

TEST_CASE("one origin's output ignores changes to the other origin's tables") {
  Database db = fig_store_db();
  StatsProvider stats(db);
  CostParams params;
  auto sell = sell_query(db);
  auto buy = buy_query(db);
  MergedUnit unit = merge_pair(sell, buy, stats, params);
  auto before = execute_merged(unit, db, params);

  // double every customer row and add a stranger; Sell's branch tables are untouched
  Database mutated;
  mutated.put_table("SS", Relation(db.table("SS")));
  mutated.put_table("I", Relation(db.table("I")));
  mutated.put_table("S", Relation(db.table("S")));
  Relation c2 = db.table("C");
  c2.rows.push_back({iv(2), tv("bob-again")});
  c2.rows.push_back({iv(9), tv("zed")});
  mutated.put_table("C", std::move(c2));

  auto after = execute_merged(unit, mutated, params);
  CHECK(same_multiset(before[0], after[0]));
  CHECK(!same_multiset(before[1], after[1]));  // Buy legitimately changed
}

TEST_CASE("outer-marked edges always touch the shared subgraph") {
  CaseGenerator gen(44);
  for (int trial = 0; trial < 20; ++trial) {
    SharedPairCase c = gen.shared_pair();
    StatsProvider stats(c.db);
    CostParams params;
    MergedUnit unit = merge_pair(c.q1, c.q2, stats, params);
    std::set<std::string> shared_aliases;
    for (const auto& v : unit.shared.vertices) shared_aliases.insert(v.alias);
    for (const auto& e : unit.merged.edges) {
      bool u_shared = shared_aliases.count(unit.merged.vertices[e.u].alias) > 0;
      bool v_shared = shared_aliases.count(unit.merged.vertices[e.v].alias) > 0;
      if (e.type == JoinType::Outer) CHECK(u_shared != v_shared);
      if (u_shared && v_shared) CHECK(e.type == JoinType::Inner);
    }
  }
}

TEST_CASE("plain execution equals the oracle, including inequality-only joins") {
  CaseGenerator gen(46);
  CostParams params;
  for (int trial = 0; trial < 30; ++trial) {
    SharedPairCase c = gen.shared_pair();
    CHECK(same_multiset(run_query(c.q1, c.db, params), oracle_execute(c.q1, c.db)));
    CHECK(same_multiset(run_query(c.q2, c.db, params), oracle_execute(c.q2, c.db)));
  }

  // a join whose only condition is an inequality takes the nested-loop path
  Database db;
  Relation t;
  t.schema = Schema({{"x", ValueKind::Int}});
  t.rows = {{Value::of_int(1)}, {Value::of_int(2)}, {Value::of_int(3)}};
  db.put_table("T", Relation(t));
  db.put_table("U", Relation(t));
  auto q = make_query("lt", "SELECT null FROM T, U WHERE T.x<U.x", {}, db);
  ExecContext ctx;
  Relation got = run_query(q, db, params, &ctx);
  CHECK(ctx.metrics.nested_loop_steps == 1);
  CHECK(ctx.metrics.hash_join_steps == 0);
  CHECK(same_multiset(got, oracle_execute(q, db)));
  CHECK(got.rows.size() == 3);  // (1,2) (1,3) (2,3)
}

TEST_CASE("the worked decomposition example merges into the two expected shapes") {
  // first query: B1 carries A, C and D; B2 hangs off D; second query: B-D-E
  Database db;
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    Relation t;
    t.schema = Schema({{"a", ValueKind::Int},
                       {"c", ValueKind::Int},
                       {"k", ValueKind::Int},
                       {"e", ValueKind::Int}});
    for (int r = 0; r < 6; ++r)
      t.rows.push_back({Value::of_int(r % 2), Value::of_int(r % 3), Value::of_int(r % 2), Value::of_int(r % 3)});
    db.put_table(name, std::move(t));
  }
  auto q1 = make_query("q1",
                       "SELECT null FROM A, B B1, C, D, B B2 "
                       "WHERE A.a=B1.a AND B1.c=C.c AND B1.k=D.k AND B2.k=D.k",
                       {}, db);
  auto q2 = make_query("q2", "SELECT null FROM B, D, E WHERE B.k=D.k AND D.e=E.e", {}, db);

  auto search = enumerate_decompositions(q1.graph, q2.graph);
  REQUIRE(search.decompositions.size() == 2);

  bool saw_three_branches = false, saw_one_branch = false;
  for (const auto& d : search.decompositions) {
    MergedUnit unit = build_merged_unit(q1, q2, d);
    CHECK(unit.merged.vertices.size() == 6);
    CHECK(unit.merged.edges.size() == 5);
    size_t outer = 0;
    for (const auto& e : unit.merged.edges)
      if (e.type == JoinType::Outer) ++outer;

    if (d.parts1.size() == 3) {
      // shared B1-D: branches A, C, B2 on the first side plus E on the second
      saw_three_branches = true;
      CHECK(outer == 4);
      CHECK(unit.subqueries.size() == 4);
    } else {
      // shared B2-D: one three-vertex branch attached by a single outer edge
      saw_one_branch = true;
      CHECK(outer == 2);
      REQUIRE(unit.subqueries.size() == 2);
      size_t sizes[2] = {unit.subqueries[0].graph.vertices.size(), unit.subqueries[1].graph.vertices.size()};
      CHECK(std::max(sizes[0], sizes[1]) == 3);
      CHECK(std::min(sizes[0], sizes[1]) == 1);
    }

    // and both merged shapes execute losslessly
    auto results = execute_merged(unit, db, CostParams{});
    CHECK(same_multiset(results[0], oracle_execute(q1, db)));
    CHECK(same_multiset(results[1], oracle_execute(q2, db)));
  }
  CHECK(saw_three_branches);
  CHECK(saw_one_branch);
}
