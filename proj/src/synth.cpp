#include "relgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "json.hpp"

namespace relgraph {

namespace {

// Bounded draw via modulo keeps output identical across platforms; the bias
// is irrelevant at these ranges.
uint64_t draw(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

double draw_unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

struct ZipfSampler {
  std::vector<double> cumulative;

  ZipfSampler(uint64_t n, double skew) {
    cumulative.resize(n);
    double total = 0;
    for (uint64_t k = 1; k <= n; ++k) {
      total += 1.0 / std::pow(double(k), skew);
      cumulative[k - 1] = total;
    }
    for (auto& c : cumulative) c /= total;
  }

  uint64_t sample(std::mt19937_64& rng) const {
    double u = draw_unit(rng);
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    return uint64_t(it - cumulative.begin()) + 1;  // 1-based key
  }
};

// Foreign-key column: each dimension key appears once while coverage lasts,
// Zipf-distributed duplicates after that, then a shuffle mixes the skew in.
std::vector<int64_t> fk_column(uint64_t rows, uint64_t dim, double skew, std::mt19937_64& rng) {
  std::vector<int64_t> out;
  out.reserve(rows);
  uint64_t covered = std::min(rows, dim);
  for (uint64_t i = 0; i < covered; ++i) out.push_back(int64_t(i + 1));
  if (rows > covered) {
    ZipfSampler zipf(dim, skew);
    for (uint64_t i = covered; i < rows; ++i) out.push_back(int64_t(zipf.sample(rng)));
  }
  for (uint64_t i = rows; i > 1; --i) std::swap(out[i - 1], out[draw(rng, i)]);
  return out;
}

Relation dimension(const std::string& id_column, const std::string& prefix, uint64_t n, bool with_price) {
  Relation rel;
  std::vector<Column> cols{{id_column, ValueKind::Int}, {"name", ValueKind::Text}};
  if (with_price) cols.push_back({"price", ValueKind::Float});
  rel.schema = Schema(std::move(cols));
  for (uint64_t i = 1; i <= n; ++i) {
    Row row{Value::of_int(int64_t(i)), Value::of_text(prefix + std::to_string(i))};
    if (with_price) row.push_back(Value::of_float(double(i % 9000) / 100.0 + 0.99));
    rel.rows.push_back(std::move(row));
  }
  return rel;
}

}  // namespace

Database generate_synthetic(const SynthSpec& spec, uint64_t seed) {
  if (spec.customers == 0 || spec.items == 0 || spec.promos == 0 || spec.stores == 0)
    throw std::invalid_argument("dimension sizes must be positive");
  if (spec.zipf_skew < 0) throw std::invalid_argument("zipf skew must be non-negative");

  Database db(spec.page_size);
  std::mt19937_64 rng(seed);

  db.put_table("C", dimension("c_id", "c", spec.customers, false));
  db.put_table("I", dimension("i_no", "i", spec.items, true));
  {
    Relation p;
    p.schema = Schema({{"p_no", ValueKind::Int}, {"i_no", ValueKind::Int}});
    auto promoted = fk_column(spec.promos, spec.items, spec.zipf_skew, rng);
    for (uint64_t k = 1; k <= spec.promos; ++k)
      p.rows.push_back({Value::of_int(int64_t(k)), Value::of_int(promoted[k - 1])});
    db.put_table("P", std::move(p));
  }
  db.put_table("S", dimension("s_id", "s", spec.stores, false));
  auto fact_table = [&](uint64_t rows) {
    Relation fact;
    fact.schema = Schema({{"c_id", ValueKind::Int},
                          {"i_no", ValueKind::Int},
                          {"p_no", ValueKind::Int},
                          {"s_id", ValueKind::Int}});
    auto c_col = fk_column(rows, spec.customers, spec.zipf_skew, rng);
    auto i_col = fk_column(rows, spec.items, spec.zipf_skew, rng);
    auto p_col = fk_column(rows, spec.promos, spec.zipf_skew, rng);
    auto s_col = fk_column(rows, spec.stores, spec.zipf_skew, rng);
    fact.rows.reserve(rows);
    for (uint64_t r = 0; r < rows; ++r)
      fact.rows.push_back({Value::of_int(c_col[r]), Value::of_int(i_col[r]), Value::of_int(p_col[r]),
                           Value::of_int(s_col[r])});
    return fact;
  };
  db.put_table("SS", fact_table(spec.sales));   // store channel
  db.put_table("CS", fact_table(spec.sales));   // catalog channel
  return db;
}

uint64_t database_checksum(const Database& db) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '\x1f';
    h *= 1099511628211ull;
  };
  for (const auto& name : db.table_names()) {
    mix(name);
    const Relation& rel = db.table(name);
    for (const auto& c : rel.schema.columns()) {
      mix(c.name);
      mix(kind_name(c.kind));
    }
    for (const auto& row : rel.rows)
      for (const auto& v : row) mix(v.to_string());
  }
  return h;
}

void write_database_csvs(const Database& db, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto base = std::filesystem::path(dir);

  nlohmann::json catalog;
  catalog["page_size"] = db.page_size();
  catalog["tables"] = nlohmann::json::array();

  for (const auto& name : db.table_names()) {
    const Relation& rel = db.table(name);
    std::string file = name + ".csv";
    std::ofstream out(base / file);
    const auto& cols = rel.schema.columns();
    for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_escape(cols[i].name, ',');
    out << "\n";
    for (const auto& row : rel.rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i].to_string(), ',');
      out << "\n";
    }

    nlohmann::json t;
    t["name"] = name;
    t["csv"] = file;
    t["columns"] = nlohmann::json::array();
    for (const auto& c : cols) t["columns"].push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
    catalog["tables"].push_back(std::move(t));
  }
  std::ofstream cat(base / "catalog.json");
  cat << catalog.dump(2) << "\n";
}

std::string demo_model_text() {
  return R"(CREATE GRAPH(Graph_Name: RetailG);
CREATE VERTEX(Graph_Name: RetailG, Label: Customer, ID_Column: c_id, Query: SELECT name FROM C);
CREATE VERTEX(Graph_Name: RetailG, Label: Item, ID_Column: i_no, Query: SELECT name, price FROM I);
CREATE EDGE(Graph_Name: RetailG, Label: GetDisc, Src_Label: Customer, Dst_Label: Item,
  Query: SELECT null FROM C, SS, P, I
  WHERE C.c_id=SS.c_id AND I.i_no=SS.i_no AND P.p_no=SS.p_no AND I.i_no=P.i_no);
CREATE EDGE(Graph_Name: RetailG, Label: CoPur, Src_Label: Customer, Dst_Label: Customer,
  Query: SELECT null FROM C1, SS1, I, SS2, C2
  WHERE C1.c_id=SS1.c_id AND I.i_no=SS1.i_no AND C2.c_id=SS2.c_id AND I.i_no=SS2.i_no);
)";
}

// Sell/Buy read the store channel, CoPur/SamePro the catalog channel, so the
// two pairs share joins within themselves but not across scenarios.
std::string workload_model_text() {
  return R"(CREATE GRAPH(Graph_Name: RetailW);
CREATE VERTEX(Graph_Name: RetailW, Label: Customer, ID_Column: c_id, Query: SELECT name FROM C);
CREATE VERTEX(Graph_Name: RetailW, Label: Item, ID_Column: i_no, Query: SELECT name, price FROM I);
CREATE VERTEX(Graph_Name: RetailW, Label: Store, ID_Column: s_id, Query: SELECT name FROM S);
CREATE EDGE(Graph_Name: RetailW, Label: Sell, Src_Label: Store, Dst_Label: Item,
  Query: SELECT null FROM SS, I, S WHERE SS.i_no=I.i_no AND SS.s_id=S.s_id);
CREATE EDGE(Graph_Name: RetailW, Label: Buy, Src_Label: Customer, Dst_Label: Item,
  Query: SELECT null FROM SS, I, C WHERE SS.i_no=I.i_no AND SS.c_id=C.c_id);
CREATE EDGE(Graph_Name: RetailW, Label: CoPur, Src_Label: Customer, Dst_Label: Customer,
  Query: SELECT null FROM C1, CS1, I, CS2, C2
  WHERE C1.c_id=CS1.c_id AND I.i_no=CS1.i_no AND C2.c_id=CS2.c_id AND I.i_no=CS2.i_no);
CREATE EDGE(Graph_Name: RetailW, Label: SamePro, Src_Label: Customer, Dst_Label: Customer,
  Query: SELECT null FROM C1, CS1, P, CS2, C2
  WHERE C1.c_id=CS1.c_id AND P.p_no=CS1.p_no AND C2.c_id=CS2.c_id AND P.p_no=CS2.p_no);
)";
}

}  // namespace relgraph
