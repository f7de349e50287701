#pragma once

#include <cstdint>
#include <string>

#include "relgraph/database.hpp"

namespace relgraph {

/// Scale parameters of the synthetic star schema: sales fact tables
/// SS and CS (store and catalog channels, both (c_id, i_no, p_no, s_id))
/// over dimensions C, I, P, S. Foreign keys cover every dimension key once
/// (when the fact is large enough) and follow a Zipf distribution beyond
/// that, so each column's distinct count is exactly min(sales, dimension).
struct SynthSpec {
  uint64_t sales = 10000;
  uint64_t customers = 500;
  uint64_t items = 200;
  uint64_t promos = 50;
  uint64_t stores = 20;
  double zipf_skew = 0.5;
  uint64_t page_size = 8192;
};

Database generate_synthetic(const SynthSpec& spec, uint64_t seed);

/// Order-sensitive checksum over every table, schema and row.
uint64_t database_checksum(const Database& db);

/// Writes each table as CSV plus a catalog.json describing them.
void write_database_csvs(const Database& db, const std::string& dir);

/// Graph model over the synthetic schema with customer/item vertices and the
/// discount + co-purchase edges (a cyclic and a chain query).
std::string demo_model_text();

/// Four-edge workload over the synthetic schema: Sell and Buy share one join,
/// CoPur and SamePro share another with two occurrences each.
std::string workload_model_text();

}  // namespace relgraph
