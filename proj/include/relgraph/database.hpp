#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "relgraph/relation.hpp"
#include "relgraph/stats.hpp"

namespace relgraph {

struct CsvOptions {
  char delimiter = ',';
};

/// Raised for malformed input files; carries a 1-based line number.
struct LoadError : std::runtime_error {
  LoadError(std::string msg, size_t line_arg)
      : std::runtime_error(std::move(msg)), line(line_arg) {}
  size_t line = 0;
};

/// Named, immutable tables plus their statistics. Loading and materializing
/// mutate the catalog map only; relations themselves never change, so
/// readers can share a Database copy freely (copies share relation storage).
class Database {
 public:
  explicit Database(uint64_t page_size = 8192) : page_size_(page_size) {}

  uint64_t page_size() const { return page_size_; }

  /// Parses delimited text (first row = column names, which must match the
  /// declared schema) and registers the table. Returns the loaded relation.
  const Relation& load_table(const std::string& name, std::istream& source, const Schema& schema,
                             const CsvOptions& opts = {});

  /// Registers an already-built relation as a base table.
  const Relation& put_table(const std::string& name, Relation rel);

  /// Registers a relation as a view table with fresh stats and reports the
  /// byte volume written, so materialization cost is observable.
  const TableStats& materialize(const std::string& view_name, Relation rel, uint64_t* bytes_written = nullptr);

  bool has_table(const std::string& name) const { return tables_.count(name) > 0; }
  bool is_view(const std::string& name) const;
  const Relation& table(const std::string& name) const;
  RelationPtr table_ptr(const std::string& name) const;
  const TableStats& stats(const std::string& name) const;
  std::vector<std::string> table_names() const;

 private:
  struct Entry {
    RelationPtr rel;
    TableStats stats;
    bool view = false;
  };

  const Entry& entry(const std::string& name) const;

  uint64_t page_size_;
  std::map<std::string, Entry> tables_;
};

/// One line of a delimited file split into fields (handles double-quoted
/// fields with "" escapes).
std::vector<std::string> split_delimited(const std::string& line, char delimiter);

std::string csv_escape(const std::string& field, char delimiter);

/// Loads a catalog description (JSON: tables with columns and csv paths)
/// and every table it names. Paths are resolved relative to the catalog file.
Database load_catalog(const std::string& catalog_path);

}  // namespace relgraph
