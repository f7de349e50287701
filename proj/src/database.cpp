#include "relgraph/database.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace relgraph {

std::vector<std::string> split_delimited(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // tolerate CRLF
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& field, char delimiter) {
  bool needs = field.find(delimiter) != std::string::npos || field.find('"') != std::string::npos ||
               field.find('\n') != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

const Relation& Database::load_table(const std::string& name, std::istream& source, const Schema& schema,
                                     const CsvOptions& opts) {
  if (tables_.count(name)) throw std::invalid_argument("table already exists: " + name);

  std::string line;
  if (!std::getline(source, line)) throw LoadError("missing header row", 1);
  auto header = split_delimited(line, opts.delimiter);
  if (header.size() != schema.size()) throw LoadError("header has " + std::to_string(header.size()) +
                                                      " columns, schema declares " + std::to_string(schema.size()), 1);
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] != schema.at(i).name)
      throw LoadError("header column " + std::to_string(i + 1) + " is '" + header[i] + "', expected '" +
                      schema.at(i).name + "'", 1);

  Relation rel;
  rel.schema = schema;
  size_t lineno = 1;
  while (std::getline(source, line)) {
    ++lineno;
    if (line.empty() && source.eof()) break;
    auto fields = split_delimited(line, opts.delimiter);
    if (fields.size() != schema.size())
      throw LoadError("row has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(schema.size()), lineno);
    Row row;
    row.reserve(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      try {
        row.push_back(parse_value(fields[i], schema.at(i).kind));
      } catch (const std::invalid_argument& e) {
        throw LoadError(std::string(e.what()) + " in column '" + schema.at(i).name + "'", lineno);
      }
    }
    rel.rows.push_back(std::move(row));
  }
  return put_table(name, std::move(rel));
}

const Relation& Database::put_table(const std::string& name, Relation rel) {
  if (tables_.count(name)) throw std::invalid_argument("table already exists: " + name);
  Entry e;
  e.stats = compute_stats(rel, page_size_);
  e.rel = std::make_shared<Relation>(std::move(rel));
  auto [it, ok] = tables_.emplace(name, std::move(e));
  (void)ok;
  return *it->second.rel;
}

const TableStats& Database::materialize(const std::string& view_name, Relation rel, uint64_t* bytes_written) {
  if (tables_.count(view_name)) throw std::invalid_argument("name collision: " + view_name);
  Entry e;
  e.stats = compute_stats(rel, page_size_);
  e.view = true;
  e.rel = std::make_shared<Relation>(std::move(rel));
  if (bytes_written) *bytes_written = e.stats.total_bytes;
  auto [it, ok] = tables_.emplace(view_name, std::move(e));
  (void)ok;
  return it->second.stats;
}

const Database::Entry& Database::entry(const std::string& name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw std::out_of_range("unknown table: " + name);
  return it->second;
}

bool Database::is_view(const std::string& name) const { return entry(name).view; }
const Relation& Database::table(const std::string& name) const { return *entry(name).rel; }
RelationPtr Database::table_ptr(const std::string& name) const { return entry(name).rel; }
const TableStats& Database::stats(const std::string& name) const { return entry(name).stats; }

std::vector<std::string> Database::table_names() const {
  std::vector<std::string> out;
  out.reserve(tables_.size());
  for (const auto& [k, v] : tables_) out.push_back(k);
  return out;
}

Database load_catalog(const std::string& catalog_path) {
  std::ifstream in(catalog_path);
  if (!in) throw std::runtime_error("cannot open catalog: " + catalog_path);
  nlohmann::json doc = nlohmann::json::parse(in);

  Database db(doc.value("page_size", 8192));
  auto dir = std::filesystem::path(catalog_path).parent_path();
  for (const auto& t : doc.at("tables")) {
    std::vector<Column> cols;
    for (const auto& c : t.at("columns"))
      cols.push_back({c.at("name").get<std::string>(), kind_from_name(c.at("kind").get<std::string>())});
    std::string csv = t.at("csv").get<std::string>();
    auto path = std::filesystem::path(csv).is_absolute() ? std::filesystem::path(csv) : dir / csv;
    std::ifstream data(path);
    if (!data) throw std::runtime_error("cannot open table file: " + path.string());
    CsvOptions opts;
    if (t.contains("delimiter")) opts.delimiter = t.at("delimiter").get<std::string>().at(0);
    try {
      db.load_table(t.at("name").get<std::string>(), data, Schema(std::move(cols)), opts);
    } catch (const LoadError& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(e.line) + ": " + e.what());
    }
  }
  return db;
}

}  // namespace relgraph
