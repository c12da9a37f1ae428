#include "spinpair/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spinpair {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Report::put(const std::string& key, double value) {
  kv_.emplace_back(key, format_number(value));
}

void Report::put_text(const std::string& key, const std::string& value) {
  kv_.emplace_back(key, value);
}

void Report::put_int(const std::string& key, long long value) {
  kv_.emplace_back(key, std::to_string(value));
}

bool Report::has(const std::string& key) const {
  for (const auto& [k, v] : kv_)
    if (k == key) return true;
  return false;
}

const std::string& Report::text(const std::string& key) const {
  for (const auto& [k, v] : kv_)
    if (k == key) return v;
  throw std::out_of_range("report: no key " + key);
}

double Report::scalar(const std::string& key) const {
  const std::string& s = text(key);
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("report: key " + key + " is not numeric");
  return v;
}

Table& Report::add_table(const std::string& name) {
  tables_.emplace_back();
  tables_.back().name = name;
  return tables_.back();
}

const Table& Report::table(const std::string& name) const {
  for (const auto& t : tables_)
    if (t.name == name) return t;
  throw std::out_of_range("report: no table " + name);
}

CheckResult& Report::add_check(const std::string& name, double value, double lo, double hi) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.lo = lo;
  c.hi = hi;
  c.pass = value >= lo && value <= hi;
  checks_.push_back(c);
  return checks_.back();
}

bool Report::all_checks_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

std::string Report::to_kv() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
  for (const auto& c : checks_) {
    os << "check." << c.name << ".value = " << format_number(c.value) << "\n";
    os << "check." << c.name << ".lo = " << format_number(c.lo) << "\n";
    os << "check." << c.name << ".hi = " << format_number(c.hi) << "\n";
    os << "check." << c.name << ".pass = " << (c.pass ? "true" : "false") << "\n";
  }
  return os.str();
}

std::string table_to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("table " + table.name + ": ragged row");
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  return os.str();
}

Table read_csv_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read table: " + path);
  Table t;
  t.name = std::filesystem::path(path).stem().string();
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, ',')) fields.push_back(item);
    if (line.back() == ',') fields.push_back("");
    if (header) {
      t.columns = fields;
      header = false;
      continue;
    }
    if (fields.size() != t.columns.size())
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               " has " + std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(t.columns.size()));
    std::vector<double> row;
    for (const auto& fld : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fld, &used));
        if (used != fld.size()) throw std::invalid_argument(fld);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                 ": not a number: " + fld);
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (header) throw std::runtime_error(path + ": empty table");
  return t;
}

void Report::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "report.kv", std::ios::binary);
    if (!f) throw std::runtime_error("report: cannot write under " + dir);
    f << to_kv();
  }
  for (const auto& t : tables_) {
    std::ofstream f(fs::path(dir) / (t.name + ".csv"), std::ios::binary);
    if (!f) throw std::runtime_error("report: cannot write table " + t.name);
    f << table_to_csv(t);
  }
}

}  // namespace spinpair
