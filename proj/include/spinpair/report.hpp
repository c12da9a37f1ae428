#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <deque>
#include <vector>

namespace spinpair {

/// Canonical 12-significant-digit rendering used everywhere numbers are
/// serialized, so emitted files are bitwise reproducible.
std::string format_number(double v);

/// One acceptance band: pass iff lo <= value <= hi.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Ordered scalar results plus attached tables and band checks.
class Report {
 public:
  void put(const std::string& key, double value);
  void put_text(const std::string& key, const std::string& value);
  void put_int(const std::string& key, long long value);

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double scalar(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& scalars() const { return kv_; }

  Table& add_table(const std::string& name);
  /// Stable storage: references from add_table stay valid as more
  /// tables are appended.
  const std::deque<Table>& tables() const { return tables_; }
  const Table& table(const std::string& name) const;

  CheckResult& add_check(const std::string& name, double value, double lo, double hi);
  const std::vector<CheckResult>& checks() const { return checks_; }
  bool all_checks_pass() const;

  /// key = value lines, checks folded in as check.<name>.* keys.
  std::string to_kv() const;

  /// Writes report.kv and one <table name>.csv per table under dir.
  void write(const std::string& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
  std::deque<Table> tables_;
  std::vector<CheckResult> checks_;
};

std::string table_to_csv(const Table& table);

/// Reads a numeric CSV written by table_to_csv (header row plus numbers).
Table read_csv_table(const std::string& path);

}  // namespace spinpair
