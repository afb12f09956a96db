#pragma once

#include <waveguide/carleman.hpp>
#include <waveguide/stability.hpp>
#include <waveguide/weights.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace waveguide {

/// Ordered "key: value" lines. Doubles are written with 17 significant digits so that
/// identical runs give identical bytes.
class KeyValueReport {
 public:
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, bool value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }

  const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string str() const;
  void write(const std::filesystem::path& path) const;
};

void append_inequality(KeyValueReport& out, const InequalityReport& report,
                       const std::string& prefix);
void append_assumption(KeyValueReport& out, const AssumptionReport& report,
                       const std::string& prefix);
void append_stability(KeyValueReport& out, const PerturbationSweep& sweep);

/// Columns: case, s, lambda, lhs, rhs, C. `label` fills the case column.
void append_sweep_rows(CsvTable& table, const InequalityReport& report, const std::string& label);
CsvTable sweep_table();

/// Columns: theta, eps, lhs, rhs_boundary, rhs_trace, C_eps, r_bound, truncation_budget.
CsvTable stability_table(const PerturbationSweep& sweep);

}  // namespace waveguide
