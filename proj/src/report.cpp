#include <waveguide/report.hpp>
#include <waveguide/field_io.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveguide {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void KeyValueReport::add(const std::string& key, double value) {
  lines_.emplace_back(key, format_double(value));
}

void KeyValueReport::add(const std::string& key, long long value) {
  lines_.emplace_back(key, std::to_string(value));
}

void KeyValueReport::add(const std::string& key, bool value) {
  lines_.emplace_back(key, value ? "true" : "false");
}

void KeyValueReport::add(const std::string& key, const std::string& value) {
  lines_.emplace_back(key, value);
}

std::string KeyValueReport::str() const {
  std::string s;
  for (const auto& [k, v] : lines_) s += k + ": " + v + "\n";
  return s;
}

void KeyValueReport::write(const std::filesystem::path& path) const { write_text(path, str()); }

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::invalid_argument("CsvTable: row width mismatch");
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
  };
  std::string s = line(header);
  for (const auto& r : rows) s += line(r);
  return s;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void append_inequality(KeyValueReport& out, const InequalityReport& r, const std::string& prefix) {
  out.add(prefix + "name", r.name);
  out.add(prefix + "lhs", r.lhs);
  for (const auto& [k, v] : r.lhs_terms) out.add(prefix + "lhs." + k, v);
  out.add(prefix + "rhs", r.rhs());
  for (const auto& [k, v] : r.rhs_terms) out.add(prefix + "rhs." + k, v);
  out.add(prefix + "empirical_C", r.empirical_C);
  out.add(prefix + "log_scale", r.log_scale);
  for (const auto& [k, v] : r.metrics) out.add(prefix + "metric." + k, v);
  for (const auto& [k, v] : r.flags) out.add(prefix + "flag." + k, v);
  out.add(prefix + "passed", r.passed());
}

void append_assumption(KeyValueReport& out, const AssumptionReport& r, const std::string& prefix) {
  out.add(prefix + "regime", to_string(r.regime));
  for (const auto& b : r.bullets) {
    const std::string key = prefix + "bullet." + b.name;
    out.add(key + ".passed", b.passed);
    out.add(key + ".verifiable", b.verifiable);
    out.add(key + ".margin", b.margin + 0.0);  // no negative zero in reports
    if (!b.detail.empty()) out.add(key + ".detail", b.detail);
  }
  out.add(prefix + "min_psi", r.min_psi);
  out.add(prefix + "min_grad_psi", r.min_grad_psi);
  out.add(prefix + "max_normal_psi_unobserved", r.max_normal_psi_unobserved);
  if (r.regime == Regime::Bounded) {
    out.add(prefix + "max_dx1_psi_left", r.max_dx1_psi_left);
    out.add(prefix + "min_dx1_psi_right", r.min_dx1_psi_right);
  } else {
    out.add(prefix + "kappa", r.kappa);
    out.add(prefix + "min_dx1_psi", r.min_dx1_psi);
    for (const auto& [R, ratio] : r.tail_ratios) out.add(prefix + "tail_ratio.R=" + format_double(R), ratio);
    out.add(prefix + "unbounded_strip_flag", r.unbounded_strip_flag);
  }
  out.add(prefix + "all_passed", r.all_passed());
}

void append_stability(KeyValueReport& out, const PerturbationSweep& sw) {
  for (std::size_t t = 0; t < sw.thetas.size(); ++t)
    for (std::size_t e = 0; e < sw.epsilons.size(); ++e) {
      const StabilityReport& r = sw.at(t, e);
      const std::string key = "theta=" + format_double(r.theta) + ".eps=" + format_double(r.epsilon) + ".";
      out.add(key + "lhs", r.lhs);
      out.add(key + "rhs_boundary", r.rhs_boundary);
      out.add(key + "rhs_trace", r.rhs_trace);
      out.add(key + "C_eps", r.empirical_C_eps);
      out.add(key + "r_bound", r.r_bound);
      if (r.open) out.add(key + "truncation_budget", r.truncation_budget);
    }
  for (std::size_t e = 0; e < sw.epsilons.size(); ++e) {
    const std::string key = "eps=" + format_double(sw.epsilons[e]) + ".";
    out.add(key + "lhs_order", sw.lhs_order[e]);
    out.add(key + "C_spread", sw.C_spread[e]);
  }
  out.add("all_finite", sw.all_finite);
  out.add("window_monotone", sw.window_monotone);
}

CsvTable sweep_table() { return CsvTable{{"case", "s", "lambda", "lhs", "rhs", "C"}, {}}; }

void append_sweep_rows(CsvTable& table, const InequalityReport& r, const std::string& label) {
  for (const auto& p : r.sweep)
    table.add_row({label, format_double(p.s), format_double(p.lambda), format_double(p.lhs),
                   format_double(p.rhs), format_double(p.empirical_C)});
}

CsvTable stability_table(const PerturbationSweep& sw) {
  CsvTable t{{"theta", "eps", "lhs", "rhs_boundary", "rhs_trace", "C_eps", "r_bound",
              "truncation_budget"},
             {}};
  for (const auto& r : sw.reports)
    t.add_row({format_double(r.theta), format_double(r.epsilon), format_double(r.lhs),
               format_double(r.rhs_boundary), format_double(r.rhs_trace),
               format_double(r.empirical_C_eps), format_double(r.r_bound),
               format_double(r.truncation_budget)});
  return t;
}

}  // namespace waveguide
