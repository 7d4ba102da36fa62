#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hyerslab/config.hpp"
#include "hyerslab/error.hpp"
#include "hyerslab/report.hpp"

namespace hyerslab {

struct SuiteResult {
  CheckReport checks;
  std::optional<StabilityReport> stability;
  /// key = value lines for summary.txt, in insertion order.
  std::vector<std::pair<std::string, std::string>> notes;

  bool passed() const noexcept { return checks.passed() && (!stability || stability->passed()); }
};

/// Runs the configured suite in memory. Errors propagate as Error.
SuiteResult run_suite(const ExperimentConfig& config);

/// Runs the suite and writes report.csv, report.json, summary.txt (and
/// stability.csv when a stability report exists) under output_dir.
/// Returns 0 when every check passes, 1 otherwise, 2 on configuration
/// errors (including a divergent series regime).
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Exit status for an error escaping a suite.
int exit_code_for(const Error& error) noexcept;

struct BoundTableRow {
  int r;
  int s;
  double p;
  double eps;
  double x_norm;
  double closed_form;
  double series;
  double rel_gap;
  std::string status;
};

/// Closed-form power bound next to the two-slot φ̃ series at (x, x) for
/// every grid point. Points outside p < 1, r > s get status "invalid".
std::vector<BoundTableRow> bound_table(std::span<const std::pair<int, int>> rs_grid, std::span<const double> p_grid,
                                       double eps, double x_norm);
void write_bound_table(std::ostream& os, std::span<const BoundTableRow> rows);

}  // namespace hyerslab
