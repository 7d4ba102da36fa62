#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hyerslab/algebra.hpp"

namespace hyerslab {

struct CheckRow {
  std::string check;
  std::optional<Scalar> mu;
  std::size_t sample_id = 0;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Ordered list of check rows. A row passes iff value <= bound; rows
/// meant only for reporting carry an infinite bound.
class CheckReport {
 public:
  void add(std::string check, std::size_t sample_id, double value, double bound,
           std::optional<Scalar> mu = std::nullopt);
  void info(std::string check, std::size_t sample_id, double value, std::optional<Scalar> mu = std::nullopt);
  void append(const CheckReport& other);

  const std::vector<CheckRow>& rows() const noexcept { return rows_; }
  bool passed() const noexcept;
  std::size_t failures() const noexcept;
  /// Largest value among rows whose check name starts with `prefix`
  /// (0 when there are none).
  double max_value(std::string_view prefix) const noexcept;
  std::size_t count(std::string_view prefix) const noexcept;

  /// Rows stably sorted by (check, sample_id).
  std::vector<CheckRow> sorted_rows() const;

 private:
  std::vector<CheckRow> rows_;
};

/// One row per sample of a Hyers stability-bound verification.
struct StabilityRow {
  std::size_t sample_id = 0;
  double x_norm = 0.0;
  double residual = 0.0;
  double bound_app = 0.0;
  double bound_phitilde = 0.0;
  int n_used = 0;
  bool certified = false;
  bool pass = false;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool passed() const noexcept;
};

/// 17 significant digits with a '.' decimal point regardless of locale.
std::string format_number(double v);
std::string format_scalar(Scalar z);

/// check,mu,sample_id,value,bound,pass with LF line endings.
void write_csv(std::ostream& os, const CheckReport& report);
/// sample_id,x_norm,residual,bound_app,bound_phitilde,n_used,certified,pass
void write_csv(std::ostream& os, const StabilityReport& report);

nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const StabilityReport& report);

}  // namespace hyerslab
