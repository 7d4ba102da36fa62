#include "hyerslab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace hyerslab {

void CheckReport::add(std::string check, std::size_t sample_id, double value, double bound,
                      std::optional<Scalar> mu) {
  const bool pass = value <= bound;
  rows_.push_back(CheckRow{std::move(check), mu, sample_id, value, bound, pass});
}

void CheckReport::info(std::string check, std::size_t sample_id, double value, std::optional<Scalar> mu) {
  add(std::move(check), sample_id, value, std::numeric_limits<double>::infinity(), mu);
}

void CheckReport::append(const CheckReport& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

bool CheckReport::passed() const noexcept { return failures() == 0; }

std::size_t CheckReport::failures() const noexcept {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](const CheckRow& r) { return !r.pass; }));
}

double CheckReport::max_value(std::string_view prefix) const noexcept {
  double best = 0.0;
  for (const auto& row : rows_) {
    if (std::string_view(row.check).starts_with(prefix)) best = std::max(best, row.value);
  }
  return best;
}

std::size_t CheckReport::count(std::string_view prefix) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      rows_.begin(), rows_.end(), [&](const CheckRow& r) { return std::string_view(r.check).starts_with(prefix); }));
}

std::vector<CheckRow> CheckReport::sorted_rows() const {
  std::vector<CheckRow> out = rows_;
  std::stable_sort(out.begin(), out.end(), [](const CheckRow& a, const CheckRow& b) {
    if (a.check != b.check) return a.check < b.check;
    return a.sample_id < b.sample_id;
  });
  return out;
}

bool StabilityReport::passed() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const StabilityRow& r) { return r.pass; });
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, end);
}

std::string format_scalar(Scalar z) {
  std::string out = format_number(z.real());
  const double im = z.imag();
  out += (std::signbit(im) ? "-" : "+");
  out += format_number(std::abs(im));
  out += "i";
  return out;
}

void write_csv(std::ostream& os, const CheckReport& report) {
  os << "check,mu,sample_id,value,bound,pass\n";
  for (const auto& row : report.sorted_rows()) {
    os << row.check << ',' << (row.mu ? format_scalar(*row.mu) : std::string()) << ',' << row.sample_id << ','
       << format_number(row.value) << ',' << format_number(row.bound) << ',' << (row.pass ? "true" : "false") << '\n';
  }
}

void write_csv(std::ostream& os, const StabilityReport& report) {
  os << "sample_id,x_norm,residual,bound_app,bound_phitilde,n_used,certified,pass\n";
  for (const auto& row : report.rows) {
    os << row.sample_id << ',' << format_number(row.x_norm) << ',' << format_number(row.residual) << ','
       << format_number(row.bound_app) << ',' << format_number(row.bound_phitilde) << ',' << row.n_used << ','
       << (row.certified ? "true" : "false") << ',' << (row.pass ? "true" : "false") << '\n';
  }
}

namespace {

// JSON has no infinity; report it as a string so the file stays valid.
nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.sorted_rows()) {
    nlohmann::json j{{"check", row.check},
                     {"sample_id", row.sample_id},
                     {"value", number_json(row.value)},
                     {"bound", number_json(row.bound)},
                     {"pass", row.pass}};
    j["mu"] = row.mu ? nlohmann::json{row.mu->real(), row.mu->imag()} : nlohmann::json(nullptr);
    rows.push_back(std::move(j));
  }
  return nlohmann::json{{"passed", report.passed()}, {"failures", report.failures()}, {"rows", std::move(rows)}};
}

nlohmann::json to_json(const StabilityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"sample_id", row.sample_id},
                    {"x_norm", number_json(row.x_norm)},
                    {"residual", number_json(row.residual)},
                    {"bound_app", number_json(row.bound_app)},
                    {"bound_phitilde", number_json(row.bound_phitilde)},
                    {"n_used", row.n_used},
                    {"certified", row.certified},
                    {"pass", row.pass}});
  }
  return nlohmann::json{{"passed", report.passed()}, {"rows", std::move(rows)}};
}

}  // namespace hyerslab
