#include "hyerslab/control.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hyerslab/accumulator.hpp"
#include "hyerslab/error.hpp"

namespace hyerslab {

namespace {

double power_term(double norm, double p) { return norm > 0.0 ? std::pow(norm, p) : 0.0; }

void check_eps(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidParams, "eps must be finite and >= 0");
}

void check_arity(int arity) {
  if (arity != 2 && arity != 5) throw Error(ErrorCode::ArityMismatch, "control arity must be 2 or 5");
}

void check_coefficients(int r, int s) {
  if (r < 1 || s < 1) throw Error(ErrorCode::InvalidParams, "r and s must be positive integers");
}

// term_k = weight · weight_ratio^k · φ(arg_ratio^(k + shift) · norms)
struct SeriesShape {
  double weight;
  double weight_ratio;
  double arg_ratio;
  int shift;
  std::vector<double> norms;
};

SeriesShape phi_tilde_shape(Direction direction, int r, int s, std::span<const double> norms) {
  const double rd = r;
  const double sd = s;
  std::vector<double> n(norms.begin(), norms.end());
  if (direction == Direction::Forward) return {1.0 / rd, sd / rd, rd / sd, 0, std::move(n)};
  return {1.0 / sd, rd / sd, sd / rd, 0, std::move(n)};
}

SeriesShape derivation_shape(const ControlFunction& phi, Direction direction, int r, int s, double x_norm, int slot) {
  if (slot < 0 || slot >= phi.arity()) throw Error(ErrorCode::ArityMismatch, "derivation slot out of range");
  std::vector<double> norms(static_cast<std::size_t>(phi.arity()), 0.0);
  norms[static_cast<std::size_t>(slot)] = x_norm;
  SeriesShape shape = phi_tilde_shape(direction, r, s, norms);
  if (direction == Direction::Forward) shape.shift = 1;
  return shape;
}

struct Geometric {
  double first;
  double ratio;
};

std::optional<Geometric> as_geometric(const ControlFunction& phi, const SeriesShape& shape) {
  if (const auto* pw = std::get_if<ControlFunction::Power>(&phi.kind())) {
    std::vector<double> shifted = shape.norms;
    const double lift = std::pow(shape.arg_ratio, shape.shift);
    for (double& v : shifted) v *= lift;
    return Geometric{shape.weight * phi(shifted), shape.weight_ratio * std::pow(shape.arg_ratio, pw->p)};
  }
  if (const auto* c = std::get_if<ControlFunction::Constant>(&phi.kind())) {
    return Geometric{shape.weight * c->eps, shape.weight_ratio};
  }
  return std::nullopt;
}

SeriesValue sum_geometric(const Geometric& g, int start, std::optional<int> count, const SeriesOptions& options) {
  SeriesValue out;
  if (!count && !(g.ratio < 1.0)) {
    throw Error(ErrorCode::Divergent, "geometric ratio " + std::to_string(g.ratio) + " >= 1");
  }
  if (g.first == 0.0) return out;
  CompensatedSum<double> acc;
  if (count) {
    for (int k = start; k < start + *count; ++k) acc += g.first * std::pow(g.ratio, k);
    out.value = acc.value();
    out.terms_used = *count;
    out.truncation_tail = g.ratio < 1.0 ? g.first * std::pow(g.ratio, start + *count) / (1.0 - g.ratio)
                                        : std::numeric_limits<double>::infinity();
    return out;
  }
  for (int k = start; k < start + options.max_terms; ++k) {
    acc += g.first * std::pow(g.ratio, k);
    out.terms_used = k - start + 1;
    out.value = acc.value();
    out.truncation_tail = g.first * std::pow(g.ratio, k + 1) / (1.0 - g.ratio);
    if (out.truncation_tail <= options.tol * out.value) break;
  }
  return out;
}

double sampled_term(const ControlFunction& phi, const SeriesShape& shape, int k) {
  std::vector<double> scaled = shape.norms;
  const double lift = std::pow(shape.arg_ratio, k + shape.shift);
  for (double& v : scaled) v *= lift;
  const double t = shape.weight * std::pow(shape.weight_ratio, k) * phi(scaled);
  if (!std::isfinite(t)) throw Error(ErrorCode::Divergent, "sampled control series term overflowed");
  return t;
}

// Tail estimate from the last observed term ratio; never certified.
SeriesValue sum_sampled(const ControlFunction& phi, const SeriesShape& shape, int start, std::optional<int> count,
                        const SeriesOptions& options) {
  SeriesValue out;
  out.certified = false;
  CompensatedSum<double> acc;
  double previous = 0.0;
  auto estimate_tail = [&](double last) {
    if (last == 0.0) return 0.0;
    if (previous <= 0.0) return std::numeric_limits<double>::infinity();
    const double q = last / previous;
    return q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  };
  const int limit = count ? *count : options.max_terms;
  for (int i = 0; i < limit; ++i) {
    const double t = sampled_term(phi, shape, start + i);
    acc += t;
    out.value = acc.value();
    out.terms_used = i + 1;
    out.truncation_tail = estimate_tail(t);
    previous = t;
    if (!count && i >= 1 && out.truncation_tail <= options.tol * out.value) return out;
  }
  if (!count) throw Error(ErrorCode::Divergent, "sampled control series did not settle within max_terms");
  return out;
}

void require_hint(const ControlFunction& phi, Direction direction) {
  const auto* sampled = std::get_if<ControlFunction::Sampled>(&phi.kind());
  if (sampled == nullptr) return;
  const DecayHint wanted = direction == Direction::Forward ? DecayHint::ForwardSummable : DecayHint::BackwardSummable;
  if (sampled->hint != wanted) {
    throw Error(ErrorCode::TailNotCertifiable, "sampled control has no decay hint for this direction");
  }
}

SeriesValue sum_series(const ControlFunction& phi, Direction direction, const SeriesShape& shape, int start,
                       std::optional<int> count, const SeriesOptions& options) {
  if (phi.vanishes()) return {};
  if (auto g = as_geometric(phi, shape)) return sum_geometric(*g, start, count, options);
  if (!count) require_hint(phi, direction);
  return sum_sampled(phi, shape, start, count, options);
}

}  // namespace

ControlFunction ControlFunction::power(double eps, double p, int arity) {
  check_eps(eps);
  check_arity(arity);
  if (!std::isfinite(p)) throw Error(ErrorCode::InvalidParams, "p must be finite");
  return ControlFunction(Power{eps, p}, arity);
}

ControlFunction ControlFunction::constant(double eps, int arity) {
  check_eps(eps);
  check_arity(arity);
  return ControlFunction(Constant{eps}, arity);
}

ControlFunction ControlFunction::sampled(std::function<double(std::span<const double>)> fn, int arity, DecayHint hint) {
  check_arity(arity);
  if (!fn) throw Error(ErrorCode::InvalidParams, "sampled control needs a callable");
  return ControlFunction(Sampled{std::move(fn), hint}, arity);
}

bool ControlFunction::vanishes() const noexcept {
  if (const auto* pw = std::get_if<Power>(&kind_)) return pw->eps == 0.0;
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->eps == 0.0;
  return false;
}

ControlFunction ControlFunction::with_arity(int arity) const {
  check_arity(arity);
  if (std::holds_alternative<Sampled>(kind_)) {
    throw Error(ErrorCode::ArityMismatch, "cannot change the arity of a sampled control");
  }
  return ControlFunction(kind_, arity);
}

double ControlFunction::operator()(std::span<const double> norms) const {
  if (static_cast<int>(norms.size()) != arity_) {
    throw Error(ErrorCode::ArityMismatch,
                "expected " + std::to_string(arity_) + " arguments, got " + std::to_string(norms.size()));
  }
  for (double v : norms) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidParams, "control arguments are norms and must be >= 0");
  }
  if (const auto* pw = std::get_if<Power>(&kind_)) {
    double total = 0.0;
    for (double v : norms) total += power_term(v, pw->p);
    return pw->eps * total;
  }
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->eps;
  const double value = std::get<Sampled>(kind_).fn(norms);
  if (!(value >= 0.0)) throw Error(ErrorCode::EvaluationFailure, "sampled control returned a negative value");
  return value;
}

double phi_eval(const ControlFunction& phi, std::span<const double> norms) { return phi(norms); }

double phi_eval(const ControlFunction& phi, const AlgebraContext& ctx, std::span<const Element> args) {
  std::vector<double> norms;
  norms.reserve(args.size());
  for (const Element& a : args) norms.push_back(norm(ctx, a));
  return phi(norms);
}

SeriesValue phi_tilde(const ControlFunction& phi, Direction direction, int r, int s, std::span<const double> norms,
                      const SeriesOptions& options) {
  check_coefficients(r, s);
  if (static_cast<int>(norms.size()) != phi.arity()) throw Error(ErrorCode::ArityMismatch, "phi_tilde argument count");
  return sum_series(phi, direction, phi_tilde_shape(direction, r, s, norms), 0, std::nullopt, options);
}

SeriesValue phi_tilde_forward(const ControlFunction& phi, int r, int s, std::span<const double> norms, double tol) {
  return phi_tilde(phi, Direction::Forward, r, s, norms, SeriesOptions{tol});
}

SeriesValue phi_tilde_backward(const ControlFunction& phi, int r, int s, std::span<const double> norms, double tol) {
  return phi_tilde(phi, Direction::Backward, r, s, norms, SeriesOptions{tol});
}

SeriesValue phi_tilde_partial(const ControlFunction& phi, Direction direction, int r, int s,
                              std::span<const double> norms, int terms) {
  check_coefficients(r, s);
  if (terms < 0) throw Error(ErrorCode::InvalidParams, "term count must be >= 0");
  if (static_cast<int>(norms.size()) != phi.arity()) throw Error(ErrorCode::ArityMismatch, "phi_tilde argument count");
  return sum_series(phi, direction, phi_tilde_shape(direction, r, s, norms), 0, terms, {});
}

double power_bound_closed_form(double eps, double p, int r, int s, double x_norm) {
  check_coefficients(r, s);
  check_eps(eps);
  if (!(p < 1.0) || r <= s) throw Error(ErrorCode::InvalidRegime, "closed form needs p < 1 and r > s");
  if (eps == 0.0 || x_norm == 0.0) return 0.0;
  const double rd = r;
  const double sd = s;
  return 2.0 * std::pow(rd, -p) * eps * std::pow(x_norm, p) / (std::pow(rd, 1.0 - p) - std::pow(sd, 1.0 - p));
}

SeriesValue derivation_bound(const ControlFunction& phi, Direction direction, int r, int s, double x_norm,
                             std::optional<int> n, int slot, const SeriesOptions& options) {
  check_coefficients(r, s);
  if (n && *n < 0) throw Error(ErrorCode::InvalidParams, "iteration count must be >= 0");
  const SeriesShape shape = derivation_shape(phi, direction, r, s, x_norm, slot);
  SeriesValue out = sum_series(phi, direction, shape, 0, n, options);
  if (n) {
    // A finite sum is the bound itself.
    out.truncation_tail = 0.0;
    out.certified = true;
  }
  return out;
}

SeriesValue derivation_tail(const ControlFunction& phi, Direction direction, int r, int s, double x_norm, int from,
                            int slot, const SeriesOptions& options) {
  check_coefficients(r, s);
  if (from < 0) throw Error(ErrorCode::InvalidParams, "start index must be >= 0");
  const SeriesShape shape = derivation_shape(phi, direction, r, s, x_norm, slot);
  return sum_series(phi, direction, shape, from, std::nullopt, options);
}

}  // namespace hyerslab
