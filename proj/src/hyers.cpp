#include "hyerslab/hyers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "hyerslab/error.hpp"
#include "hyerslab/parallel.hpp"

namespace hyerslab {

ProbeFunction::ProbeFunction(const AlgebraContext& ctx, Map fn, std::string label)
    : ctx_(ctx), fn_(std::move(fn)), offset_(zero(ctx)), label_(std::move(label)) {
  if (!fn_) throw Error(ErrorCode::InvalidParams, "probe function needs a callable");
  Element at_zero = fn_(zero(ctx_));
  ctx_.require(at_zero);
  if (!is_zero(at_zero)) {
    offset_ = std::move(at_zero);
    has_offset_ = true;
  }
}

Element ProbeFunction::operator()(const Element& x) const {
  Element y = fn_(x);
  if (!ctx_.contains(y)) throw Error(ErrorCode::EvaluationFailure, "probe '" + label_ + "' left the algebra");
  if (!has_offset_) return y;
  return sub(ctx_, y, offset_);
}

JensenParams::JensenParams(int r, int s, int t, Direction direction, Pivot pivot)
    : r_(r), s_(s), t_(t), direction_(direction), pivot_(pivot) {
  if (r < 1 || s < 1 || t < 1) throw Error(ErrorCode::InvalidParams, "r, s, t must be positive integers");
  if (pivot_coefficient() == r) {
    throw Error(ErrorCode::InvalidParams, "pivot coefficient equals r: iteration ratio would be 1");
  }
}

double ratio_power(int num, int den, int n) {
  if (n < 0) return ratio_power(den, num, -n);
  auto ipow = [](long double base, int e) {
    long double out = 1.0L;
    while (e > 0) {
      if (e & 1) out *= base;
      base *= base;
      e >>= 1;
    }
    return out;
  };
  return static_cast<double>(ipow(num, n) / ipow(den, n));
}

double jensen_residual(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                       const Element& x, const Element& y) {
  const Scalar r(params.r());
  const Scalar s(params.s());
  const Scalar t(params.t());
  const Element mid = scalar_mul(ctx, 1.0 / r, add(ctx, scalar_mul(ctx, s, x), scalar_mul(ctx, t, y)));
  Element res = scalar_mul(ctx, r, f(mid));
  res = sub(ctx, res, scalar_mul(ctx, s, f(x)));
  res = sub(ctx, res, scalar_mul(ctx, t, f(y)));
  return norm(ctx, res);
}

Element hyers_iterate(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx, const Element& x,
                      int n, int n_cap) {
  if (n < 0) throw Error(ErrorCode::InvalidParams, "iteration index must be >= 0");
  if (n > n_cap) throw Error(ErrorCode::CapExceeded, "n = " + std::to_string(n) + " beyond cap " + std::to_string(n_cap));
  ctx.require(x);
  if (n == 0) return f(x);
  const int r = params.r();
  const int p = params.pivot_coefficient();
  const bool forward = params.direction() == Direction::Forward;
  const double scale_in = forward ? ratio_power(r, p, n) : ratio_power(p, r, n);
  const double scale_out = forward ? ratio_power(p, r, n) : ratio_power(r, p, n);
  return scalar_mul(ctx, scale_out, f(scalar_mul(ctx, scale_in, x)));
}

LimitPoint hyers_limit(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                       const ControlFunction& phi, const Element& x, const HyersOptions& options) {
  ctx.require(x);
  const double x_norm = norm(ctx, x);
  auto tail_at = [&](int n) {
    return derivation_tail(phi, params.direction(), params.r(), params.pivot_coefficient(), x_norm, n,
                           params.pivot_slot(), options.series);
  };
  LimitPoint out;
  int n = 0;
  SeriesValue tail = tail_at(0);
  while (tail.upper() > options.tol && n < options.n_cap) {
    ++n;
    tail = tail_at(n);
  }
  out.value = hyers_iterate(f, params, ctx, x, n, options.n_cap);
  out.n_used = n;
  out.tail_bound = tail.upper();
  out.certified = tail.certified && tail.upper() <= options.tol;
  if (n > 0) out.observed_step = distance(ctx, out.value, hyers_iterate(f, params, ctx, x, n - 1, options.n_cap));
  return out;
}

bool HyersResult::certified() const noexcept {
  return std::all_of(certifications.begin(), certifications.end(), [](bool c) { return c; });
}

int HyersResult::max_n_used() const noexcept {
  return n_used.empty() ? 0 : *std::max_element(n_used.begin(), n_used.end());
}

HyersResult hyers_limit(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                        const ControlFunction& phi, std::span<const Element> samples, const HyersOptions& options) {
  std::vector<LimitPoint> points(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) { points[i] = hyers_limit(f, params, ctx, phi, samples[i], options); });
  HyersResult out;
  for (auto& p : points) {
    out.limit_at.push_back(std::move(p.value));
    out.n_used.push_back(p.n_used);
    out.tail_bound.push_back(p.tail_bound);
    out.certifications.push_back(p.certified);
  }
  return out;
}

ProbeFunction make_limit_map(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                             const ControlFunction& phi, const HyersOptions& options) {
  return ProbeFunction(
      ctx, [=](const Element& x) { return hyers_limit(f, params, ctx, phi, x, options).value; },
      "limit(" + f.label() + ")");
}

SeriesValue phi_tilde_diagonal(const ControlFunction& phi, const JensenParams& params, double x_norm,
                               const SeriesOptions& options) {
  std::vector<double> norms(static_cast<std::size_t>(phi.arity()), 0.0);
  norms[0] = x_norm;
  norms[1] = x_norm;
  return phi_tilde(phi, params.direction(), params.r(), params.pivot_coefficient(), norms, options);
}

StabilityReport verify_stability_bound(const ProbeFunction& f, const HyersResult& limit, const ControlFunction& phi,
                                       const JensenParams& params, const AlgebraContext& ctx,
                                       std::span<const Element> samples, const HyersOptions& options) {
  if (limit.limit_at.size() != samples.size()) {
    throw Error(ErrorCode::InvalidParams, "limit and sample counts differ");
  }
  if (!limit.certified()) throw Error(ErrorCode::NotCertified, "stability bound needs a certified limit");
  StabilityReport report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Element& x = samples[i];
    const double x_norm = norm(ctx, x);
    const SeriesValue app = derivation_bound(phi, params.direction(), params.r(), params.pivot_coefficient(), x_norm,
                                             std::nullopt, params.pivot_slot(), options.series);
    const SeriesValue diag = phi_tilde_diagonal(phi, params, x_norm, options.series);
    const Element fx = f(x);
    StabilityRow row;
    row.sample_id = i;
    row.x_norm = x_norm;
    row.residual = distance(ctx, fx, limit.limit_at[i]);
    row.bound_app = app.upper();
    row.bound_phitilde = diag.upper();
    row.n_used = limit.n_used[i];
    row.certified = app.certified && limit.certifications[i];
    // rounding allowance for evaluating f and T themselves
    const double slack = 1e-12 * (1.0 + norm(ctx, fx));
    row.pass = row.certified && row.residual <= row.bound_app + limit.tail_bound[i] + slack;
    report.rows.push_back(row);
  }
  return report;
}

CheckReport verify_uniqueness(const HyersResult& limit, const HyersResult& other, const ControlFunction& phi,
                              const JensenParams& params, const AlgebraContext& ctx,
                              std::span<const Element> samples, int j_max) {
  if (limit.limit_at.size() != samples.size() || other.limit_at.size() != samples.size()) {
    throw Error(ErrorCode::InvalidParams, "limit and sample counts differ");
  }
  const int r = params.r();
  const int p = params.pivot_coefficient();
  const bool forward = params.direction() == Direction::Forward;
  CheckReport report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x_norm = norm(ctx, samples[i]);
    const double diff = distance(ctx, limit.limit_at[i], other.limit_at[i]);
    const double allowance = limit.tail_bound[i] + other.tail_bound[i];
    double previous = 0.0;
    double worst_ratio = 0.0;
    for (int j = 0; j <= j_max; ++j) {
      // 2·(r/s)^-j·φ̃((r/s)^j x, (r/s)^j x) is twice the φ̃ series from index j
      const double arg_scale = forward ? ratio_power(r, p, j) : ratio_power(p, r, j);
      const double weight = forward ? ratio_power(p, r, j) : ratio_power(r, p, j);
      const double tail = 2.0 * weight * phi_tilde_diagonal(phi, params, arg_scale * x_norm).upper();
      char name[32];
      std::snprintf(name, sizeof(name), "uniqueness.j%02d", j);
      report.add(name, i, diff, tail + allowance);
      if (j > 0 && previous > 0.0) worst_ratio = std::max(worst_ratio, tail / previous);
      previous = tail;
    }
    if (j_max > 0) report.add("uniqueness.tail_ratio", i, worst_ratio, 1.0 - 1e-12);
  }
  return report;
}

CheckReport verify_additivity(const Map& map, const AlgebraContext& ctx, std::span<const Element> samples,
                              double tol) {
  CheckReport report;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Element& x = samples[i];
    const Element& y = samples[(i + 1) % n];
    const Element lhs = map(add(ctx, x, y));
    const Element rhs = add(ctx, map(x), map(y));
    report.add("additivity", i, distance(ctx, lhs, rhs), tol * (1.0 + norm(ctx, x) + norm(ctx, y)));
  }
  report.add("additivity.zero", 0, norm(ctx, map(zero(ctx))), tol);
  return report;
}

}  // namespace hyerslab
