#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyerslab/algebra.hpp"
#include "hyerslab/control.hpp"
#include "hyerslab/report.hpp"

namespace hyerslab {

using Map = std::function<Element(const Element&)>;

/// A map f under test. f(0) = 0 is enforced by replacing f with
/// f − f(0), which leaves the generalized Jensen residual unchanged.
class ProbeFunction {
 public:
  ProbeFunction(const AlgebraContext& ctx, Map fn, std::string label);

  Element operator()(const Element& x) const;
  const std::string& label() const noexcept { return label_; }
  const AlgebraContext& context() const noexcept { return ctx_; }

 private:
  AlgebraContext ctx_;
  Map fn_;
  Element offset_;
  bool has_offset_ = false;
  std::string label_;
};

enum class Pivot { S, T };

/// Constants of r f((s x + t y)/r) = s f(x) + t f(y), plus the scaling
/// direction and which coefficient (s or t) sets the iteration ratio.
class JensenParams {
 public:
  /// Throws InvalidParams unless r, s, t >= 1 and the pivot coefficient
  /// differs from r.
  JensenParams(int r, int s, int t, Direction direction = Direction::Forward, Pivot pivot = Pivot::S);

  int r() const noexcept { return r_; }
  int s() const noexcept { return s_; }
  int t() const noexcept { return t_; }
  Direction direction() const noexcept { return direction_; }
  Pivot pivot() const noexcept { return pivot_; }

  int pivot_coefficient() const noexcept { return pivot_ == Pivot::S ? s_ : t_; }
  /// Control-function slot the iteration runs through (0 for x, 1 for y).
  int pivot_slot() const noexcept { return pivot_ == Pivot::S ? 0 : 1; }
  /// r / pivot_coefficient()
  double ratio() const noexcept { return static_cast<double>(r_) / pivot_coefficient(); }

 private:
  int r_, s_, t_;
  Direction direction_;
  Pivot pivot_;
};

/// (num/den)^n from exact integer powers (exact while below 2^64) divided
/// once, so no rounding compounds across n.
double ratio_power(int num, int den, int n);

struct HyersOptions {
  double tol = 1e-6;
  int n_cap = 64;
  SeriesOptions series{};
};

/// ‖r f((s x + t y)/r) − s f(x) − t f(y)‖
double jensen_residual(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                       const Element& x, const Element& y);

/// Forward: (r/s)^-n f((r/s)^n x); Backward: (r/s)^n f((r/s)^-n x), with s
/// replaced by the pivot coefficient. Throws CapExceeded for n > n_cap.
Element hyers_iterate(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx, const Element& x,
                      int n, int n_cap = 64);

struct LimitPoint {
  Element value;
  int n_used = 0;
  /// Cauchy remainder bounding ‖value − T(x)‖.
  double tail_bound = 0.0;
  bool certified = false;
  /// ‖iterate(n) − iterate(n−1)‖, a sanity cross-check only.
  double observed_step = 0.0;
};

/// Iterates until the φ-based Cauchy remainder drops to options.tol. On
/// reaching n_cap first, returns the last iterate with certified = false.
LimitPoint hyers_limit(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                       const ControlFunction& phi, const Element& x, const HyersOptions& options = {});

struct HyersResult {
  std::vector<Element> limit_at;
  std::vector<int> n_used;
  std::vector<double> tail_bound;
  std::vector<bool> certifications;

  bool certified() const noexcept;
  int max_n_used() const noexcept;
};

HyersResult hyers_limit(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                        const ControlFunction& phi, std::span<const Element> samples,
                        const HyersOptions& options = {});

/// T as a map: every evaluation runs hyers_limit at its argument.
ProbeFunction make_limit_map(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                             const ControlFunction& phi, const HyersOptions& options = {});

/// φ̃(x, x) in the params' direction (remaining slots zero).
SeriesValue phi_tilde_diagonal(const ControlFunction& phi, const JensenParams& params, double x_norm,
                               const SeriesOptions& options = {});

/// Per sample: ‖f(x) − T(x)‖ against the telescoping bound and φ̃(x, x).
/// A row passes iff the residual is within the telescoping bound plus the
/// limit's own tail; uncertified bounds never pass. Throws NotCertified if
/// T is not certified.
StabilityReport verify_stability_bound(const ProbeFunction& f, const HyersResult& limit, const ControlFunction& phi,
                                       const JensenParams& params, const AlgebraContext& ctx,
                                       std::span<const Element> samples, const HyersOptions& options = {});

/// ‖T(x) − T'(x)‖ against 2·(tail of φ̃ from j) for j = 0..j_max, plus a
/// per-sample row asserting the tails shrink.
CheckReport verify_uniqueness(const HyersResult& limit, const HyersResult& other, const ControlFunction& phi,
                              const JensenParams& params, const AlgebraContext& ctx,
                              std::span<const Element> samples, int j_max);

/// ‖T(x + y) − T(x) − T(y)‖ <= tol·(1 + ‖x‖ + ‖y‖) over consecutive sample
/// pairs, and ‖T(0)‖ <= tol.
CheckReport verify_additivity(const Map& map, const AlgebraContext& ctx, std::span<const Element> samples,
                              double tol);

}  // namespace hyerslab
