#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hyerslab/algebra.hpp"

namespace hyerslab {

/// Which Hyers sequence is in play: Forward rescales x by (r/s)^n and the
/// value by (r/s)^-n; Backward does the opposite.
enum class Direction { Forward, Backward };

enum class DecayHint { ForwardSummable, BackwardSummable, Unknown };

/// A nonnegative bound φ on the functional-equation residual, evaluated on
/// the norms of its arguments (arity 2 for the Jensen inequality, 5 for the
/// homomorphism inequality).
class ControlFunction {
 public:
  struct Power {
    double eps;
    double p;
  };
  struct Constant {
    double eps;
  };
  struct Sampled {
    std::function<double(std::span<const double>)> fn;
    DecayHint hint;
  };

  /// eps·Σ‖argᵢ‖^p, with a zero argument contributing 0 for every p.
  static ControlFunction power(double eps, double p, int arity = 2);
  static ControlFunction constant(double eps, int arity = 2);
  static ControlFunction sampled(std::function<double(std::span<const double>)> fn, int arity, DecayHint hint);

  int arity() const noexcept { return arity_; }
  const std::variant<Power, Constant, Sampled>& kind() const noexcept { return kind_; }
  /// True when φ is identically zero (eps = 0 for the closed-form kinds).
  bool vanishes() const noexcept;
  /// Same family, arity changed; not available for Sampled.
  ControlFunction with_arity(int arity) const;

  double operator()(std::span<const double> norms) const;

 private:
  ControlFunction(std::variant<Power, Constant, Sampled> kind, int arity) : kind_(std::move(kind)), arity_(arity) {}

  std::variant<Power, Constant, Sampled> kind_;
  int arity_;
};

/// Throws ArityMismatch when the argument count differs from φ's arity.
double phi_eval(const ControlFunction& phi, std::span<const double> norms);
double phi_eval(const ControlFunction& phi, const AlgebraContext& ctx, std::span<const Element> args);

struct SeriesValue {
  double value = 0.0;
  /// Upper bound on the omitted remainder (an estimate when !certified).
  double truncation_tail = 0.0;
  int terms_used = 0;
  bool certified = true;

  double upper() const noexcept { return value + truncation_tail; }
};

struct SeriesOptions {
  /// Stop once truncation_tail <= tol·value.
  double tol = 1e-12;
  int max_terms = 100000;
};

/// φ̃ in the given direction at the given per-slot norms:
///   Forward:  (1/r) Σₙ (r/s)^-n φ((r/s)^n x)
///   Backward: (1/s) Σₙ (r/s)^n  φ((r/s)^-n x)
/// Throws Divergent outside the convergent regime, TailNotCertifiable for
/// a Sampled φ whose decay hint does not match the direction.
SeriesValue phi_tilde(const ControlFunction& phi, Direction direction, int r, int s, std::span<const double> norms,
                      const SeriesOptions& options = {});

SeriesValue phi_tilde_forward(const ControlFunction& phi, int r, int s, std::span<const double> norms,
                              double tol = 1e-12);
SeriesValue phi_tilde_backward(const ControlFunction& phi, int r, int s, std::span<const double> norms,
                               double tol = 1e-12);

/// First `terms` terms of φ̃ with the certified remainder of the rest.
SeriesValue phi_tilde_partial(const ControlFunction& phi, Direction direction, int r, int s,
                              std::span<const double> norms, int terms);

/// 2·r^-p·ε·‖x‖^p / (r^(1-p) − s^(1-p)); requires p < 1 and r > s.
double power_bound_closed_form(double eps, double p, int r, int s, double x_norm);

/// Telescoping bound on ‖f(x) − (Hyers iterate n)(x)‖ obtained by putting
/// the other Jensen argument to zero:
///   Forward:  (1/r) Σ_{k<n} (r/s)^-k φ((r/s)^(k+1) x, 0)
///   Backward: (1/s) Σ_{k<n} (r/s)^k  φ((r/s)^-k x, 0)
/// `slot` is the argument position holding x (0 pivots on s, 1 on t).
/// n = nullopt sums to infinity.
SeriesValue derivation_bound(const ControlFunction& phi, Direction direction, int r, int s, double x_norm,
                             std::optional<int> n, int slot = 0, const SeriesOptions& options = {});

/// Σ_{k≥from} of the derivation series: the Cauchy remainder bounding
/// ‖iterate(from) − limit‖.
SeriesValue derivation_tail(const ControlFunction& phi, Direction direction, int r, int s, double x_norm, int from,
                            int slot = 0, const SeriesOptions& options = {});

}  // namespace hyerslab
