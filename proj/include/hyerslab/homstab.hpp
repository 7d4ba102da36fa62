#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hyerslab/algebra.hpp"
#include "hyerslab/control.hpp"
#include "hyerslab/hyers.hpp"
#include "hyerslab/report.hpp"

namespace hyerslab {

/// Sign of the μt·f(y) term in the five-variable residual. Subtract keeps
/// it consistent with the Jensen equation; LiteralPlus reproduces the
/// alternative printed form.
enum class ResidualSign { Subtract, LiteralPlus };

/// ‖r f((μs x + μt y + [uvw])/r) − μs f(x) ∓ μt f(y) − [f(u) f(v) f(w)]‖
double hom_residual(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx, Scalar mu,
                    const Element& x, const Element& y, const Element& u, const Element& v, const Element& w,
                    ResidualSign sign = ResidualSign::Subtract);

/// Hyers limit of the two-variable restriction (u = v = w = 0, μ = 1)
/// certified against the five-slot control. Throws ArityMismatch unless
/// phi5 has arity 5.
HyersResult recover_hom(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                        const ControlFunction& phi5, std::span<const Element> samples,
                        const HyersOptions& options = {});

struct ElementTriple {
  Element u, v, w;
};

/// ‖T((r/s)x) − (r/s)T(x)‖ <= tol·(1 + ‖x‖)
CheckReport verify_scaling(const Map& map, const JensenParams& params, const AlgebraContext& ctx,
                           std::span<const Element> samples, double tol);

/// Bounds from the vanishing-control homomorphism argument at n = 0..n_probe:
///   cubic:  (r/s)^-3n · φ(0, 0, (r/s)^n u, (r/s)^n v, (r/s)^n w)
///   linear: (r/s)^-n  · φ(0, 0, (r/s)^n u, (r/s)^n v, (r/s)^n w)
/// The linear sequence dominates the cubic one and must vanish.
struct DecaySequence {
  std::vector<double> cubic;
  std::vector<double> linear;
};

DecaySequence hom_decay_sequence(const ControlFunction& phi5, const JensenParams& params, double u_norm,
                                 double v_norm, double w_norm, int n_probe);

struct HomDefectOptions {
  int n_probe = 20;
  double defect_tol = 1e-6;
  double scaling_tol = 1e-8;
};

/// Ternary defect ‖T([uvw]) − [T(u)T(v)T(w)]‖ per triple plus the decay
/// chain of the control. Throws ScalingHypothesisViolated if T fails
/// verify_scaling on the triple entries.
CheckReport verify_hom_defect(const Map& map, const AlgebraContext& ctx, std::span<const ElementTriple> samples,
                              const JensenParams& params, const ControlFunction& phi5,
                              const HomDefectOptions& options = {});

struct UnimodularTriple {
  Scalar mu1, mu2, mu3;
};

/// Smallest M used by the linearity check: ⌈4|λ|⌉ + 1.
int split_multiplier(Scalar lambda);

/// Three unit scalars with μ₁ + μ₂ + μ₃ = 3λ/M. Let w = 3λ/M, μ₃ = w/|w|
/// (1 when w = 0) and v = w − μ₃; then μ₁,₂ = exp(i(arg v ± arccos(|v|/2))).
/// λ = 0 gives the cube roots of unity. Throws PreconditionViolated unless
/// M > 4|λ|.
UnimodularTriple unimodular_three_split(Scalar lambda, int M);

enum class LinearityMode { FullCircle, OneAndI };

/// FullCircle: T(μx) = μT(x) on the split scalars of every λ, the
/// reconstruction (M/3)·ΣT(μₖx) = λT(x), and T(λx) = λT(x) directly.
/// OneAndI: T(ix) = iT(x), T(αx) = αT(x) for the real and imaginary parts
/// α of every λ, and T(λx) = α₁T(x) + α₂T(ix).
/// Bounds are tol·(1 + |λ|)·(1 + ‖x‖).
CheckReport verify_complex_linearity(const Map& map, const AlgebraContext& ctx, std::span<const Element> samples,
                                     std::span<const Scalar> scalars, LinearityMode mode, double tol = 1e-9);

struct GeneratedOptions {
  int n_lo = 6;
  int n_hi = 10;
  double tol = 1e-6;
  /// Random combinations of the generators used as x, y in the final stage.
  int combinations = 8;
  std::uint64_t seed = 1;
};

/// Homomorphism upgrade for algebras spanned by a generating set S:
/// checks f((r/s)^2n [s₁s₂z]) = [f((r/s)^n s₁) f((r/s)^n s₂) f(z)] on
/// n_lo..n_hi first (throws InapplicableHypothesis when it fails), then
/// T([s₁s₂z]) = [T(s₁)T(s₂)f(z)] and finally T([xyz]) = [T(x)T(y)T(z)]
/// for x, y in the span of S.
CheckReport verify_generated_hom(const ProbeFunction& f, const Map& map, const AlgebraContext& ctx,
                                 std::span<const Element> generators, std::span<const Element> samples_z,
                                 const JensenParams& params, const GeneratedOptions& options = {});

}  // namespace hyerslab
