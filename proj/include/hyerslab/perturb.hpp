#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "hyerslab/algebra.hpp"
#include "hyerslab/homstab.hpp"
#include "hyerslab/hyers.hpp"

namespace hyerslab {

/// An exactly additive map: the solution the Hyers iteration must recover.
class AdditiveCore {
 public:
  /// Operator on the column-major entry vector of a matrix.
  struct MatrixLinear {
    Matrix op;
  };
  struct Similarity {
    Matrix S;
    Matrix S_inv;
  };
  struct UnitaryConj {
    Matrix U;
  };
  /// p ↦ Σ σ_d c_d x^d; degrees without a multiplier use `fallback`.
  struct PolyLinear {
    std::map<std::int64_t, Scalar> multipliers;
    Scalar fallback{1.0};
  };
  /// p(x) ↦ σ·p(c·x)
  struct PolySign {
    double sigma;
    Scalar c;
  };
  struct Identity {};
  /// Entrywise complex conjugation: additive and ℝ-linear, not ℂ-linear.
  struct Conjugation {};

  using Kind = std::variant<MatrixLinear, Similarity, UnitaryConj, PolyLinear, PolySign, Identity, Conjugation>;

  static AdditiveCore identity() { return AdditiveCore(Identity{}); }
  static AdditiveCore conjugation() { return AdditiveCore(Conjugation{}); }
  /// Matrices: dense random operator on the entry space. Polynomials:
  /// random multipliers on degrees 1..2*poly_degrees-1.
  static AdditiveCore random_linear(const AlgebraContext& ctx, std::uint64_t seed, int poly_degrees = 8);
  /// Throws SingularS unless the condition estimate of S is <= 1e3.
  static AdditiveCore similarity(const Matrix& S);
  /// Throws PreconditionViolated unless U is unitary to 1e-10.
  static AdditiveCore unitary_conj(const Matrix& U);
  static AdditiveCore random_unitary_conj(const AlgebraContext& ctx, std::uint64_t seed);
  /// A ternary homomorphism for σ ∈ {1, −1} because σ³ = σ.
  static AdditiveCore poly_sign(double sigma, Scalar c);
  static AdditiveCore poly_linear(std::map<std::int64_t, Scalar> multipliers, Scalar fallback = Scalar(1.0));

  const Kind& kind() const noexcept { return kind_; }
  Element apply(const AlgebraContext& ctx, const Element& x) const;
  std::string label() const;

 private:
  explicit AdditiveCore(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

enum class PerturbationKind { Power, Bounded };

/// Where the perturbation may be nonzero. OffDiagonal scales with the
/// off-diagonal part of a matrix (terms above degree 1 for polynomials),
/// so it vanishes on diagonal matrices.
enum class PerturbationSupport { Everywhere, OffDiagonal };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::Power;
  double delta = 0.0;
  double p = 0.5;
  std::uint64_t seed = 0;
  PerturbationSupport support = PerturbationSupport::Everywhere;
  /// Draw the hashed unit directions with zero imaginary parts.
  bool real_directions = false;
  /// Use this direction (normalized) everywhere instead of hashing.
  std::optional<Element> fixed_direction;
};

/// Unit-norm direction derived from hash(seed, x/‖x‖ rounded to 6
/// decimals), so positive rescalings of x share their direction.
Element hashed_direction(const AlgebraContext& ctx, std::uint64_t seed, const Element& x, bool real_only);

/// b(x) = δ·m(x)^p·û(x) (Power) or δ·û(x) (Bounded), where m is ‖x‖ or the
/// norm of the supported part; b = 0 wherever m = 0.
Element perturbation(const AlgebraContext& ctx, const PerturbationSpec& spec, const Element& x);

/// f = core + b.
ProbeFunction make_probe(const AdditiveCore& core, const PerturbationSpec& spec, const AlgebraContext& ctx);

struct HomSimilarity {
  Matrix S;
};
struct HomUnitaryConj {
  Matrix U;
};
struct HomPolySign {
  double sigma;
  Scalar c;
};
using HomSpec = std::variant<HomSimilarity, HomUnitaryConj, HomPolySign>;

/// Exact ternary homomorphism. Throws SingularS for an ill-conditioned
/// similarity and PreconditionViolated when σ ∉ {1, −1} or the map kind does
/// not fit the algebra.
ProbeFunction make_exact_hom(const AlgebraContext& ctx, const HomSpec& spec);

struct CalibrationShape {
  enum class Slots { Two, Five };
  Slots slots = Slots::Two;
  double p = 0.5;
};

struct CalibrationOptions {
  bool real_samples = false;
  /// Entry scale of the sampled tuples.
  double sample_scale = 1.0;
  ResidualSign sign = ResidualSign::Subtract;
  double safety_factor = 1.05;
};

struct Calibration {
  double eps = 0.0;
  double sup_ratio = 0.0;
  double safety_factor = 1.05;
  std::size_t samples_used = 0;
  std::size_t excluded = 0;
};

/// ε = safety·sup(residual / Σ‖argᵢ‖^p) over `sample_budget` seeded tuples.
/// Every fourth tuple zeroes one Jensen argument (or, for five slots, the
/// (u, v, w) or (x, y) group) so the proof's specializations are covered;
/// five-slot tuples cycle μ through 1, i and random unit scalars. Tuples
/// with denominator < 1e-12 are skipped. Throws InvalidParams for a budget
/// below 1000 and DenominatorDegenerate when every tuple is skipped.
Calibration calibrate_epsilon(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                              const CalibrationShape& shape, std::size_t sample_budget, std::uint64_t seed,
                              const CalibrationOptions& options = {});

}  // namespace hyerslab
