#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>

#include <Eigen/Core>

#include "json.hpp"

#include "hyerslab/random.hpp"

namespace hyerslab {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Polynomial in one variable with odd positive degrees only. Zero
/// coefficients are never stored, so the empty map is the zero polynomial.
class OddPoly {
 public:
  using Terms = std::map<std::int64_t, Scalar>;

  OddPoly() = default;
  /// Throws InvalidElement on even/non-positive degrees or non-finite
  /// coefficients; exact zeros are dropped.
  explicit OddPoly(Terms terms);

  static OddPoly monomial(std::int64_t degree, Scalar coeff = Scalar(1.0));

  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  Scalar coeff(std::int64_t degree) const;

  friend bool operator==(const OddPoly&, const OddPoly&) = default;

 private:
  Terms terms_;
};

using Element = std::variant<Matrix, OddPoly>;

enum class AlgebraKind { MatrixTrivial, OddPolynomial };
enum class NormKind { Frobenius, CoefficientL1 };

/// A concrete Banach ternary algebra: square complex matrices with
/// [abc] = abc, or odd polynomials with [pqr] = pqr.
class AlgebraContext {
 public:
  static constexpr std::size_t kDefaultMaxTerms = 100000;

  static AlgebraContext matrix(int dim);
  static AlgebraContext odd_polynomial(std::size_t max_terms = kDefaultMaxTerms);

  AlgebraKind kind() const noexcept { return kind_; }
  NormKind norm_kind() const noexcept {
    return kind_ == AlgebraKind::MatrixTrivial ? NormKind::Frobenius : NormKind::CoefficientL1;
  }
  int dim() const noexcept { return dim_; }
  std::size_t max_terms() const noexcept { return max_terms_; }

  bool contains(const Element& a) const noexcept;
  /// Throws ContextMismatch unless `contains(a)`.
  void require(const Element& a) const;

 private:
  AlgebraContext(AlgebraKind kind, int dim, std::size_t max_terms)
      : kind_(kind), dim_(dim), max_terms_(max_terms) {}

  AlgebraKind kind_;
  int dim_;
  std::size_t max_terms_;
};

Element zero(const AlgebraContext& ctx);
/// Unit of the matrix algebra. The odd-polynomial algebra has none
/// (throws IdentityViolation).
Element identity(const AlgebraContext& ctx);
bool is_zero(const Element& a) noexcept;

Element add(const AlgebraContext& ctx, const Element& a, const Element& b);
Element sub(const AlgebraContext& ctx, const Element& a, const Element& b);
Element scalar_mul(const AlgebraContext& ctx, Scalar lambda, const Element& a);
Element ternary_product(const AlgebraContext& ctx, const Element& a, const Element& b, const Element& c);

/// Frobenius norm for matrices, sum of coefficient moduli for polynomials.
double norm(const AlgebraContext& ctx, const Element& a);

double distance(const AlgebraContext& ctx, const Element& a, const Element& b);

/// max(‖[[abc]de] − [a[bcd]e]‖, ‖[a[bcd]e] − [ab[cde]]‖)
double check_ternary_associativity(const AlgebraContext& ctx, const Element& a, const Element& b,
                                   const Element& c, const Element& d, const Element& e);

/// max(‖[aee] − a‖, ‖[eea] − a‖) for the probe a.
double check_identity(const AlgebraContext& ctx, const Element& e, const Element& probe);

/// Binary product a ⊙ b := [aeb] induced by a ternary identity e. Throws
/// IdentityViolation if e fails the identity check on a or b beyond
/// tol_identity·(1 + ‖probe‖).
Element binary_from_identity(const AlgebraContext& ctx, const Element& e, const Element& a,
                             const Element& b, double tol_identity = 1e-10);

/// Worst violation among (a⊙b)⊙c = a⊙(b⊙c), a⊙e = a and e⊙a = a for the
/// binary product induced by e.
double check_binary_bridge(const AlgebraContext& ctx, const Element& e, const Element& a,
                           const Element& b, const Element& c);

struct ElementSampling {
  bool real_only = false;
  double scale = 1.0;
  /// Odd degrees drawn for polynomial samples are 1, 3, ..., 2*max_poly_terms-1.
  int max_poly_terms = 4;
};

/// Entries (or coefficients) uniform in [-scale, scale] for both real and
/// imaginary parts; polynomial supports are random nonempty subsets.
Element random_element(const AlgebraContext& ctx, SplitMix64& rng, const ElementSampling& sampling = {});

/// Matrices: row-major nested arrays of [re, im]; polynomials: object
/// keyed by decimal degree with [re, im] values.
nlohmann::json to_json(const Element& a);
Element element_from_json(const AlgebraContext& ctx, const nlohmann::json& j);

}  // namespace hyerslab
