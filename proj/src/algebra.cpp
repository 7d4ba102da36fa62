#include "hyerslab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyerslab/error.hpp"

namespace hyerslab {

namespace {

bool finite(Scalar z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

const Matrix& as_matrix(const Element& a) { return std::get<Matrix>(a); }
const OddPoly& as_poly(const Element& a) { return std::get<OddPoly>(a); }

void check_size(const AlgebraContext& ctx, const OddPoly::Terms& terms) {
  if (terms.size() > ctx.max_terms()) {
    throw Error(ErrorCode::DegreeOverflow,
                std::to_string(terms.size()) + " terms exceeds cap " + std::to_string(ctx.max_terms()));
  }
}

OddPoly::Terms multiply(const OddPoly::Terms& p, const OddPoly::Terms& q) {
  OddPoly::Terms out;
  for (const auto& [dp, cp] : p) {
    for (const auto& [dq, cq] : q) {
      out[dp + dq] += cp * cq;
    }
  }
  return out;
}

// Degrees of p·q are even; multiplying by a third odd polynomial restores odd.
OddPoly triple(const AlgebraContext& ctx, const OddPoly& a, const OddPoly& b, const OddPoly& c) {
  OddPoly::Terms ab = multiply(a.terms(), b.terms());
  check_size(ctx, ab);
  OddPoly::Terms abc = multiply(ab, c.terms());
  check_size(ctx, abc);
  return OddPoly(std::move(abc));
}

}  // namespace

OddPoly::OddPoly(Terms terms) {
  for (const auto& [degree, c] : terms) {
    if (degree <= 0 || degree % 2 == 0) {
      throw Error(ErrorCode::InvalidElement, "odd polynomial with degree " + std::to_string(degree));
    }
    if (!finite(c)) {
      throw Error(ErrorCode::InvalidElement, "non-finite coefficient at degree " + std::to_string(degree));
    }
    if (c != Scalar(0.0)) terms_.emplace(degree, c);
  }
}

OddPoly OddPoly::monomial(std::int64_t degree, Scalar coeff) { return OddPoly(Terms{{degree, coeff}}); }

Scalar OddPoly::coeff(std::int64_t degree) const {
  auto it = terms_.find(degree);
  return it == terms_.end() ? Scalar(0.0) : it->second;
}

AlgebraContext AlgebraContext::matrix(int dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidParams, "matrix dimension must be >= 1");
  return AlgebraContext(AlgebraKind::MatrixTrivial, dim, 0);
}

AlgebraContext AlgebraContext::odd_polynomial(std::size_t max_terms) {
  if (max_terms < 1) throw Error(ErrorCode::InvalidParams, "max_terms must be >= 1");
  return AlgebraContext(AlgebraKind::OddPolynomial, 0, max_terms);
}

bool AlgebraContext::contains(const Element& a) const noexcept {
  if (kind_ == AlgebraKind::MatrixTrivial) {
    const auto* m = std::get_if<Matrix>(&a);
    return m != nullptr && m->rows() == dim_ && m->cols() == dim_;
  }
  return std::holds_alternative<OddPoly>(a);
}

void AlgebraContext::require(const Element& a) const {
  if (!contains(a)) {
    throw Error(ErrorCode::ContextMismatch,
                kind_ == AlgebraKind::MatrixTrivial ? "expected " + std::to_string(dim_) + "x" + std::to_string(dim_) + " matrix"
                                                   : std::string("expected odd polynomial"));
  }
}

Element zero(const AlgebraContext& ctx) {
  if (ctx.kind() == AlgebraKind::MatrixTrivial) return Matrix(Matrix::Zero(ctx.dim(), ctx.dim()));
  return OddPoly{};
}

Element identity(const AlgebraContext& ctx) {
  if (ctx.kind() != AlgebraKind::MatrixTrivial) {
    throw Error(ErrorCode::IdentityViolation, "the odd-polynomial ternary algebra has no identity");
  }
  return Matrix(Matrix::Identity(ctx.dim(), ctx.dim()));
}

bool is_zero(const Element& a) noexcept {
  if (const auto* m = std::get_if<Matrix>(&a)) return m->isZero(0.0);
  return std::get<OddPoly>(a).is_zero();
}

Element add(const AlgebraContext& ctx, const Element& a, const Element& b) {
  ctx.require(a);
  ctx.require(b);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) return Matrix(as_matrix(a) + as_matrix(b));
  OddPoly::Terms terms = as_poly(a).terms();
  for (const auto& [d, c] : as_poly(b).terms()) terms[d] += c;
  check_size(ctx, terms);
  return OddPoly(std::move(terms));
}

Element sub(const AlgebraContext& ctx, const Element& a, const Element& b) {
  ctx.require(a);
  ctx.require(b);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) return Matrix(as_matrix(a) - as_matrix(b));
  OddPoly::Terms terms = as_poly(a).terms();
  for (const auto& [d, c] : as_poly(b).terms()) terms[d] -= c;
  check_size(ctx, terms);
  return OddPoly(std::move(terms));
}

Element scalar_mul(const AlgebraContext& ctx, Scalar lambda, const Element& a) {
  ctx.require(a);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) return Matrix(lambda * as_matrix(a));
  OddPoly::Terms terms = as_poly(a).terms();
  for (auto& [d, c] : terms) c *= lambda;
  return OddPoly(std::move(terms));
}

Element ternary_product(const AlgebraContext& ctx, const Element& a, const Element& b, const Element& c) {
  ctx.require(a);
  ctx.require(b);
  ctx.require(c);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) {
    return Matrix(as_matrix(a) * as_matrix(b) * as_matrix(c));
  }
  return triple(ctx, as_poly(a), as_poly(b), as_poly(c));
}

double norm(const AlgebraContext& ctx, const Element& a) {
  ctx.require(a);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) return as_matrix(a).norm();
  double total = 0.0;
  for (const auto& [d, c] : as_poly(a).terms()) total += std::abs(c);
  return total;
}

double distance(const AlgebraContext& ctx, const Element& a, const Element& b) {
  return norm(ctx, sub(ctx, a, b));
}

double check_ternary_associativity(const AlgebraContext& ctx, const Element& a, const Element& b,
                                   const Element& c, const Element& d, const Element& e) {
  const Element left = ternary_product(ctx, ternary_product(ctx, a, b, c), d, e);
  const Element middle = ternary_product(ctx, a, ternary_product(ctx, b, c, d), e);
  const Element right = ternary_product(ctx, a, b, ternary_product(ctx, c, d, e));
  return std::max(distance(ctx, left, middle), distance(ctx, middle, right));
}

double check_identity(const AlgebraContext& ctx, const Element& e, const Element& probe) {
  return std::max(distance(ctx, ternary_product(ctx, probe, e, e), probe),
                  distance(ctx, ternary_product(ctx, e, e, probe), probe));
}

Element binary_from_identity(const AlgebraContext& ctx, const Element& e, const Element& a,
                             const Element& b, double tol_identity) {
  for (const Element* probe : {&a, &b}) {
    const double violation = check_identity(ctx, e, *probe);
    if (violation > tol_identity * (1.0 + norm(ctx, *probe))) {
      throw Error(ErrorCode::IdentityViolation, "identity check failed by " + std::to_string(violation));
    }
  }
  return ternary_product(ctx, a, e, b);
}

double check_binary_bridge(const AlgebraContext& ctx, const Element& e, const Element& a,
                           const Element& b, const Element& c) {
  auto dot = [&](const Element& x, const Element& y) { return ternary_product(ctx, x, e, y); };
  const double assoc = distance(ctx, dot(dot(a, b), c), dot(a, dot(b, c)));
  const double right_unit = distance(ctx, dot(a, e), a);
  const double left_unit = distance(ctx, dot(e, a), a);
  return std::max({assoc, right_unit, left_unit});
}

Element random_element(const AlgebraContext& ctx, SplitMix64& rng, const ElementSampling& sampling) {
  auto draw = [&]() {
    const double re = rng.uniform(-sampling.scale, sampling.scale);
    const double im = sampling.real_only ? 0.0 : rng.uniform(-sampling.scale, sampling.scale);
    return Scalar(re, im);
  };
  if (ctx.kind() == AlgebraKind::MatrixTrivial) {
    Matrix m(ctx.dim(), ctx.dim());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = draw();
    }
    return m;
  }
  const int slots = std::max(1, sampling.max_poly_terms);
  OddPoly::Terms terms;
  while (terms.empty()) {
    for (int k = 0; k < slots; ++k) {
      if (rng.uniform01() < 0.75) terms[2 * k + 1] = draw();
    }
  }
  return OddPoly(std::move(terms));
}

nlohmann::json to_json(const Element& a) {
  if (const auto* m = std::get_if<Matrix>(&a)) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m->cols(); ++j) row.push_back({(*m)(i, j).real(), (*m)(i, j).imag()});
      rows.push_back(std::move(row));
    }
    return rows;
  }
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [d, c] : std::get<OddPoly>(a).terms()) obj[std::to_string(d)] = {c.real(), c.imag()};
  return obj;
}

namespace {

Scalar scalar_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Scalar(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::InvalidElement, "scalar must be [re, im]");
  }
  Scalar z(j[0].get<double>(), j[1].get<double>());
  if (!finite(z)) throw Error(ErrorCode::InvalidElement, "non-finite scalar");
  return z;
}

}  // namespace

Element element_from_json(const AlgebraContext& ctx, const nlohmann::json& j) {
  if (ctx.kind() == AlgebraKind::MatrixTrivial) {
    const auto n = static_cast<std::size_t>(ctx.dim());
    if (!j.is_array() || j.size() != n) throw Error(ErrorCode::InvalidElement, "matrix must have dim rows");
    Matrix m(ctx.dim(), ctx.dim());
    for (std::size_t i = 0; i < n; ++i) {
      if (!j[i].is_array() || j[i].size() != n) throw Error(ErrorCode::InvalidElement, "matrix row has wrong length");
      for (std::size_t k = 0; k < n; ++k) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = scalar_from_json(j[i][k]);
      }
    }
    return m;
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidElement, "polynomial must be a {degree: [re, im]} object");
  OddPoly::Terms terms;
  for (const auto& [key, value] : j.items()) {
    std::size_t pos = 0;
    std::int64_t degree = 0;
    try {
      degree = std::stoll(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != key.size()) throw Error(ErrorCode::InvalidElement, "bad degree key '" + key + "'");
    terms[degree] = scalar_from_json(value);
  }
  return OddPoly(std::move(terms));
}

}  // namespace hyerslab
