#include "hyerslab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "hyerslab/error.hpp"
#include "hyerslab/parallel.hpp"
#include "hyerslab/random.hpp"

namespace hyerslab {

namespace {

constexpr double kMaxCondition = 1e3;
constexpr double kDirectionQuantum = 1e6;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const Matrix& matrix_arg(const AlgebraContext& ctx, const Element& x) {
  ctx.require(x);
  if (ctx.kind() != AlgebraKind::MatrixTrivial) throw Error(ErrorCode::ContextMismatch, "core acts on matrices");
  return std::get<Matrix>(x);
}

const OddPoly& poly_arg(const AlgebraContext& ctx, const Element& x) {
  ctx.require(x);
  if (ctx.kind() != AlgebraKind::OddPolynomial) throw Error(ErrorCode::ContextMismatch, "core acts on polynomials");
  return std::get<OddPoly>(x);
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Scalar(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  return m;
}

std::uint64_t quantize(double v) { return static_cast<std::uint64_t>(std::llround(v * kDirectionQuantum)); }

Element supported_part(const AlgebraContext& ctx, PerturbationSupport support, const Element& x) {
  if (support == PerturbationSupport::Everywhere) return x;
  if (ctx.kind() == AlgebraKind::MatrixTrivial) {
    Matrix m = std::get<Matrix>(x);
    m.diagonal().setZero();
    return m;
  }
  OddPoly::Terms terms = std::get<OddPoly>(x).terms();
  terms.erase(1);
  return OddPoly(std::move(terms));
}

}  // namespace

AdditiveCore AdditiveCore::random_linear(const AlgebraContext& ctx, std::uint64_t seed, int poly_degrees) {
  SplitMix64 rng(seed);
  if (ctx.kind() == AlgebraKind::MatrixTrivial) {
    const Eigen::Index n = static_cast<Eigen::Index>(ctx.dim()) * ctx.dim();
    return AdditiveCore(MatrixLinear{random_matrix(n, n, rng)});
  }
  std::map<std::int64_t, Scalar> multipliers;
  for (int k = 0; k < poly_degrees; ++k) {
    multipliers[2 * k + 1] = Scalar(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  return AdditiveCore(PolyLinear{std::move(multipliers), Scalar(1.0)});
}

AdditiveCore AdditiveCore::similarity(const Matrix& S) {
  if (S.rows() != S.cols() || S.rows() == 0) throw Error(ErrorCode::SingularS, "S must be square");
  const Eigen::JacobiSVD<Matrix> svd(S);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > kMaxCondition) {
    throw Error(ErrorCode::SingularS, "condition estimate of S exceeds 1e3");
  }
  return AdditiveCore(Similarity{S, S.fullPivLu().inverse()});
}

AdditiveCore AdditiveCore::unitary_conj(const Matrix& U) {
  if (U.rows() != U.cols()) throw Error(ErrorCode::PreconditionViolated, "U must be square");
  const Matrix gram = U.adjoint() * U;
  if ((gram - Matrix::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::PreconditionViolated, "U is not unitary");
  }
  return AdditiveCore(UnitaryConj{U});
}

AdditiveCore AdditiveCore::random_unitary_conj(const AlgebraContext& ctx, std::uint64_t seed) {
  if (ctx.kind() != AlgebraKind::MatrixTrivial) throw Error(ErrorCode::ContextMismatch, "unitary core needs matrices");
  SplitMix64 rng(seed);
  const Matrix a = random_matrix(ctx.dim(), ctx.dim(), rng);
  Matrix q = a.householderQr().householderQ();
  return unitary_conj(q);
}

AdditiveCore AdditiveCore::poly_sign(double sigma, Scalar c) {
  if (sigma != 1.0 && sigma != -1.0) throw Error(ErrorCode::PreconditionViolated, "sigma must be +1 or -1");
  return AdditiveCore(PolySign{sigma, c});
}

AdditiveCore AdditiveCore::poly_linear(std::map<std::int64_t, Scalar> multipliers, Scalar fallback) {
  return AdditiveCore(PolyLinear{std::move(multipliers), fallback});
}

Element AdditiveCore::apply(const AlgebraContext& ctx, const Element& x) const {
  return std::visit(
      overloaded{
          [&](const MatrixLinear& k) -> Element {
            const Matrix& m = matrix_arg(ctx, x);
            const Eigen::Index n = m.rows();
            const Eigen::Map<const Eigen::VectorXcd> flat(m.data(), n * n);
            Matrix out(n, n);
            Eigen::Map<Eigen::VectorXcd>(out.data(), n * n) = k.op * flat;
            return out;
          },
          [&](const Similarity& k) -> Element { return Matrix(k.S * matrix_arg(ctx, x) * k.S_inv); },
          [&](const UnitaryConj& k) -> Element { return Matrix(k.U * matrix_arg(ctx, x) * k.U.adjoint()); },
          [&](const PolyLinear& k) -> Element {
            OddPoly::Terms terms = poly_arg(ctx, x).terms();
            for (auto& [d, c] : terms) {
              auto it = k.multipliers.find(d);
              c *= it == k.multipliers.end() ? k.fallback : it->second;
            }
            return OddPoly(std::move(terms));
          },
          [&](const PolySign& k) -> Element {
            OddPoly::Terms terms = poly_arg(ctx, x).terms();
            for (auto& [d, c] : terms) c *= k.sigma * std::pow(k.c, static_cast<double>(d));
            return OddPoly(std::move(terms));
          },
          [&](const Identity&) -> Element {
            ctx.require(x);
            return x;
          },
          [&](const Conjugation&) -> Element {
            ctx.require(x);
            if (const auto* m = std::get_if<Matrix>(&x)) return Matrix(m->conjugate());
            OddPoly::Terms terms = std::get<OddPoly>(x).terms();
            for (auto& [d, c] : terms) c = std::conj(c);
            return OddPoly(std::move(terms));
          },
      },
      kind_);
}

std::string AdditiveCore::label() const {
  return std::visit(overloaded{
                        [](const MatrixLinear&) { return std::string("linear"); },
                        [](const Similarity&) { return std::string("similarity"); },
                        [](const UnitaryConj&) { return std::string("unitary_conj"); },
                        [](const PolyLinear&) { return std::string("poly_linear"); },
                        [](const PolySign&) { return std::string("poly_sign"); },
                        [](const Identity&) { return std::string("identity"); },
                        [](const Conjugation&) { return std::string("conjugation"); },
                    },
                    kind_);
}

Element hashed_direction(const AlgebraContext& ctx, std::uint64_t seed, const Element& x, bool real_only) {
  const double n = norm(ctx, x);
  if (n == 0.0) throw Error(ErrorCode::InvalidParams, "the zero element has no direction");
  std::uint64_t h = hash_combine(seed, 0x6479726563746eULL);
  Element raw = zero(ctx);
  if (const auto* m = std::get_if<Matrix>(&x)) {
    for (Eigen::Index k = 0; k < m->size(); ++k) {
      h = hash_combine(h, quantize(m->data()[k].real() / n));
      h = hash_combine(h, quantize(m->data()[k].imag() / n));
    }
    SplitMix64 rng(h);
    raw = random_element(ctx, rng, ElementSampling{real_only});
  } else {
    const auto& terms = std::get<OddPoly>(x).terms();
    for (const auto& [d, c] : terms) {
      h = hash_combine(h, static_cast<std::uint64_t>(d));
      h = hash_combine(h, quantize(c.real() / n));
      h = hash_combine(h, quantize(c.imag() / n));
    }
    SplitMix64 rng(h);
    OddPoly::Terms out;
    for (const auto& [d, c] : terms) {
      // keep the direction on x's support so b never raises the degree
      Scalar coeff(rng.uniform(-1.0, 1.0), real_only ? 0.0 : rng.uniform(-1.0, 1.0));
      if (coeff == Scalar(0.0)) coeff = 1.0;
      out[d] = coeff;
    }
    raw = OddPoly(std::move(out));
  }
  return scalar_mul(ctx, 1.0 / norm(ctx, raw), raw);
}

Element perturbation(const AlgebraContext& ctx, const PerturbationSpec& spec, const Element& x) {
  ctx.require(x);
  if (spec.delta == 0.0) return zero(ctx);
  const double m = norm(ctx, supported_part(ctx, spec.support, x));
  if (m == 0.0) return zero(ctx);
  const double magnitude = spec.kind == PerturbationKind::Power ? spec.delta * std::pow(m, spec.p) : spec.delta;
  Element direction = spec.fixed_direction ? *spec.fixed_direction : hashed_direction(ctx, spec.seed, x, spec.real_directions);
  if (spec.fixed_direction) direction = scalar_mul(ctx, 1.0 / norm(ctx, direction), direction);
  return scalar_mul(ctx, magnitude, direction);
}

ProbeFunction make_probe(const AdditiveCore& core, const PerturbationSpec& spec, const AlgebraContext& ctx) {
  if (!(spec.delta >= 0.0)) throw Error(ErrorCode::InvalidParams, "perturbation delta must be >= 0");
  if (spec.fixed_direction) {
    ctx.require(*spec.fixed_direction);
    if (is_zero(*spec.fixed_direction)) throw Error(ErrorCode::InvalidParams, "fixed direction is zero");
  }
  std::string label = core.label();
  if (spec.delta > 0.0) {
    label += spec.kind == PerturbationKind::Power ? "+power" : "+bounded";
  }
  return ProbeFunction(
      ctx, [core, spec, ctx](const Element& x) { return add(ctx, core.apply(ctx, x), perturbation(ctx, spec, x)); },
      label);
}

ProbeFunction make_exact_hom(const AlgebraContext& ctx, const HomSpec& spec) {
  const AdditiveCore core = std::visit(
      overloaded{
          [&](const HomSimilarity& h) {
            if (ctx.kind() != AlgebraKind::MatrixTrivial || h.S.rows() != ctx.dim()) {
              throw Error(ErrorCode::PreconditionViolated, "similarity does not fit the algebra");
            }
            return AdditiveCore::similarity(h.S);
          },
          [&](const HomUnitaryConj& h) {
            if (ctx.kind() != AlgebraKind::MatrixTrivial || h.U.rows() != ctx.dim()) {
              throw Error(ErrorCode::PreconditionViolated, "unitary does not fit the algebra");
            }
            return AdditiveCore::unitary_conj(h.U);
          },
          [&](const HomPolySign& h) {
            if (ctx.kind() != AlgebraKind::OddPolynomial) {
              throw Error(ErrorCode::PreconditionViolated, "poly_sign needs the odd-polynomial algebra");
            }
            return AdditiveCore::poly_sign(h.sigma, h.c);
          },
      },
      spec);
  return ProbeFunction(ctx, [core, ctx](const Element& x) { return core.apply(ctx, x); }, core.label());
}

Calibration calibrate_epsilon(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                              const CalibrationShape& shape, std::size_t sample_budget, std::uint64_t seed,
                              const CalibrationOptions& options) {
  if (sample_budget < 1000) throw Error(ErrorCode::InvalidParams, "calibration needs at least 1000 samples");
  const ElementSampling sampling{options.real_samples, options.sample_scale};
  auto power_sum = [&](std::initializer_list<const Element*> args) {
    double total = 0.0;
    for (const Element* a : args) {
      const double n = norm(ctx, *a);
      if (n > 0.0) total += std::pow(n, shape.p);
    }
    return total;
  };

  // ratio per tuple, or -1 when the tuple is excluded
  std::vector<double> ratios(sample_budget, -1.0);
  parallel_for(sample_budget, [&](std::size_t i) {
    SplitMix64 rng(hash_combine(seed, i));
    const Element zero_el = zero(ctx);
    Element x = random_element(ctx, rng, sampling);
    Element y = random_element(ctx, rng, sampling);
    double residual = 0.0;
    double denom = 0.0;
    if (shape.slots == CalibrationShape::Slots::Two) {
      if (i % 4 == 0) y = zero_el;
      if (i % 4 == 1) x = zero_el;
      residual = jensen_residual(f, params, ctx, x, y);
      denom = power_sum({&x, &y});
    } else {
      Element u = random_element(ctx, rng, sampling);
      Element v = random_element(ctx, rng, sampling);
      Element w = random_element(ctx, rng, sampling);
      Scalar mu(1.0);
      if (i % 4 == 1) mu = Scalar(0.0, 1.0);
      if (i % 4 >= 2) mu = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
      if ((i / 4) % 3 == 1) u = v = w = zero_el;
      if ((i / 4) % 3 == 2) x = y = zero_el;
      residual = hom_residual(f, params, ctx, mu, x, y, u, v, w, options.sign);
      denom = power_sum({&x, &y, &u, &v, &w});
    }
    if (denom >= 1e-12) ratios[i] = residual / denom;
  });

  Calibration out;
  out.safety_factor = options.safety_factor;
  for (double q : ratios) {
    if (q < 0.0) {
      ++out.excluded;
      continue;
    }
    ++out.samples_used;
    out.sup_ratio = std::max(out.sup_ratio, q);
  }
  if (out.samples_used == 0) throw Error(ErrorCode::DenominatorDegenerate, "every calibration tuple was excluded");
  out.eps = out.sup_ratio * options.safety_factor;
  return out;
}

}  // namespace hyerslab
