#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hyerslab/error.hpp"
#include "hyerslab/hyers.hpp"
#include "hyerslab/perturb.hpp"

using namespace hyerslab;

namespace {

const AlgebraContext kScalar = AlgebraContext::matrix(1);

Element scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

double value(const Element& e) { return std::get<Matrix>(e)(0, 0).real(); }

// f(x) = x + δ|x|^p with a fixed real direction: every Hyers quantity has a
// closed form, which the tests use as the oracle.
ProbeFunction power_probe(double delta, double p) {
  PerturbationSpec spec;
  spec.delta = delta;
  spec.p = p;
  spec.fixed_direction = scalar(1.0);
  return make_probe(AdditiveCore::identity(), spec, kScalar);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

std::vector<Element> scalar_samples() {
  std::vector<Element> out;
  for (double v : {0.01, 0.3, 1.0, 2.0, 4.0, 17.0, 250.0}) out.push_back(scalar(v));
  return out;
}

}  // namespace

TEST(JensenParams, Validation) {
  EXPECT_EQ(code_of([] { JensenParams(2, 2, 1); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { JensenParams(0, 1, 1); }), ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] { JensenParams(2, 1, 2, Direction::Forward, Pivot::T); }), ErrorCode::InvalidParams);
  const JensenParams p(3, 1, 2, Direction::Forward, Pivot::T);
  EXPECT_EQ(p.pivot_coefficient(), 2);
  EXPECT_EQ(p.pivot_slot(), 1);
  EXPECT_DOUBLE_EQ(p.ratio(), 1.5);
}

TEST(RatioPower, ExactForPowersOfTwoAndAccurateOtherwise) {
  for (int n = 0; n <= 60; ++n) {
    EXPECT_EQ(ratio_power(2, 1, n), std::ldexp(1.0, n));
    EXPECT_EQ(ratio_power(1, 2, n), std::ldexp(1.0, -n));
  }
  for (int n = 0; n <= 40; ++n) {
    const long double want = std::pow(1.5L, n);
    EXPECT_NEAR(ratio_power(3, 2, n), static_cast<double>(want), 1e-15 * static_cast<double>(want));
  }
  EXPECT_DOUBLE_EQ(ratio_power(3, 2, -2), 4.0 / 9.0);
}

TEST(ProbeFunction, EnforcesZeroAtOrigin) {
  const ProbeFunction f(kScalar, [](const Element& x) { return scalar(value(x) + 3.0); }, "offset");
  EXPECT_EQ(value(f(scalar(0.0))), 0.0);
  EXPECT_EQ(value(f(scalar(2.0))), 2.0);
}

TEST(ProbeFunction, OutputOutsideAlgebraIsEvaluationFailure) {
  const auto ctx = AlgebraContext::matrix(2);
  const ProbeFunction f(
      ctx, [](const Element& x) { return std::get<Matrix>(x)(0, 0) == 0.0 ? x : Element(Matrix::Zero(3, 3)); }, "bad");
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 1.0;
  EXPECT_EQ(code_of([&] { f(x); }), ErrorCode::EvaluationFailure);
}

TEST(JensenResidual, ZeroForAdditiveMaps) {
  const auto ctx = AlgebraContext::matrix(3);
  const auto core = AdditiveCore::random_linear(ctx, 4);
  const ProbeFunction f(ctx, [&](const Element& x) { return core.apply(ctx, x); }, "core");
  SplitMix64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Element x = random_element(ctx, rng);
    const Element y = random_element(ctx, rng);
    EXPECT_LE(jensen_residual(f, JensenParams(3, 1, 2), ctx, x, y), 1e-13);
  }
}

TEST(JensenResidual, ScalarClosedForm) {
  const auto f = power_probe(0.1, 0.5);
  const JensenParams params(2, 1, 1);
  // 2 f(x/2) − f(x) for y = 0 is δ|x|^p (2^(1−p) − 1)
  EXPECT_NEAR(jensen_residual(f, params, kScalar, scalar(4.0), scalar(0.0)), 0.1 * 2.0 * (std::sqrt(2.0) - 1.0),
              1e-15);
  // y = −x: 2 f(0) − f(x) − f(−x) = −2δ|x|^p
  EXPECT_NEAR(jensen_residual(f, params, kScalar, scalar(4.0), scalar(-4.0)), 0.4, 1e-15);
}

TEST(HyersIterate, MatchesClosedFormAndHonoursCap) {
  const auto f = power_probe(0.1, 0.5);
  const JensenParams params(2, 1, 1);
  for (int n : {0, 1, 7, 30}) {
    const double want = 4.0 + 0.1 * std::pow(2.0, n * (0.5 - 1.0)) * 2.0;
    EXPECT_NEAR(value(hyers_iterate(f, params, kScalar, scalar(4.0), n)), want, 1e-15);
  }
  EXPECT_EQ(code_of([&] { hyers_iterate(f, params, kScalar, scalar(4.0), 65); }), ErrorCode::CapExceeded);
  EXPECT_EQ(code_of([&] { hyers_iterate(f, params, kScalar, scalar(4.0), 5, 4); }), ErrorCode::CapExceeded);
}

TEST(HyersLimit, ForwardRecoversCoreAndBoundIsTight) {
  // The derivation only uses y = 0, where the residual is exactly
  // δ(√2 − 1)|x|^p; with that ε the telescoping bound equals δ|x|^p, which
  // is also the exact deviation f(x) − x.
  const double delta = 0.1;
  const auto f = power_probe(delta, 0.5);
  const JensenParams params(2, 1, 1);
  const auto phi = ControlFunction::power(delta * (std::sqrt(2.0) - 1.0), 0.5);
  const auto samples = scalar_samples();
  HyersOptions options;
  options.tol = 1e-9;
  const HyersResult limit = hyers_limit(f, params, kScalar, phi, samples, options);
  ASSERT_TRUE(limit.certified());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = value(samples[i]);
    EXPECT_NEAR(value(limit.limit_at[i]), x, 1e-9);
    EXPECT_LE(limit.tail_bound[i], 1e-9);
  }
  const StabilityReport report = verify_stability_bound(f, limit, phi, params, kScalar, samples, options);
  ASSERT_TRUE(report.passed());
  for (const auto& row : report.rows) {
    EXPECT_NEAR(row.residual, delta * std::sqrt(row.x_norm), 1e-9);
    EXPECT_NEAR(row.bound_app, delta * std::sqrt(row.x_norm), 1e-12 * (1.0 + row.bound_app));
    EXPECT_GT(row.bound_phitilde, row.bound_app);
  }
}

TEST(HyersLimit, NUsedMatchesGeometricTail) {
  // tail after n terms: a0 q^n / (1 − q) with q = 2^-0.5 and
  // a0 = (1/2) ε (2|x|)^0.5, so the first n with tail <= tol is explicit.
  const double eps = 0.05;
  const auto f = power_probe(0.1, 0.5);
  const JensenParams params(2, 1, 1);
  const auto phi = ControlFunction::power(eps, 0.5);
  for (double x : {0.5, 3.0, 100.0}) {
    const LimitPoint pt = hyers_limit(f, params, kScalar, phi, scalar(x));
    const double q = std::pow(2.0, -0.5);
    const double a0 = 0.5 * eps * std::sqrt(2.0 * x);
    int n = 0;
    while (a0 * std::pow(q, n) / (1.0 - q) > 1e-6) ++n;
    EXPECT_EQ(pt.n_used, n) << x;
    EXPECT_TRUE(pt.certified);
  }
}

TEST(HyersLimit, BackwardRecoversCore) {
  // f(x) = x + δx² with y = 0 residual δx²/2: ε = δ/2 and the backward
  // telescoping bound 2εx² = δx² is again exact.
  const double delta = 0.1;
  const auto f = power_probe(delta, 2.0);
  const JensenParams params(2, 1, 1, Direction::Backward);
  const auto phi = ControlFunction::power(delta / 2.0, 2.0);
  const auto samples = scalar_samples();
  HyersOptions options;
  options.tol = 1e-9;
  const HyersResult limit = hyers_limit(f, params, kScalar, phi, samples, options);
  ASSERT_TRUE(limit.certified());
  const StabilityReport report = verify_stability_bound(f, limit, phi, params, kScalar, samples, options);
  EXPECT_TRUE(report.passed());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = value(samples[i]);
    EXPECT_NEAR(value(limit.limit_at[i]), x, 1e-9 * (1.0 + x));
    EXPECT_NEAR(report.rows[i].bound_app, delta * x * x, 1e-12 * (1.0 + delta * x * x));
  }
}

TEST(HyersLimit, CapReachedIsNotCertified) {
  const auto f = power_probe(0.1, 0.5);
  const JensenParams params(2, 1, 1);
  const auto phi = ControlFunction::power(0.05, 0.5);
  HyersOptions options;
  options.n_cap = 5;
  const Element x[] = {scalar(3.0)};
  const HyersResult limit = hyers_limit(f, params, kScalar, phi, x, options);
  EXPECT_FALSE(limit.certified());
  EXPECT_EQ(limit.n_used[0], 5);
  EXPECT_EQ(code_of([&] { verify_stability_bound(f, limit, phi, params, kScalar, x, options); }),
            ErrorCode::NotCertified);
}

TEST(HyersLimit, UnhintedSampledControlIsRefused) {
  const auto f = power_probe(0.1, 0.5);
  const auto phi = ControlFunction::sampled([](std::span<const double>) { return 1.0; }, 2, DecayHint::Unknown);
  EXPECT_EQ(code_of([&] { hyers_limit(f, JensenParams(2, 1, 1), kScalar, phi, scalar(1.0)); }),
            ErrorCode::TailNotCertifiable);
}

TEST(HyersLimit, DivergentRegimeIsReported) {
  const auto f = power_probe(0.1, 0.5);
  const auto phi = ControlFunction::power(0.1, 2.0);
  EXPECT_EQ(code_of([&] { hyers_limit(f, JensenParams(2, 1, 1), kScalar, phi, scalar(1.0)); }),
            ErrorCode::Divergent);
}

TEST(HyersLimit, PivotOnTUsesTheTSlot) {
  // r = 3, s = 1, t = 2 pivoting on t: the iteration ratio is 3/2.
  const auto ctx = AlgebraContext::matrix(2);
  const auto core = AdditiveCore::random_linear(ctx, 9);
  PerturbationSpec spec;
  spec.delta = 0.05;
  spec.seed = 3;
  const auto f = make_probe(core, spec, ctx);
  const JensenParams params(3, 1, 2, Direction::Forward, Pivot::T);
  const auto phi = ControlFunction::power(1.0, 0.5);
  // terms shrink by (2/3)·1.5^0.5 ≈ 0.82, so about 75 steps are needed
  HyersOptions options;
  options.n_cap = 128;
  SplitMix64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Element x = random_element(ctx, rng);
    const LimitPoint pt = hyers_limit(f, params, ctx, phi, x, options);
    EXPECT_TRUE(pt.certified);
    EXPECT_LE(distance(ctx, pt.value, core.apply(ctx, x)), 1e-6 * (1.0 + norm(ctx, x)));
  }
}

TEST(Uniqueness, ConstantControlAnchor) {
  const auto f = power_probe(0.0, 0.5);
  const JensenParams params(2, 1, 1);
  const auto phi = ControlFunction::constant(1.0);
  const Element x[] = {scalar(2.0)};
  const HyersResult limit = hyers_limit(f, params, kScalar, phi, x);
  const CheckReport report = verify_uniqueness(limit, limit, phi, params, kScalar, x, 0);
  ASSERT_EQ(report.rows().size(), 1u);
  EXPECT_NEAR(report.rows()[0].bound, 2.0 + 2.0 * limit.tail_bound[0], 1e-12);
  EXPECT_TRUE(report.passed());
}

TEST(Uniqueness, TwoSeedsShareTheLimit) {
  const auto ctx = AlgebraContext::matrix(2);
  const auto core = AdditiveCore::random_linear(ctx, 21);
  PerturbationSpec a;
  a.delta = 0.1;
  a.seed = 1;
  PerturbationSpec b = a;
  b.seed = 2;
  const auto fa = make_probe(core, a, ctx);
  const auto fb = make_probe(core, b, ctx);
  const JensenParams params(2, 1, 1);
  const auto phi = ControlFunction::power(1.0, 0.5);
  SplitMix64 rng(77);
  std::vector<Element> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(random_element(ctx, rng));
  const HyersResult la = hyers_limit(fa, params, ctx, phi, xs);
  const HyersResult lb = hyers_limit(fb, params, ctx, phi, xs);
  const CheckReport report = verify_uniqueness(la, lb, phi, params, ctx, xs, 6);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.count("uniqueness.j"), 20u * 7u);
  EXPECT_LE(report.max_value("uniqueness.tail_ratio"), std::pow(2.0, -0.5) + 1e-12);
}

TEST(Additivity, LinearPassesAndNonlinearFails) {
  const auto ctx = AlgebraContext::matrix(2);
  const auto core = AdditiveCore::random_linear(ctx, 3);
  SplitMix64 rng(8);
  std::vector<Element> xs;
  for (int i = 0; i < 30; ++i) xs.push_back(random_element(ctx, rng));
  EXPECT_TRUE(verify_additivity([&](const Element& x) { return core.apply(ctx, x); }, ctx, xs, 1e-12).passed());
  const auto square = [&](const Element& x) { return ternary_product(ctx, x, x, identity(ctx)); };
  EXPECT_FALSE(verify_additivity(square, ctx, xs, 1e-6).passed());
}
