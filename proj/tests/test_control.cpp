#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hyerslab/control.hpp"
#include "hyerslab/error.hpp"

using namespace hyerslab;

namespace {

// Brute-force oracle: sum the defining series term by term in long double
// with the argument norms rescaled explicitly.
long double brute_phi_tilde(double eps, double p, Direction dir, int r, int s, std::vector<double> norms,
                            int terms = 4000) {
  const long double ratio = static_cast<long double>(r) / s;
  long double sum = 0.0L;
  for (int n = 0; n < terms; ++n) {
    const long double arg = dir == Direction::Forward ? std::pow(ratio, n) : std::pow(ratio, -n);
    const long double weight = dir == Direction::Forward ? std::pow(ratio, -n) : std::pow(ratio, n);
    long double phi = 0.0L;
    for (double x : norms) {
      if (x > 0.0) phi += std::pow(arg * x, static_cast<long double>(p));
    }
    sum += weight * eps * phi;
  }
  return sum / (dir == Direction::Forward ? r : s);
}

long double brute_app(double eps, double p, int r, int s, double x, int terms = 4000) {
  const long double ratio = static_cast<long double>(r) / s;
  long double sum = 0.0L;
  for (int k = 0; k < terms; ++k) sum += std::pow(ratio, -k) * eps * std::pow(std::pow(ratio, k + 1) * x, (long double)p);
  return sum / r;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(PhiEval, Examples) {
  const double a[] = {4.0, 0.0};
  EXPECT_DOUBLE_EQ(phi_eval(ControlFunction::power(1.0, 0.5), a), 2.0);
  const double b[] = {7.0, 1e9};
  EXPECT_DOUBLE_EQ(phi_eval(ControlFunction::constant(0.3), b), 0.3);
  const double c[] = {1, 1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(phi_eval(ControlFunction::power(2.0, 1.0, 5), c), 10.0);
}

TEST(PhiEval, ZeroArgumentContributesNothingEvenForNegativeP) {
  const double a[] = {4.0, 0.0};
  EXPECT_DOUBLE_EQ(phi_eval(ControlFunction::power(1.0, -0.5), a), 0.5);
}

TEST(PhiEval, ArityMismatch) {
  const double a[] = {1.0, 2.0, 3.0};
  EXPECT_EQ(code_of([&] { phi_eval(ControlFunction::power(1.0, 0.5), a); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of([] { ControlFunction::power(1.0, 0.5, 3); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of([] { ControlFunction::power(-1.0, 0.5); }), ErrorCode::InvalidParams);
}

TEST(PhiTildeForward, ConstantIsGeometric) {
  const double x[] = {3.0, 5.0};
  for (double eps : {0.1, 1.0, 7.5}) {
    const SeriesValue v = phi_tilde_forward(ControlFunction::constant(eps), 2, 1, x);
    EXPECT_NEAR(v.value, eps, 1e-12 * eps);
    EXPECT_TRUE(v.certified);
  }
}

TEST(PhiTildeForward, ZeroControlIsZero) {
  const double x[] = {3.0, 5.0};
  const SeriesValue v = phi_tilde_forward(ControlFunction::power(0.0, 0.5), 2, 1, x);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.truncation_tail, 0.0);
}

TEST(PhiTildeForward, PowerAnchorMatchesOracle) {
  const double x[] = {1.0, 1.0};
  const SeriesValue v = phi_tilde_forward(ControlFunction::power(1.0, 0.5), 2, 1, x);
  EXPECT_NEAR(v.value, 3.414213562373095, 1e-10);
  const double oracle = static_cast<double>(brute_phi_tilde(1.0, 0.5, Direction::Forward, 2, 1, {1, 1}));
  // truncation leaves the true sum inside [value, value + tail]
  EXPECT_LE(v.value, oracle);
  EXPECT_GE(v.upper() * (1.0 + 1e-15), oracle);
}

TEST(PhiTildeForward, AgreesWithBruteForceOracleOnGrid) {
  for (auto [r, s] : {std::pair{2, 1}, {3, 1}, {3, 2}, {5, 2}}) {
    for (double p : {-0.5, 0.0, 0.25, 0.5, 0.75}) {
      for (double x : {0.1, 1.0, 10.0}) {
        const double norms[] = {x, 2.0 * x};
        const double got = phi_tilde_forward(ControlFunction::power(1.3, p), r, s, norms).upper();
        const double want = static_cast<double>(brute_phi_tilde(1.3, p, Direction::Forward, r, s, {x, 2 * x}));
        EXPECT_NEAR(got, want, 1e-11 * want) << r << ' ' << s << ' ' << p << ' ' << x;
      }
    }
  }
}

TEST(PhiTildeForward, DivergentRegimes) {
  const double x[] = {1.0, 1.0};
  EXPECT_EQ(code_of([&] { phi_tilde_forward(ControlFunction::power(1.0, 1.0), 2, 1, x); }), ErrorCode::Divergent);
  EXPECT_EQ(code_of([&] { phi_tilde_forward(ControlFunction::power(1.0, 2.0), 2, 1, x); }), ErrorCode::Divergent);
  EXPECT_EQ(code_of([&] { phi_tilde_forward(ControlFunction::constant(1.0), 1, 2, x); }), ErrorCode::Divergent);
}

TEST(PhiTildeBackward, Examples) {
  const double x[] = {1.0, 1.0};
  EXPECT_NEAR(phi_tilde_backward(ControlFunction::power(1.0, 2.0), 2, 1, x).value, 4.0, 1e-11);
  EXPECT_EQ(phi_tilde_backward(ControlFunction::power(0.0, 2.0), 2, 1, x).value, 0.0);
  EXPECT_EQ(code_of([&] { phi_tilde_backward(ControlFunction::constant(1.0), 2, 1, x); }), ErrorCode::Divergent);
}

TEST(PhiTildeBackward, AgreesWithBruteForceOracle) {
  for (auto [r, s] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const double norms[] = {0.7, 1.9};
      const double got = phi_tilde_backward(ControlFunction::power(0.4, p), r, s, norms).upper();
      const double want = static_cast<double>(brute_phi_tilde(0.4, p, Direction::Backward, r, s, {0.7, 1.9}));
      EXPECT_NEAR(got, want, 1e-11 * want);
    }
  }
}

TEST(Sampled, MatchingHintSumsAndFlagsNonCertified) {
  auto fn = [](std::span<const double> a) { return 0.5 * (std::sqrt(a[0]) + std::sqrt(a[1])); };
  const auto phi = ControlFunction::sampled(fn, 2, DecayHint::ForwardSummable);
  const double x[] = {1.0, 1.0};
  const SeriesValue v = phi_tilde_forward(phi, 2, 1, x);
  EXPECT_FALSE(v.certified);
  EXPECT_NEAR(v.upper(), 0.5 * 3.414213562373095, 1e-8);
}

TEST(Sampled, MissingHintIsNotCertifiable) {
  auto fn = [](std::span<const double>) { return 1.0; };
  const double x[] = {1.0, 1.0};
  EXPECT_EQ(code_of([&] { phi_tilde_forward(ControlFunction::sampled(fn, 2, DecayHint::Unknown), 2, 1, x); }),
            ErrorCode::TailNotCertifiable);
  EXPECT_EQ(
      code_of([&] { phi_tilde_forward(ControlFunction::sampled(fn, 2, DecayHint::BackwardSummable), 2, 1, x); }),
      ErrorCode::TailNotCertifiable);
}

TEST(ClosedForm, Examples) {
  EXPECT_NEAR(power_bound_closed_form(1.0, 0.5, 2, 1, 1.0), 3.414213562, 1e-9);
  EXPECT_EQ(power_bound_closed_form(0.0, 0.5, 2, 1, 1.0), 0.0);
  for (double x : {0.3, 1.0, 40.0}) {
    EXPECT_NEAR(power_bound_closed_form(1.0, 0.0, 2, 1, x), 2.0, 1e-15);
    const double norms[] = {x, x};
    const SeriesValue v = phi_tilde_forward(ControlFunction::constant(1.0), 2, 1, norms);
    EXPECT_LE(v.value, 1.0);
    EXPECT_GE(v.upper() * (1.0 + 1e-15), 1.0);
    EXPECT_NEAR(v.value, 1.0, 1e-12 * v.value + 1e-15);
  }
  EXPECT_EQ(code_of([] { power_bound_closed_form(1.0, 1.0, 2, 1, 1.0); }), ErrorCode::InvalidRegime);
  EXPECT_EQ(code_of([] { power_bound_closed_form(1.0, 0.5, 2, 2, 1.0); }), ErrorCode::InvalidRegime);
}

TEST(ClosedForm, AgreesWithSeriesOnGrid) {
  for (double p : {-0.5, 0.0, 0.25, 0.5, 0.75, 0.9}) {
    for (auto [r, s] : {std::pair{2, 1}, {3, 1}, {3, 2}, {5, 2}}) {
      for (double x : {0.1, 1.0, 10.0}) {
        const double norms[] = {x, x};
        const double series = phi_tilde_forward(ControlFunction::power(1.0, p), r, s, norms).value;
        const double cf = power_bound_closed_form(1.0, p, r, s, x);
        EXPECT_LE(std::abs(cf - series), 1e-10 * series) << p << ' ' << r << ' ' << s << ' ' << x;
      }
    }
  }
}

TEST(Series, ScalesAsPowerOfNorm) {
  const auto phi = ControlFunction::power(0.7, 0.5);
  for (double c : {0.25, 3.0, 17.0}) {
    const double a[] = {1.3, 1.3};
    const double b[] = {c * 1.3, c * 1.3};
    const double va = phi_tilde_forward(phi, 3, 2, a).value;
    const double vb = phi_tilde_forward(phi, 3, 2, b).value;
    EXPECT_NEAR(vb, std::pow(c, 0.5) * va, 1e-12 * vb);
  }
}

TEST(Series, TruncationIsMonotoneAndTailIsAnUpperBound) {
  const auto phi = ControlFunction::power(1.0, 0.75);
  const double x[] = {2.0, 0.5};
  const double full = phi_tilde_forward(phi, 2, 1, x).value;
  double previous = 0.0;
  for (int terms = 1; terms <= 512; terms *= 2) {
    const SeriesValue part = phi_tilde_partial(phi, Direction::Forward, 2, 1, x, terms);
    EXPECT_GE(part.value, previous);
    EXPECT_GE(part.upper(), full * (1.0 - 1e-14));
    const SeriesValue doubled = phi_tilde_partial(phi, Direction::Forward, 2, 1, x, 2 * terms);
    EXPECT_LE(doubled.value, part.upper() * (1.0 + 1e-14));
    previous = part.value;
  }
}

TEST(DerivationBound, Examples) {
  const auto phi = ControlFunction::power(1.0, 0.5);
  EXPECT_NEAR(derivation_bound(phi, Direction::Forward, 2, 1, 1.0, std::nullopt).value, 2.414213562373095, 1e-10);
  EXPECT_EQ(derivation_bound(ControlFunction::power(0.0, 0.5), Direction::Forward, 2, 1, 1.0, std::nullopt).value,
            0.0);
  EXPECT_DOUBLE_EQ(derivation_bound(ControlFunction::constant(1.0), Direction::Forward, 2, 1, 5.0, 1).value, 0.5);
}

TEST(DerivationBound, AgreesWithOracleAndRatioToPhiTilde) {
  for (double p : {0.0, 0.3, 0.6}) {
    for (auto [r, s] : {std::pair{2, 1}, {3, 2}}) {
      const auto phi = ControlFunction::power(0.9, p);
      const double app = derivation_bound(phi, Direction::Forward, r, s, 2.5, std::nullopt).upper();
      EXPECT_NEAR(app, static_cast<double>(brute_app(0.9, p, r, s, 2.5)), 1e-11 * app);
      // the stated bound and the derivation bound differ by (r/s)^p / 2
      const double diag[] = {2.5, 2.5};
      const double tilde = phi_tilde_forward(phi, r, s, diag).value;
      EXPECT_NEAR(app / tilde, std::pow(double(r) / s, p) / 2.0, 1e-11);
    }
  }
}

TEST(DerivationBound, PartialPlusTailIsTotal) {
  const auto phi = ControlFunction::power(1.0, 0.5);
  const double total = derivation_bound(phi, Direction::Forward, 2, 1, 3.0, std::nullopt).value;
  for (int n : {1, 5, 20}) {
    const double head = derivation_bound(phi, Direction::Forward, 2, 1, 3.0, n).value;
    const double tail = derivation_tail(phi, Direction::Forward, 2, 1, 3.0, n).value;
    EXPECT_NEAR(head + tail, total, 1e-12 * total);
  }
}

TEST(DerivationBound, BackwardOracle) {
  // (1/s) Σ (r/s)^k ε ((s/r)^k x)^p with r=2, s=1, p=2: ε x² Σ 2^-k = 2 ε x²
  const auto phi = ControlFunction::power(0.5, 2.0);
  EXPECT_NEAR(derivation_bound(phi, Direction::Backward, 2, 1, 3.0, std::nullopt).value, 9.0, 1e-11);
}
