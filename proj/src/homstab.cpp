#include "hyerslab/homstab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyerslab/error.hpp"
#include "hyerslab/random.hpp"

namespace hyerslab {

double hom_residual(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx, Scalar mu,
                    const Element& x, const Element& y, const Element& u, const Element& v, const Element& w,
                    ResidualSign sign) {
  const Scalar r(params.r());
  const Scalar ms = mu * static_cast<double>(params.s());
  const Scalar mt = mu * static_cast<double>(params.t());
  const Element inner = add(ctx, add(ctx, scalar_mul(ctx, ms, x), scalar_mul(ctx, mt, y)), ternary_product(ctx, u, v, w));
  Element res = scalar_mul(ctx, r, f(scalar_mul(ctx, 1.0 / r, inner)));
  res = sub(ctx, res, scalar_mul(ctx, ms, f(x)));
  const Element ty = scalar_mul(ctx, mt, f(y));
  res = sign == ResidualSign::Subtract ? sub(ctx, res, ty) : add(ctx, res, ty);
  res = sub(ctx, res, ternary_product(ctx, f(u), f(v), f(w)));
  return norm(ctx, res);
}

HyersResult recover_hom(const ProbeFunction& f, const JensenParams& params, const AlgebraContext& ctx,
                        const ControlFunction& phi5, std::span<const Element> samples, const HyersOptions& options) {
  if (phi5.arity() != 5) throw Error(ErrorCode::ArityMismatch, "homomorphism recovery needs a five-slot control");
  return hyers_limit(f, params, ctx, phi5, samples, options);
}

CheckReport verify_scaling(const Map& map, const JensenParams& params, const AlgebraContext& ctx,
                           std::span<const Element> samples, double tol) {
  const double rho = params.ratio();
  CheckReport report;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Element& x = samples[i];
    const double defect = distance(ctx, map(scalar_mul(ctx, rho, x)), scalar_mul(ctx, rho, map(x)));
    report.add("scaling", i, defect, tol * (1.0 + norm(ctx, x)));
  }
  return report;
}

DecaySequence hom_decay_sequence(const ControlFunction& phi5, const JensenParams& params, double u_norm,
                                 double v_norm, double w_norm, int n_probe) {
  if (phi5.arity() != 5) throw Error(ErrorCode::ArityMismatch, "decay sequence needs a five-slot control");
  const int r = params.r();
  const int p = params.pivot_coefficient();
  const bool forward = params.direction() == Direction::Forward;
  DecaySequence seq;
  for (int n = 0; n <= n_probe; ++n) {
    const double grow = forward ? ratio_power(r, p, n) : ratio_power(p, r, n);
    const double shrink = forward ? ratio_power(p, r, n) : ratio_power(r, p, n);
    const double args[5] = {0.0, 0.0, grow * u_norm, grow * v_norm, grow * w_norm};
    const double value = phi5(args);
    seq.linear.push_back(shrink * value);
    seq.cubic.push_back(shrink * shrink * shrink * value);
  }
  return seq;
}

CheckReport verify_hom_defect(const Map& map, const AlgebraContext& ctx, std::span<const ElementTriple> samples,
                              const JensenParams& params, const ControlFunction& phi5,
                              const HomDefectOptions& options) {
  std::vector<Element> entries;
  for (const auto& t : samples) {
    entries.push_back(t.u);
    entries.push_back(t.v);
    entries.push_back(t.w);
  }
  const CheckReport scaling = verify_scaling(map, params, ctx, entries, options.scaling_tol);
  if (!scaling.passed()) {
    throw Error(ErrorCode::ScalingHypothesisViolated,
                "T((r/s)x) != (r/s)T(x) by " + std::to_string(scaling.max_value("scaling")));
  }
  CheckReport report;
  report.append(scaling);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [u, v, w] = samples[i];
    const double nu = norm(ctx, u);
    const double nv = norm(ctx, v);
    const double nw = norm(ctx, w);
    const double defect = distance(ctx, map(ternary_product(ctx, u, v, w)), ternary_product(ctx, map(u), map(v), map(w)));
    report.add("hom_defect", i, defect, options.defect_tol * (1.0 + nu * nv * nw));

    const DecaySequence seq = hom_decay_sequence(phi5, params, nu, nv, nw, options.n_probe);
    double worst_ratio = 0.0;
    bool dominated = true;
    for (std::size_t n = 1; n < seq.linear.size(); ++n) {
      if (seq.linear[n - 1] > 0.0) worst_ratio = std::max(worst_ratio, seq.linear[n] / seq.linear[n - 1]);
    }
    for (std::size_t n = 0; n < seq.linear.size(); ++n) dominated = dominated && seq.cubic[n] <= seq.linear[n];
    report.add("hom_decay.ratio", i, worst_ratio, 1.0 - 1e-12);
    report.add("hom_decay.cubic_dominated", i, dominated ? 0.0 : 1.0, 0.0);
    report.info("hom_decay.last", i, seq.linear.back());
  }
  return report;
}

int split_multiplier(Scalar lambda) { return static_cast<int>(std::ceil(4.0 * std::abs(lambda))) + 1; }

UnimodularTriple unimodular_three_split(Scalar lambda, int M) {
  if (!(static_cast<double>(M) > 4.0 * std::abs(lambda))) {
    throw Error(ErrorCode::PreconditionViolated, "M must exceed 4|lambda|");
  }
  const Scalar w = 3.0 * lambda / static_cast<double>(M);
  const double w_abs = std::abs(w);
  const Scalar mu3 = w_abs > 0.0 ? w / w_abs : Scalar(1.0);
  const Scalar v = w - mu3;
  const double v_abs = std::abs(v);
  const double theta = v_abs > 0.0 ? std::arg(v) : 0.0;
  const double alpha = std::acos(std::clamp(v_abs / 2.0, 0.0, 1.0));
  return {std::polar(1.0, theta + alpha), std::polar(1.0, theta - alpha), mu3};
}

CheckReport verify_complex_linearity(const Map& map, const AlgebraContext& ctx, std::span<const Element> samples,
                                     std::span<const Scalar> scalars, LinearityMode mode, double tol) {
  CheckReport report;
  const Scalar i_unit(0.0, 1.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Element& x = samples[k];
    const Element tx = map(x);
    const double scale_x = 1.0 + norm(ctx, x);
    auto image = [&](Scalar c) { return map(scalar_mul(ctx, c, x)); };

    if (mode == LinearityMode::OneAndI) {
      const Element tix = image(i_unit);
      report.add("linearity.i", k, distance(ctx, tix, scalar_mul(ctx, i_unit, tx)), 2.0 * tol * scale_x, i_unit);
      for (const Scalar lambda : scalars) {
        const double bound = tol * (1.0 + std::abs(lambda)) * scale_x;
        for (const double alpha : {lambda.real(), lambda.imag()}) {
          report.add("linearity.real", k, distance(ctx, image(alpha), scalar_mul(ctx, alpha, tx)),
                     tol * (1.0 + std::abs(alpha)) * scale_x, Scalar(alpha));
        }
        const Element tl = image(lambda);
        const Element rebuilt = add(ctx, scalar_mul(ctx, lambda.real(), tx), scalar_mul(ctx, lambda.imag(), tix));
        report.add("linearity.reconstruct", k, distance(ctx, tl, rebuilt), bound, lambda);
        report.add("linearity.direct", k, distance(ctx, tl, scalar_mul(ctx, lambda, tx)), bound, lambda);
      }
      continue;
    }

    for (const Scalar lambda : scalars) {
      const double bound = tol * (1.0 + std::abs(lambda)) * scale_x;
      const int M = split_multiplier(lambda);
      const UnimodularTriple split = unimodular_three_split(lambda, M);
      Element sum = zero(ctx);
      for (const Scalar mu : {split.mu1, split.mu2, split.mu3}) {
        const Element tmx = image(mu);
        report.add("linearity.unimodular", k, distance(ctx, tmx, scalar_mul(ctx, mu, tx)), 2.0 * tol * scale_x, mu);
        sum = add(ctx, sum, tmx);
      }
      const Element rebuilt = scalar_mul(ctx, static_cast<double>(M) / 3.0, sum);
      report.add("linearity.split", k, distance(ctx, rebuilt, scalar_mul(ctx, lambda, tx)), bound, lambda);
      report.add("linearity.direct", k, distance(ctx, image(lambda), scalar_mul(ctx, lambda, tx)), bound, lambda);
    }
  }
  return report;
}

CheckReport verify_generated_hom(const ProbeFunction& f, const Map& map, const AlgebraContext& ctx,
                                 std::span<const Element> generators, std::span<const Element> samples_z,
                                 const JensenParams& params, const GeneratedOptions& options) {
  if (generators.empty()) throw Error(ErrorCode::InvalidParams, "generating set is empty");
  if (options.n_lo < 0 || options.n_hi < options.n_lo) throw Error(ErrorCode::InvalidParams, "bad n range");
  const int r = params.r();
  const int p = params.pivot_coefficient();
  CheckReport report;

  for (std::size_t g = 0; g < generators.size(); ++g) {
    const Element& s = generators[g];
    report.info("generated.idempotent", g, distance(ctx, ternary_product(ctx, s, s, s), s));
  }

  // Hypothesis on f, on the tested lattice only.
  double worst = 0.0;
  std::size_t id = 0;
  for (int n = options.n_lo; n <= options.n_hi; ++n) {
    const double up = ratio_power(r, p, n);
    const double up2 = ratio_power(r, p, 2 * n);
    for (const Element& s1 : generators) {
      const Element fs1 = f(scalar_mul(ctx, up, s1));
      for (const Element& s2 : generators) {
        const Element fs2 = f(scalar_mul(ctx, up, s2));
        for (const Element& z : samples_z) {
          const Element fz = f(z);
          const Element lhs = f(scalar_mul(ctx, up2, ternary_product(ctx, s1, s2, z)));
          const Element rhs = ternary_product(ctx, fs1, fs2, fz);
          // relative to the size the product could have, not the size it has:
          // when [s1 s2 z] vanishes, rounding in rhs still scales with (r/s)^2n
          const double size = std::max(norm(ctx, lhs), norm(ctx, fs1) * norm(ctx, fs2) * norm(ctx, fz));
          const double rel = distance(ctx, lhs, rhs) / (1.0 + size);
          worst = std::max(worst, rel);
          report.add("generated.hypothesis", id++, rel, options.tol);
        }
      }
    }
  }
  if (worst > options.tol) {
    throw Error(ErrorCode::InapplicableHypothesis,
                "generator identity fails on the sampled lattice by " + std::to_string(worst));
  }

  // Stage one: T([s1 s2 z]) = [T(s1) T(s2) f(z)], with the 2n-scaled chain at n_hi.
  const double down = ratio_power(p, r, options.n_hi);
  const double up = ratio_power(r, p, options.n_hi);
  id = 0;
  for (const Element& s1 : generators) {
    const Element ts1 = map(s1);
    for (const Element& s2 : generators) {
      const Element ts2 = map(s2);
      for (const Element& z : samples_z) {
        const Element fz = f(z);
        const Element target = ternary_product(ctx, ts1, ts2, fz);
        const Element chain = scalar_mul(
            ctx, down * down, f(scalar_mul(ctx, up * up, ternary_product(ctx, s1, s2, z))));
        const double scale = 1.0 + norm(ctx, ts1) * norm(ctx, ts2) * norm(ctx, fz);
        report.add("generated.stage1", id, distance(ctx, map(ternary_product(ctx, s1, s2, z)), target),
                   options.tol * scale);
        report.info("generated.stage1_chain", id, distance(ctx, chain, target));
        ++id;
      }
    }
  }

  // Stage two: x, y in the span of S, then the z-limit upgrade.
  SplitMix64 rng(options.seed);
  auto combination = [&] {
    Element acc = zero(ctx);
    for (const Element& s : generators) {
      acc = add(ctx, acc, scalar_mul(ctx, Scalar(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)), s));
    }
    return acc;
  };
  id = 0;
  for (int c = 0; c < options.combinations; ++c) {
    const Element x = combination();
    const Element y = combination();
    const Element tx = map(x);
    const Element ty = map(y);
    for (const Element& z : samples_z) {
      const Element xyz = ternary_product(ctx, x, y, z);
      const Element txyz = map(xyz);
      const Element target = ternary_product(ctx, tx, ty, map(z));
      const Element chain = scalar_mul(ctx, down, ternary_product(ctx, tx, ty, f(scalar_mul(ctx, up, z))));
      const double scale = 1.0 + norm(ctx, x) * norm(ctx, y) * norm(ctx, z);
      report.add("generated.stage2", id, distance(ctx, txyz, target), options.tol * scale);
      report.info("generated.stage2_chain", id, distance(ctx, txyz, chain));
      ++id;
    }
  }
  return report;
}

}  // namespace hyerslab
