#include "hyerslab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "hyerslab/control.hpp"
#include "hyerslab/homstab.hpp"
#include "hyerslab/hyers.hpp"
#include "hyerslab/perturb.hpp"
#include "hyerslab/random.hpp"

namespace hyerslab {

namespace {

// Stream tags so each suite draws from its own seeded stream.
constexpr std::uint64_t kPointStream = 1;
constexpr std::uint64_t kTripleStream = 2;
constexpr std::uint64_t kCalibrationStream = 3;
constexpr std::uint64_t kAlgebraStream = 4;
constexpr std::uint64_t kResidualStream = 5;
constexpr std::uint64_t kSecondProbeStream = 6;

// The maps handed to the homomorphism and linearity checks are limits; their
// own error must sit well below the tolerance those checks apply.
constexpr double kInnerTolFactor = 1e-3;
constexpr int kUniquenessDepth = 8;
constexpr std::size_t kGeneratedZ = 8;

class Runner {
 public:
  explicit Runner(const ExperimentConfig& cfg)
      : cfg_(cfg),
        ctx_(cfg.algebra),
        sampling_{cfg.real_samples, cfg.sample_scale},
        probe_(make_probe(cfg.core, cfg.perturbation, cfg.algebra)),
        points_(draw(kPointStream, cfg.samples)) {}

  SuiteResult run() {
    switch (cfg_.suite) {
      case Suite::Algebra: algebra(); break;
      case Suite::Series: series(); break;
      case Suite::Jensen: jensen(); break;
      case Suite::Homstab: homstab(); break;
      case Suite::Linearity: linearity(); break;
      case Suite::Generated: generated(); break;
      case Suite::Full:
        algebra();
        series();
        jensen();
        homstab();
        linearity();
        generated();
        break;
    }
    return std::move(out_);
  }

 private:
  std::vector<Element> draw(std::uint64_t stream, std::size_t n) const {
    SplitMix64 rng(hash_combine(cfg_.seed, stream));
    std::vector<Element> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_element(ctx_, rng, sampling_));
    return out;
  }

  void note(std::string key, std::string value) { out_.notes.emplace_back(std::move(key), std::move(value)); }

  ControlFunction control(const ProbeFunction& f, CalibrationShape::Slots slots, const std::string& tag) {
    const int arity = slots == CalibrationShape::Slots::Two ? 2 : 5;
    const ControlSpec& spec = cfg_.control;
    if (spec.type == ControlSpec::Type::Power) return ControlFunction::power(spec.eps, spec.p, arity);
    if (spec.type == ControlSpec::Type::Constant) return ControlFunction::constant(spec.eps, arity);
    CalibrationOptions options;
    options.real_samples = cfg_.real_samples;
    options.sample_scale = cfg_.sample_scale;
    options.sign = cfg_.residual_sign;
    options.safety_factor = spec.safety_factor;
    const Calibration cal = calibrate_epsilon(f, cfg_.params, ctx_, CalibrationShape{slots, spec.p}, spec.budget,
                                              hash_combine(cfg_.seed, kCalibrationStream), options);
    note(tag + ".eps", format_number(cal.eps));
    note(tag + ".sup_ratio", format_number(cal.sup_ratio));
    note(tag + ".safety_factor", format_number(cal.safety_factor));
    note(tag + ".samples_used", std::to_string(cal.samples_used));
    out_.checks.info(tag + ".eps", 0, cal.eps);
    return ControlFunction::power(cal.eps, spec.p, arity);
  }

  const ControlFunction& jensen_control() {
    if (!phi2_) phi2_ = control(probe_, CalibrationShape::Slots::Two, "control2");
    return *phi2_;
  }

  const ControlFunction& hom_control() {
    if (!phi5_) phi5_ = control(probe_, CalibrationShape::Slots::Five, "control5");
    return *phi5_;
  }

  HyersOptions hyers_options(double tol) const {
    HyersOptions options;
    options.tol = tol;
    options.n_cap = cfg_.n_cap;
    return options;
  }

  ProbeFunction limit_map() {
    return make_limit_map(probe_, cfg_.params, ctx_, jensen_control(), hyers_options(cfg_.tol * kInnerTolFactor));
  }

  void algebra() {
    SplitMix64 rng(hash_combine(cfg_.seed, kAlgebraStream));
    CheckReport& rep = out_.checks;
    const bool matrix = ctx_.kind() == AlgebraKind::MatrixTrivial;
    for (std::size_t i = 0; i < cfg_.samples; ++i) {
      Element v[6];
      double n[6];
      for (int k = 0; k < 6; ++k) {
        v[k] = random_element(ctx_, rng, sampling_);
        n[k] = norm(ctx_, v[k]);
      }
      const Element abc = ternary_product(ctx_, v[0], v[1], v[2]);
      rep.add("algebra.associativity", i, check_ternary_associativity(ctx_, v[0], v[1], v[2], v[3], v[4]),
              1e-10 * n[0] * n[1] * n[2] * n[3] * n[4]);
      rep.add("algebra.submultiplicativity", i, norm(ctx_, abc), n[0] * n[1] * n[2] * (1.0 + 1e-12));

      // additivity of the product in each slot, relative to the norms involved
      double slot_defect = 0.0;
      for (int slot = 0; slot < 3; ++slot) {
        Element a[3] = {v[0], v[1], v[2]};
        Element b[3] = {v[0], v[1], v[2]};
        a[slot] = add(ctx_, v[slot], v[5]);
        b[slot] = v[5];
        const Element lhs = ternary_product(ctx_, a[0], a[1], a[2]);
        const Element rhs = add(ctx_, abc, ternary_product(ctx_, b[0], b[1], b[2]));
        double scale = n[0] * n[1] * n[2] / std::max(n[slot], 1e-300) * (n[slot] + n[5]);
        slot_defect = std::max(slot_defect, distance(ctx_, lhs, rhs) / std::max(scale, 1e-300));
      }
      rep.add("algebra.slot_linearity", i, slot_defect, 1e-10);

      if (matrix) {
        const Element e = identity(ctx_);
        const Matrix plain = std::get<Matrix>(v[0]) * std::get<Matrix>(v[1]);
        rep.add("algebra.bridge", i, distance(ctx_, binary_from_identity(ctx_, e, v[0], v[1]), plain),
                1e-14 * std::max(norm(ctx_, plain), n[0] * n[1]));
        rep.add("algebra.unital", i, check_binary_bridge(ctx_, e, v[0], v[1], v[2]),
                1e-10 * (1.0 + n[0] * n[1] * n[2]));
      } else {
        std::size_t even = 0;
        for (const auto& [d, c] : std::get<OddPoly>(abc).terms()) even += d % 2 == 0 ? 1 : 0;
        rep.add("algebra.odd_closure", i, static_cast<double>(even), 0.0);
      }
    }
  }

  void series() {
    const ControlFunction& phi = jensen_control();
    const JensenParams& params = cfg_.params;
    const Direction dir = params.direction();
    const int r = params.r();
    const int s = params.pivot_coefficient();
    CheckReport& rep = out_.checks;
    const double unit[2] = {1.0, 1.0};
    phi_tilde(phi, dir, r, s, unit);  // surfaces Divergent before any row is written

    const auto* power = std::get_if<ControlFunction::Power>(&phi.kind());
    const bool closed_form = power && dir == Direction::Forward && power->p < 1.0 && r > s;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double x = norm(ctx_, points_[i]);
      const double diag[2] = {x, x};
      const SeriesValue full = phi_tilde(phi, dir, r, s, diag);
      const SeriesValue app = derivation_bound(phi, dir, r, s, x, std::nullopt, params.pivot_slot());
      rep.info("series.phi_tilde", i, full.value);
      rep.info("series.app", i, app.value);
      rep.add("series.certified", i, full.certified && app.certified ? 0.0 : 1.0, 0.0);

      double violation = 0.0;
      double previous = 0.0;
      for (int terms = 1; terms <= 64; terms *= 2) {
        const SeriesValue part = phi_tilde_partial(phi, dir, r, s, diag, terms);
        violation = std::max({violation, previous - part.value, full.value - part.upper()});
        previous = part.value;
      }
      rep.add("series.truncation", i, std::max(violation, 0.0), 1e-12 * full.value);

      if (closed_form) {
        const double cf = power_bound_closed_form(power->eps, power->p, r, s, x);
        const double gap = cf == full.value ? 0.0 : std::abs(cf - full.value) / std::max(std::abs(cf), 1e-300);
        rep.add("series.closed_form", i, gap, 1e-10);
      }
      if (power && x > 0.0) {
        constexpr double c = 2.5;
        const double scaled[2] = {c * x, c * x};
        const double expect = std::pow(c, power->p) * full.value;
        const double got = phi_tilde(phi, dir, r, s, scaled).value;
        const double gap = expect == got ? 0.0 : std::abs(got - expect) / std::max(std::abs(expect), 1e-300);
        rep.add("series.scaling", i, gap, 1e-12);
      }
    }
  }

  void add_recovery(const std::string& prefix, const HyersResult& limit, double tol) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double x_norm = norm(ctx_, points_[i]);
      const Element core_x = cfg_.core.apply(ctx_, points_[i]);
      out_.checks.add(prefix + ".recovery", i, distance(ctx_, limit.limit_at[i], core_x), tol * (1.0 + x_norm));
      out_.checks.add(prefix + ".certified", i, limit.certifications[i] ? 0.0 : 1.0, 0.0);
      out_.checks.info(prefix + ".n_used", i, limit.n_used[i]);
    }
  }

  void jensen() {
    const ControlFunction& phi = jensen_control();
    const JensenParams& params = cfg_.params;
    CheckReport& rep = out_.checks;

    const std::vector<Element> fresh = draw(kResidualStream, cfg_.samples + 1);
    for (std::size_t i = 0; i < cfg_.samples; ++i) {
      const Element args[2] = {fresh[i], fresh[i + 1]};
      rep.add("jensen.residual", i, jensen_residual(probe_, params, ctx_, args[0], args[1]),
              phi_eval(phi, ctx_, args));
    }

    const HyersOptions options = hyers_options(cfg_.tol);
    const HyersResult limit = hyers_limit(probe_, params, ctx_, phi, points_, options);
    add_recovery("hyers", limit, cfg_.tol);
    note("hyers.max_n_used", std::to_string(limit.max_n_used()));
    if (!limit.certified()) {
      note("stability", "skipped: limit not certified");
      return;
    }

    StabilityReport stability = verify_stability_bound(probe_, limit, phi, params, ctx_, points_, options);
    for (const auto& row : stability.rows) {
      rep.add("stability.phitilde", row.sample_id, row.residual,
              row.bound_phitilde + limit.tail_bound[row.sample_id]);
    }
    out_.stability = std::move(stability);

    PerturbationSpec other_spec = cfg_.perturbation;
    other_spec.seed = hash_combine(cfg_.perturbation.seed, kSecondProbeStream);
    const ProbeFunction other = make_probe(cfg_.core, other_spec, ctx_);
    ControlFunction other_phi = phi;
    if (cfg_.control.type == ControlSpec::Type::Calibrated) {
      other_phi = control(other, CalibrationShape::Slots::Two, "control2.second_probe");
    }
    const HyersResult other_limit = hyers_limit(other, params, ctx_, other_phi, points_, options);
    // φ with the larger ε dominates both residuals
    const auto* a = std::get_if<ControlFunction::Power>(&phi.kind());
    const auto* b = std::get_if<ControlFunction::Power>(&other_phi.kind());
    const ControlFunction& shared = (a && b && b->eps > a->eps) ? other_phi : phi;
    rep.append(verify_uniqueness(limit, other_limit, shared, params, ctx_, points_, kUniquenessDepth));

    // each side of T(x+y) = T(x)+T(y) carries up to tol of Hyers error
    const ProbeFunction T = make_limit_map(probe_, params, ctx_, phi, options);
    rep.append(verify_additivity(T, ctx_, points_, 3.0 * cfg_.tol));
  }

  void homstab() {
    const ControlFunction& phi5 = hom_control();
    const JensenParams& params = cfg_.params;
    CheckReport& rep = out_.checks;

    const std::vector<Element> fresh = draw(kResidualStream, 5 * cfg_.samples);
    SplitMix64 mu_rng(hash_combine(cfg_.seed, kResidualStream));
    for (std::size_t i = 0; i < cfg_.samples; ++i) {
      const Element* t = &fresh[5 * i];
      Scalar mu(1.0);
      if (i % 3 == 1) mu = Scalar(0.0, 1.0);
      if (i % 3 == 2) mu = std::polar(1.0, mu_rng.uniform(0.0, 2.0 * std::numbers::pi));
      rep.add("homstab.residual", i,
              hom_residual(probe_, params, ctx_, mu, t[0], t[1], t[2], t[3], t[4], cfg_.residual_sign),
              phi_eval(phi5, ctx_, std::span<const Element>(t, 5)), mu);
    }

    const HyersOptions options = hyers_options(cfg_.tol * kInnerTolFactor);
    const HyersResult limit = recover_hom(probe_, params, ctx_, phi5, points_, options);
    add_recovery("homstab", limit, cfg_.tol);

    const std::vector<Element> flat = draw(kTripleStream, 3 * cfg_.samples);
    std::vector<ElementTriple> triples;
    for (std::size_t i = 0; i < cfg_.samples; ++i) triples.push_back({flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]});
    const ProbeFunction T = make_limit_map(probe_, params, ctx_, phi5.with_arity(2), options);
    HomDefectOptions defect;
    defect.n_probe = cfg_.n_probe;
    defect.defect_tol = cfg_.tol;
    defect.scaling_tol = cfg_.tol;
    rep.append(verify_hom_defect(T, ctx_, triples, params, phi5, defect));
  }

  void linearity() {
    const ProbeFunction T = limit_map();
    CheckReport& rep = out_.checks;
    rep.append(verify_complex_linearity(T, ctx_, points_, cfg_.scalars, LinearityMode::FullCircle, cfg_.tol));
    rep.append(verify_complex_linearity(T, ctx_, points_, cfg_.scalars, LinearityMode::OneAndI, cfg_.tol));
  }

  void generated() {
    std::vector<Element> generators;
    if (ctx_.kind() == AlgebraKind::MatrixTrivial) {
      for (int i = 0; i < ctx_.dim(); ++i) {
        for (int j = 0; j < ctx_.dim(); ++j) {
          Matrix unit = Matrix::Zero(ctx_.dim(), ctx_.dim());
          unit(i, j) = 1.0;
          generators.emplace_back(std::move(unit));
        }
      }
    } else {
      for (std::int64_t d : {1, 3, 5}) generators.emplace_back(OddPoly::monomial(d));
    }
    const std::size_t nz = std::min(points_.size(), kGeneratedZ);
    const std::span<const Element> z(points_.data(), nz);
    GeneratedOptions options;
    options.tol = cfg_.tol;
    options.seed = hash_combine(cfg_.seed, kTripleStream);
    try {
      out_.checks.append(verify_generated_hom(probe_, limit_map(), ctx_, generators, z, cfg_.params, options));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InapplicableHypothesis) throw;
      // the generating-set hypothesis is a premise, not a claim under test
      out_.checks.info("generated.inapplicable", 0, 1.0);
      note("generated", e.what());
    }
  }

  const ExperimentConfig& cfg_;
  AlgebraContext ctx_;
  ElementSampling sampling_;
  ProbeFunction probe_;
  std::vector<Element> points_;
  std::optional<ControlFunction> phi2_;
  std::optional<ControlFunction> phi5_;
  SuiteResult out_;
};

void write_summary(std::ostream& os, const ExperimentConfig& cfg, const SuiteResult& result) {
  os << "suite = " << to_string(cfg.suite) << '\n';
  os << "passed = " << (result.passed() ? "true" : "false") << '\n';
  os << "checks = " << result.checks.rows().size() << '\n';
  os << "failures = " << result.checks.failures() << '\n';
  if (result.stability) {
    std::size_t bad = 0;
    for (const auto& row : result.stability->rows) bad += row.pass ? 0 : 1;
    os << "stability_rows = " << result.stability->rows.size() << '\n';
    os << "stability_failures = " << bad << '\n';
  }
  for (const auto& [key, value] : result.notes) os << key << " = " << value << '\n';

  struct Tally {
    std::size_t rows = 0;
    std::size_t failures = 0;
    double max_value = 0.0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& row : result.checks.rows()) {
    Tally& t = tallies[row.check];
    ++t.rows;
    t.failures += row.pass ? 0 : 1;
    t.max_value = std::max(t.max_value, row.value);
  }
  os << '\n';
  for (const auto& [name, t] : tallies) {
    os << name << ": rows=" << t.rows << " failures=" << t.failures << " max_value=" << format_number(t.max_value)
       << '\n';
  }
}

}  // namespace

SuiteResult run_suite(const ExperimentConfig& config) { return Runner(config).run(); }

int exit_code_for(const Error& error) noexcept {
  switch (error.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidRegime:
    case ErrorCode::Divergent:
    case ErrorCode::TailNotCertifiable:
    case ErrorCode::ArityMismatch:
    case ErrorCode::ContextMismatch:
    case ErrorCode::InvalidElement:
    case ErrorCode::SingularS:
    case ErrorCode::PreconditionViolated:
      return 2;
    default:
      return 1;
  }
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  SuiteResult result;
  try {
    result = run_suite(config);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  auto open = [&](const char* name) {
    std::ofstream os(config.output_dir / name, std::ios::binary);
    if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + (config.output_dir / name).string());
    return os;
  };
  try {
    {
      auto os = open("report.csv");
      write_csv(os, result.checks);
    }
    {
      nlohmann::json j{{"suite", to_string(config.suite)}, {"passed", result.passed()}};
      j["checks"] = to_json(result.checks);
      if (result.stability) j["stability"] = to_json(*result.stability);
      nlohmann::json notes = nlohmann::json::object();
      for (const auto& [key, value] : result.notes) notes[key] = value;
      j["notes"] = notes;
      auto os = open("report.json");
      os << j.dump(2) << '\n';
    }
    if (result.stability) {
      auto os = open("stability.csv");
      write_csv(os, *result.stability);
    }
    {
      auto os = open("summary.txt");
      write_summary(os, config, result);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }

  log << to_string(config.suite) << ": " << result.checks.rows().size() << " checks, " << result.checks.failures()
      << " failed" << (result.passed() ? "" : " (FAIL)") << '\n';
  return result.passed() ? 0 : 1;
}

std::vector<BoundTableRow> bound_table(std::span<const std::pair<int, int>> rs_grid, std::span<const double> p_grid,
                                       double eps, double x_norm) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<BoundTableRow> rows;
  for (const auto& [r, s] : rs_grid) {
    for (double p : p_grid) {
      BoundTableRow row{r, s, p, eps, x_norm, nan, nan, nan, "invalid"};
      if (p < 1.0 && r > s && s >= 1) {
        row.closed_form = power_bound_closed_form(eps, p, r, s, x_norm);
        const double diag[2] = {x_norm, x_norm};
        row.series = phi_tilde_forward(ControlFunction::power(eps, p), r, s, diag).value;
        row.rel_gap = row.closed_form == row.series
                          ? 0.0
                          : std::abs(row.closed_form - row.series) / std::max(std::abs(row.closed_form), 1e-300);
        row.status = row.rel_gap <= 1e-10 ? "ok" : "mismatch";
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bound_table(std::ostream& os, std::span<const BoundTableRow> rows) {
  os << "r,s,p,eps,x_norm,closed_form,series,rel_gap,status\n";
  for (const auto& row : rows) {
    os << row.r << ',' << row.s << ',' << format_number(row.p) << ',' << format_number(row.eps) << ','
       << format_number(row.x_norm) << ',' << format_number(row.closed_form) << ',' << format_number(row.series)
       << ',' << format_number(row.rel_gap) << ',' << row.status << '\n';
  }
}

}  // namespace hyerslab
