#include "hyerslab/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "hyerslab/error.hpp"

namespace hyerslab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

// Reads one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) fail(path_, "missing key '" + key + "'");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  template <class T>
  T require(const std::string& key) {
    return convert<T>(at(key), key);
  }

  Section child(const std::string& key) { return Section(at(key), path_ + "." + key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(path_, "unknown key '" + key + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
          fail(path_ + "." + key, "expected a nonnegative integer");
        }
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
      }
      return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(path_ + "." + key, e.what());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Scalar parse_scalar(const json& v, const std::string& where) {
  if (v.is_number()) return Scalar(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Scalar(v[0].get<double>(), v[1].get<double>());
  }
  fail(where, "expected a number or [re, im]");
}

Element parse_element(const AlgebraContext& ctx, const json& v, const std::string& where) {
  try {
    return element_from_json(ctx, v);
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

AlgebraContext parse_algebra(Section s) {
  const auto kind = s.get<std::string>("kind", "matrix");
  AlgebraContext ctx = AlgebraContext::matrix(1);
  if (kind == "matrix") {
    const int dim = s.get<int>("dim", 2);
    if (dim < 1) fail(s.path() + ".dim", "must be >= 1");
    ctx = AlgebraContext::matrix(dim);
  } else if (kind == "odd_polynomial") {
    const auto max_terms = s.get<std::uint64_t>("max_terms", 100000);
    if (max_terms < 1) fail(s.path() + ".max_terms", "must be >= 1");
    ctx = AlgebraContext::odd_polynomial(max_terms);
  } else {
    fail(s.path() + ".kind", "expected 'matrix' or 'odd_polynomial'");
  }
  s.finish();
  return ctx;
}

JensenParams parse_params(Section s) {
  const int r = s.get<int>("r", 2);
  const int sc = s.get<int>("s", 1);
  const int t = s.get<int>("t", 1);
  const auto direction = s.get<std::string>("direction", "forward");
  const auto pivot = s.get<std::string>("pivot", "s");
  s.finish();
  if (direction != "forward" && direction != "backward") fail(s.path() + ".direction", "expected forward|backward");
  if (pivot != "s" && pivot != "t") fail(s.path() + ".pivot", "expected s|t");
  try {
    return JensenParams(r, sc, t, direction == "forward" ? Direction::Forward : Direction::Backward,
                        pivot == "s" ? Pivot::S : Pivot::T);
  } catch (const Error& e) {
    fail(s.path(), e.what());
  }
}

AdditiveCore parse_core(const AlgebraContext& ctx, Section s) {
  const auto type = s.require<std::string>("type");
  auto build = [&]() -> AdditiveCore {
    if (type == "identity") return AdditiveCore::identity();
    if (type == "conjugation") return AdditiveCore::conjugation();
    if (type == "random_linear") {
      return AdditiveCore::random_linear(ctx, s.get<std::uint64_t>("seed", 0), s.get<int>("poly_degrees", 8));
    }
    if (type == "similarity") {
      if (ctx.kind() != AlgebraKind::MatrixTrivial) fail(s.path(), "similarity needs the matrix algebra");
      const Element S = parse_element(ctx, s.at("S"), s.path() + ".S");
      return AdditiveCore::similarity(std::get<Matrix>(S));
    }
    if (type == "unitary_conj") {
      if (ctx.kind() != AlgebraKind::MatrixTrivial) fail(s.path(), "unitary_conj needs the matrix algebra");
      if (s.has("U")) {
        const Element U = parse_element(ctx, s.at("U"), s.path() + ".U");
        return AdditiveCore::unitary_conj(std::get<Matrix>(U));
      }
      return AdditiveCore::random_unitary_conj(ctx, s.get<std::uint64_t>("seed", 0));
    }
    if (type == "poly_sign") {
      if (ctx.kind() != AlgebraKind::OddPolynomial) fail(s.path(), "poly_sign needs the odd-polynomial algebra");
      const double sigma = s.get<double>("sigma", 1.0);
      const Scalar c = s.has("c") ? parse_scalar(s.at("c"), s.path() + ".c") : Scalar(1.0);
      return AdditiveCore::poly_sign(sigma, c);
    }
    if (type == "poly_linear") {
      if (ctx.kind() != AlgebraKind::OddPolynomial) fail(s.path(), "poly_linear needs the odd-polynomial algebra");
      std::map<std::int64_t, Scalar> multipliers;
      if (s.has("multipliers")) {
        const json& m = s.at("multipliers");
        if (!m.is_object()) fail(s.path() + ".multipliers", "expected {degree: scalar}");
        for (const auto& [key, value] : m.items()) {
          std::int64_t degree = 0;
          try {
            degree = std::stoll(key);
          } catch (const std::exception&) {
            fail(s.path() + ".multipliers", "bad degree '" + key + "'");
          }
          multipliers[degree] = parse_scalar(value, s.path() + ".multipliers." + key);
        }
      }
      const Scalar fallback = s.has("fallback") ? parse_scalar(s.at("fallback"), s.path() + ".fallback") : Scalar(1.0);
      return AdditiveCore::poly_linear(std::move(multipliers), fallback);
    }
    fail(s.path() + ".type", "unknown core type '" + type + "'");
  };
  AdditiveCore core = [&] {
    try {
      return build();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      fail(s.path(), e.what());
    }
  }();
  s.finish();
  return core;
}

PerturbationSpec parse_perturbation(const AlgebraContext& ctx, Section s) {
  PerturbationSpec spec;
  const auto kind = s.get<std::string>("kind", "power");
  if (kind == "power") {
    spec.kind = PerturbationKind::Power;
  } else if (kind == "bounded") {
    spec.kind = PerturbationKind::Bounded;
  } else {
    fail(s.path() + ".kind", "expected power|bounded");
  }
  spec.delta = s.get<double>("delta", 0.0);
  spec.p = s.get<double>("p", 0.5);
  spec.seed = s.get<std::uint64_t>("seed", 0);
  spec.real_directions = s.get<bool>("real_directions", false);
  const auto support = s.get<std::string>("support", "everywhere");
  if (support == "everywhere") {
    spec.support = PerturbationSupport::Everywhere;
  } else if (support == "off_diagonal") {
    spec.support = PerturbationSupport::OffDiagonal;
  } else {
    fail(s.path() + ".support", "expected everywhere|off_diagonal");
  }
  if (s.has("direction")) spec.fixed_direction = parse_element(ctx, s.at("direction"), s.path() + ".direction");
  s.finish();
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) fail(s.path() + ".delta", "must be finite and >= 0");
  if (!std::isfinite(spec.p)) fail(s.path() + ".p", "must be finite");
  return spec;
}

ControlSpec parse_control(Section s) {
  ControlSpec spec;
  const auto type = s.get<std::string>("type", "calibrated");
  if (type == "power") {
    spec.type = ControlSpec::Type::Power;
  } else if (type == "constant") {
    spec.type = ControlSpec::Type::Constant;
  } else if (type == "calibrated") {
    spec.type = ControlSpec::Type::Calibrated;
  } else {
    fail(s.path() + ".type", "expected power|constant|calibrated");
  }
  spec.eps = s.get<double>("eps", 0.0);
  spec.p = s.get<double>("p", 0.5);
  spec.budget = s.get<std::uint64_t>("budget", 2000);
  spec.safety_factor = s.get<double>("safety_factor", 1.05);
  s.finish();
  if (!(spec.eps >= 0.0) || !std::isfinite(spec.eps)) fail(s.path() + ".eps", "must be finite and >= 0");
  if (!std::isfinite(spec.p)) fail(s.path() + ".p", "must be finite");
  if (spec.type == ControlSpec::Type::Calibrated && spec.budget < 1000) fail(s.path() + ".budget", "must be >= 1000");
  if (!(spec.safety_factor >= 1.0)) fail(s.path() + ".safety_factor", "must be >= 1");
  return spec;
}

}  // namespace

Suite suite_from_string(const std::string& name) {
  if (name == "algebra") return Suite::Algebra;
  if (name == "series") return Suite::Series;
  if (name == "jensen") return Suite::Jensen;
  if (name == "homstab") return Suite::Homstab;
  if (name == "linearity") return Suite::Linearity;
  if (name == "generated") return Suite::Generated;
  if (name == "full") return Suite::Full;
  throw Error(ErrorCode::ConfigError, "unknown suite '" + name + "'");
}

std::string to_string(Suite suite) {
  switch (suite) {
    case Suite::Algebra: return "algebra";
    case Suite::Series: return "series";
    case Suite::Jensen: return "jensen";
    case Suite::Homstab: return "homstab";
    case Suite::Linearity: return "linearity";
    case Suite::Generated: return "generated";
    case Suite::Full: return "full";
  }
  return "unknown";
}

std::vector<Scalar> default_scalar_grid() {
  const double radii[] = {0.5, 1.0, 2.5, 6.0};
  const double angles[] = {0.0, std::numbers::pi / 2, 2 * std::numbers::pi / 3, std::numbers::pi,
                           7 * std::numbers::pi / 4};
  std::vector<Scalar> out;
  for (double r : radii) {
    for (double a : angles) {
      // exact 1 and i rather than polar's rounding
      if (a == 0.0) {
        out.emplace_back(r, 0.0);
      } else if (a == std::numbers::pi / 2) {
        out.emplace_back(0.0, r);
      } else {
        out.push_back(std::polar(r, a));
      }
    }
  }
  return out;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  Section root(j, "config");
  const AlgebraContext ctx = root.has("algebra") ? parse_algebra(root.child("algebra"))
                                                 : AlgebraContext::matrix(2);
  const JensenParams params = root.has("params") ? parse_params(root.child("params")) : JensenParams(2, 1, 1);

  std::optional<AdditiveCore> core;
  PerturbationSpec perturbation;
  if (root.has("probe")) {
    Section probe = root.child("probe");
    if (probe.has("core")) core = parse_core(ctx, probe.child("core"));
    if (probe.has("perturbation")) perturbation = parse_perturbation(ctx, probe.child("perturbation"));
    probe.finish();
  }
  if (!core) core = AdditiveCore::random_linear(ctx, 0);

  ExperimentConfig cfg{.algebra = ctx, .params = params, .core = *core, .perturbation = perturbation};
  if (root.has("control")) cfg.control = parse_control(root.child("control"));
  if (root.has("suite")) cfg.suite = suite_from_string(root.require<std::string>("suite"));
  cfg.samples = root.get<std::uint64_t>("samples", cfg.samples);
  cfg.seed = root.get<std::uint64_t>("seed", cfg.seed);
  cfg.tol = root.get<double>("tol", cfg.tol);
  cfg.n_cap = root.get<int>("n_cap", cfg.n_cap);
  cfg.output_dir = root.get<std::string>("output_dir", cfg.output_dir.string());
  cfg.n_probe = root.get<int>("n_probe", cfg.n_probe);
  cfg.real_samples = root.get<bool>("real_samples", cfg.real_samples);
  cfg.sample_scale = root.get<double>("sample_scale", cfg.sample_scale);
  const auto sign = root.get<std::string>("residual_sign", "subtract");
  if (sign == "subtract") {
    cfg.residual_sign = ResidualSign::Subtract;
  } else if (sign == "literal_plus") {
    cfg.residual_sign = ResidualSign::LiteralPlus;
  } else {
    fail("config.residual_sign", "expected subtract|literal_plus");
  }
  if (root.has("scalars")) {
    const json& list = root.at("scalars");
    if (!list.is_array() || list.empty()) fail("config.scalars", "expected a nonempty array");
    for (const auto& v : list) cfg.scalars.push_back(parse_scalar(v, "config.scalars"));
  } else {
    cfg.scalars = default_scalar_grid();
  }
  root.finish();

  if (cfg.samples < 1) fail("config.samples", "must be >= 1");
  if (!(cfg.tol > 0.0)) fail("config.tol", "must be > 0");
  if (cfg.n_cap < 1) fail("config.n_cap", "must be >= 1");
  if (cfg.n_probe < 1) fail("config.n_probe", "must be >= 1");
  if (!(cfg.sample_scale > 0.0)) fail("config.sample_scale", "must be > 0");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "'" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace hyerslab
