#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyerslab/algebra.hpp"
#include "hyerslab/homstab.hpp"
#include "hyerslab/hyers.hpp"
#include "hyerslab/perturb.hpp"

namespace hyerslab {

enum class Suite { Algebra, Series, Jensen, Homstab, Linearity, Generated, Full };

Suite suite_from_string(const std::string& name);
std::string to_string(Suite suite);

struct ControlSpec {
  enum class Type { Power, Constant, Calibrated };
  Type type = Type::Calibrated;
  double eps = 0.0;
  double p = 0.5;
  std::size_t budget = 2000;
  double safety_factor = 1.05;
};

struct ExperimentConfig {
  AlgebraContext algebra;
  JensenParams params;
  AdditiveCore core;
  PerturbationSpec perturbation;
  ControlSpec control{};
  Suite suite = Suite::Full;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int n_cap = 64;
  std::filesystem::path output_dir = "hyerslab-out";
  ResidualSign residual_sign = ResidualSign::Subtract;
  int n_probe = 20;
  std::vector<Scalar> scalars{};
  bool real_samples = false;
  double sample_scale = 1.0;
};

/// Throws Error(ConfigError) on unknown keys, wrong types or values the
/// module constructors reject.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Twenty scalars: four radii times five angles, 1 and i among them.
std::vector<Scalar> default_scalar_grid();

}  // namespace hyerslab
