#include "hyerslab/cli.hpp"

#include <optional>

#include "CLI11.hpp"

#include "hyerslab/error.hpp"
#include "hyerslab/homstab.hpp"
#include "hyerslab/report.hpp"
#include "hyerslab/runner.hpp"

namespace hyerslab {

namespace {

std::pair<int, int> parse_rs(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "expected r:s, got '" + text + "'");
  try {
    std::size_t a = 0;
    std::size_t b = 0;
    const int r = std::stoi(text.substr(0, colon), &a);
    const int s = std::stoi(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    return {r, s};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "expected r:s, got '" + text + "'");
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical verification suites for generalized Jensen stability in ternary algebras"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a verification suite from a JSON config");
  std::string config_path;
  std::optional<std::string> suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--suite", suite, "algebra|series|jensen|homstab|linearity|generated|full");
  run->add_option("--seed", seed, "Sampling seed");
  run->add_option("--samples", samples, "Number of sample points");
  run->add_option("--tol", tol, "Hyers tolerance");
  run->add_option("--out", out_dir, "Output directory");

  auto* table = app.add_subcommand("bound-table", "Closed-form power bound against the series, as CSV");
  std::vector<std::string> rs_grid{"2:1", "3:1", "3:2", "5:2"};
  std::vector<double> p_grid{-0.5, 0.0, 0.25, 0.5, 0.75, 0.9};
  double eps = 1.0;
  double x_norm = 1.0;
  table->add_option("--rs", rs_grid, "Grid of r:s pairs")->delimiter(',');
  table->add_option("--p", p_grid, "Grid of exponents")->delimiter(',');
  table->add_option("--eps", eps, "Control scale");
  table->add_option("--x-norm", x_norm, "Norm of x");

  auto* split = app.add_subcommand("split", "Write lambda as (M/3) times a sum of three unit scalars");
  double lambda_re = 0.0;
  double lambda_im = 0.0;
  std::optional<int> multiplier;
  split->add_option("--re", lambda_re, "Real part of lambda");
  split->add_option("--im", lambda_im, "Imaginary part of lambda");
  split->add_option("--M", multiplier, "Multiplier (default: ceil(4|lambda|) + 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      if (suite) cfg.suite = suite_from_string(*suite);
      if (seed) cfg.seed = *seed;
      if (samples) {
        if (*samples < 1) throw Error(ErrorCode::ConfigError, "--samples must be >= 1");
        cfg.samples = *samples;
      }
      if (tol) {
        if (!(*tol > 0.0)) throw Error(ErrorCode::ConfigError, "--tol must be > 0");
        cfg.tol = *tol;
      }
      if (out_dir) cfg.output_dir = *out_dir;
      return run_experiment(cfg, err);
    }
    if (*table) {
      std::vector<std::pair<int, int>> grid;
      for (const auto& text : rs_grid) grid.push_back(parse_rs(text));
      const auto rows = bound_table(grid, p_grid, eps, x_norm);
      write_bound_table(out, rows);
      return 0;
    }
    if (*split) {
      const Scalar lambda(lambda_re, lambda_im);
      const int M = multiplier.value_or(split_multiplier(lambda));
      const UnimodularTriple t = unimodular_three_split(lambda, M);
      const Scalar target = 3.0 * lambda / static_cast<double>(M);
      out << "lambda,M,mu1,mu2,mu3,sum_error\n";
      out << format_scalar(lambda) << ',' << M << ',' << format_scalar(t.mu1) << ',' << format_scalar(t.mu2) << ','
          << format_scalar(t.mu3) << ',' << format_number(std::abs(t.mu1 + t.mu2 + t.mu3 - target)) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 2;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hyerslab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hyerslab
