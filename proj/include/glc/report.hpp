#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace glc {

/// Flat experiment configuration; see README for the schema. Unknown keys are
/// fatal at parse time, the seed has no default.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output = "out/run";

  struct Domain {
    int dimension = 1;
    std::vector<double> lo{0.0}, hi{1.0};
    double horizon = 0.5;
    std::vector<double> omega{0.3, 0.7};    // lo0, hi0 [, lo1, hi1]
    std::vector<double> omega0{0.4, 0.6};
    bool operator==(const Domain&) const = default;
  } domain;

  struct GridCfg {
    int nx = 200, ny = 24, nt = 400;
    bool operator==(const GridCfg&) const = default;
  } grid;

  struct OperatorCfg {
    double b = 0.0;
    std::string a_preset = "identity";  // identity | scaled | anisotropic
    double a_scale = 1.0;
    bool operator==(const OperatorCfg&) const = default;
  } op;

  struct PotentialCfg {
    std::string preset = "zero";  // zero | uniform (scaled to norm r, negative)
    double r = 0.0;
    bool operator==(const PotentialCfg&) const = default;
  } potential;

  struct WeightsCfg {
    double lambda = 40.0, mu = 3.0;
    std::vector<double> lambda_list{20.0, 40.0, 80.0};
    std::vector<double> mu_list{3.0};
    bool operator==(const WeightsCfg&) const = default;
  } weights;

  struct SolverCfg {
    double theta_scheme = 0.5;
    double linear_tol = 1e-10;
    int max_linear_iters = 2000;
    bool operator==(const SolverCfg&) const = default;
  } solver;

  struct HumCfg {
    double epsilon = 1e-8;
    double cg_tol = 1e-10;
    int cg_max_iters = 500;
    bool record_history = false;
    bool operator==(const HumCfg&) const = default;
  } hum;

  struct ControlCfg {
    std::string y0_preset = "sin";  // sin | sin2 | bump
    double y0_amplitude = 1.0;
    std::string f_preset = "slog14";  // zero | linear | slog14 | slog1
    double f_coeff = 0.5;             // for linear
    int loop_max_iters = 30;
    double loop_tol = 1e-3;
    double damping = 1.0;
    bool operator==(const ControlCfg&) const = default;
  } control;

  struct EnsembleCfg {
    int size = 16;
    bool single_mode = false;
    std::vector<double> r_list{0.0, 2.0, 4.0, 8.0};
    bool operator==(const EnsembleCfg&) const = default;
  } ensemble;

  struct IdentityCfg {
    int configs = 200;
    int points = 20;
    std::vector<int> m_list{1, 2, 3};
    bool operator==(const IdentityCfg&) const = default;
  } identity;

  struct MmsCfg {
    int nx = 24, nt = 32;
    bool operator==(const MmsCfg&) const = default;
  } mms;

  bool operator==(const RunConfig&) const = default;
};

/// Strict parse: every key must be known, `experiment` and `seed` must be
/// present (the subcommand may supply the experiment). Throws
/// std::invalid_argument naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_file(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

/// Applies `section.key=value` (or `key=value` for top-level) overrides.
void apply_override(RunConfig& c, const std::string& assignment);

struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  RunConfig config;
  nlohmann::json payload;  // experiment-specific summary
  std::vector<CsvTable> tables;
  double wall_time_s = 0.0;
  std::string version = "0.1.0";
};

/// Writes <prefix>.json and one <prefix>.<table>.csv per table, 17
/// significant digits, deterministic row order.
void emit_report(const RunReport& report, const std::string& prefix);

/// Executes the configured experiment; throws std::invalid_argument for
/// validation problems and std::runtime_error for numerical failures.
RunReport run_experiment(const RunConfig& config);

}  // namespace glc
