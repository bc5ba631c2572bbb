#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glc/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int run(const std::string& experiment, const std::string& config_path,
        const std::vector<std::string>& overrides, const std::string& output_override) {
  glc::RunConfig cfg = glc::parse_config_file(config_path);
  if (!cfg.experiment.empty() && cfg.experiment != experiment)
    throw std::invalid_argument("config names experiment '" + cfg.experiment +
                                "' but subcommand is '" + experiment + "'");
  cfg.experiment = experiment;
  for (const auto& ov : overrides) glc::apply_override(cfg, ov);
  cfg.experiment = experiment;
  if (!output_override.empty()) cfg.output = output_override;

  glc::RunReport rep = glc::run_experiment(cfg);
  glc::emit_report(rep, cfg.output);
  std::printf("%s: wrote %s.json (%zu table%s), wall time %.2fs\n", experiment.c_str(),
              cfg.output.c_str(), rep.tables.size(), rep.tables.size() == 1 ? "" : "s",
              rep.wall_time_s);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glc - numerical laboratory for the weighted-identity / Carleman / "
               "null-control machinery of the complex Ginzburg-Landau equation"};
  app.require_subcommand(1);

  static const std::vector<std::string> kExperiments = {
      "verify-identity", "carleman-sweep",     "observability", "constant-vs-potential",
      "null-control",    "semilinear-control", "mms"};

  std::string config_path;
  std::string output_override;
  std::vector<std::string> overrides;
  std::string chosen;

  for (const auto& name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--set", overrides, "key=value override (repeatable, e.g. weights.mu=4)");
    sub->add_option("--output", output_override, "output path prefix");
    sub->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run(chosen, config_path, overrides, output_override);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
