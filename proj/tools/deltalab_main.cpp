#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <string>

#include "deltalab/experiment.hpp"

// Exit codes: 0 ok, 1 numerical failure, 2 config error.
int main(int argc, char** argv) {
  CLI::App app{"deltalab: Monte Carlo spectral statistics for random point interactions"};
  std::string config_path;
  int workers = 0;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  std::string output_override;

  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--workers", workers, "worker threads (default: all cores)");
  auto* seed_opt = app.add_option("--seed", seed_override, "override master_seed");
  app.add_option("--output-dir", output_override, "override output_dir");
  CLI11_PARSE(app, argc, argv);
  has_seed = seed_opt->count() > 0;

  try {
    deltalab::ExperimentConfig cfg = deltalab::parse_config_file(config_path);
    if (workers > 0) cfg.workers = workers;
    if (has_seed) cfg.master_seed = seed_override;
    if (!output_override.empty()) cfg.output_dir = output_override;
    deltalab::run_experiment(cfg);
    return 0;
  } catch (const deltalab::ConfigError& e) {
    nlohmann::json err{{"error", e.what()}, {"type", "config"}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}, {"type", "numerical"}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
}
