#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mkvnet/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MLP estimators for McKean-Vlasov SDEs and the ReLU networks that realize them"};
  std::string config_path;
  std::string suite_name = "all";
  std::uint64_t seed = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--suite", suite_name, "suite to run")
      ->check(CLI::IsMember({"equivalence", "bounds", "convergence", "scaling", "all"}));
  auto* seed_opt = app.add_option("--seed", seed, "base seed (default: config seed)");
  app.add_option("--out", out_dir, "output directory (default: config output)");
  CLI11_PARSE(app, argc, argv);

  try {
    mkvnet::ExperimentConfig config =
        config_path.empty() ? mkvnet::ExperimentConfig{} : mkvnet::load_config(config_path);
    if (seed_opt->count() == 0) seed = config.seed;
    if (out_dir.empty()) out_dir = config.output;
    return mkvnet::run_suite(config, *mkvnet::parse_suite(suite_name), seed, out_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "mkvnet: " << e.what() << '\n';
    return 2;
  }
}
