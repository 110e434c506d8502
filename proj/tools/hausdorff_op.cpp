#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hausdorff/cli.hpp"

int main(int argc, char** argv) {
  using namespace hausdorff;

  CLI::App app{"Hausdorff-type operator experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiments of a config file");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  bool list = false;
  run->add_option("config", config_path, "JSON config file");
  run->add_option("--out", out_dir, "output directory (overrides config 'output')");
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--resolution", resolution, "override the quadrature resolution")->check(CLI::PositiveNumber);
  run->add_flag("--list-experiments", list, "print the available experiments and exit");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& name : cli::experiment_names()) std::cout << name << '\n';
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "run: a config file is required\n";
    return 2;
  }

  cli::RunConfig config;
  try {
    config = cli::load_config(config_path);
  } catch (const cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  if (seed) config.seed = *seed;
  if (resolution) config.resolution = *resolution;
  if (out_dir) config.output = *out_dir;

  cli::RunResult result;
  try {
    result = cli::run(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    cli::write_outputs(result, config.output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  std::cout << result.summary;
  return result.exit_code;
}
