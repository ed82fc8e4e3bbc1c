#include "levynls/commands.hpp"
#include "levynls/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

/// Exit codes: 0 ok, 1 failed checks, 2 configuration or usage error,
/// 3 output error, 4 numerical failure.
int run(const std::string& command, const std::string& config_path, const levynls::Overrides& o) {
  using namespace levynls;
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    apply_overrides(config, o);
    if (command == "simulate") return cmd_simulate(config, std::cout);
    if (command == "converge") return cmd_converge(config, std::cout);
    if (command == "moments") return cmd_moments(config, std::cout);
    return cmd_verify(config, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin simulator for Schroedinger equations with Marcus-type Levy noise"};
  app.require_subcommand(1, 1);

  std::string config_path;
  levynls::Overrides overrides;
  std::uint64_t seed = 0;
  std::string out;
  int trajectories = 0;
  int threads = 0;

  for (const auto& [name, help] :
       {std::pair{"simulate", "integrate trajectories and write time series"},
        std::pair{"converge", "coupled runs across Galerkin levels"},
        std::pair{"verify", "run the property checks"},
        std::pair{"moments", "ensemble moment and Aldous statistics"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--trajectories", trajectories, "number of trajectories")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--out")) overrides.out_dir = out;
  if (sub->count("--trajectories")) overrides.trajectories = trajectories;
  if (sub->count("--threads")) overrides.threads = threads;
  return run(sub->get_name(), config_path, overrides);
}
