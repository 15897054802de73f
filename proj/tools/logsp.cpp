#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace logsp::cli;

  CLI::App app{"Planar Schrodinger-Poisson toolkit: property checks, ground-state solver, Moser certificate."};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = ".";
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, const std::filesystem::path&, std::ostream&);
  };
  const Entry entries[] = {
      {"verify", "run the property suite; exit 0 iff every check passes", run_verify},
      {"solve", "find a symmetric ground state (Nehari descent or mountain pass)", run_solve},
      {"moser", "threshold certificate for Moser functions", run_moser},
      {"kernel-bench", "direct vs FFT convolution timings and agreement", run_kernel_bench},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "TOML-style run configuration")->required();
    sub->add_option("--out", out_dir, "directory for reports (default: current directory)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  const auto* chosen = app.get_subcommands().front();
  const Entry* entry = nullptr;
  for (const auto& e : entries) {
    if (chosen->get_name() == e.name) entry = &e;
  }

  RunConfig cfg;
  try {
    cfg = RunConfig::load(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    return entry->run(cfg, out_dir, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kDiverged;
  }
}
