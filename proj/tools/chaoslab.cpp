#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "chaoslab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: chaos-expansion experiments over Gaussian space"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand(
      "run", "run the experiment described by a key = value config file");
  run->add_option("config", config_path, "path to the config file")
      ->required();

  CLI::App* selftest =
      app.add_subcommand("selftest", "run the built-in invariant checks");

  std::string oracle_name;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "print a brute-force reference table "
                "(quadrature, cauchy-binet, wick, catalan)");
  oracle->add_option("name", oracle_name, "table name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const chaoslab::ExperimentConfig config =
          chaoslab::parse_config_file(config_path);
      chaoslab::run_experiment(config);
      std::printf("wrote %s and %s.json\n", config.output.c_str(),
                  config.output.c_str());
      return 0;
    }
    if (selftest->parsed()) {
      std::fputs(chaoslab::selftest_text().c_str(), stdout);
      return 0;
    }
    if (oracle->parsed()) {
      std::fputs(chaoslab::oracle_text(oracle_name).c_str(), stdout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "chaoslab: %s\n", e.what());
    return 1;
  }
  return 0;
}
