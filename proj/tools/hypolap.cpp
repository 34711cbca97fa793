#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "hypolap/errors.hpp"
#include "hypolap/pipeline.hpp"

namespace pl = hypolap::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"Hypoelliptic diffusion maps on the unit tangent bundle of S^2"};
  app.require_subcommand(1);

  const std::map<std::string, std::function<void(const pl::RunConfig&)>> stages = {
      {"sample", pl::run_sample}, {"build", pl::run_build}, {"eig", pl::run_eig},
      {"embed", pl::run_embed},   {"afap", pl::run_afap},   {"report", pl::run_report},
  };
  const std::map<std::string, std::string> help = {
      {"sample", "draw base points and fibre samples"},
      {"build", "assemble the block weight matrix and degrees"},
      {"eig", "smallest Laplacian eigenpairs and eigenvalue clusters"},
      {"embed", "hypoelliptic diffusion map coordinates"},
      {"afap", "section extraction from an anchor sample"},
      {"report", "collect run artifacts into report.json"},
  };

  std::string config_file;
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::string> raw;
  for (const auto& key : pl::config_keys()) raw[key];

  for (const auto& [name, fn] : stages) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_file, "flat key = value configuration file");
    for (const auto& key : pl::config_keys()) {
      sub->add_option("--" + key, raw[key], "override config key " + key);
    }
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  for (const auto& key : pl::config_keys()) {
    if (chosen->count("--" + key) > 0) overrides[key] = raw[key];
  }

  try {
    const pl::RunConfig cfg = pl::load_config(config_file, overrides);
    stages.at(chosen->get_name())(cfg);
  } catch (const hypolap::Error& e) {
    std::cerr << "hypolap " << chosen->get_name() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
