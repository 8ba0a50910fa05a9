#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"

using anderson::cli::ConfigError;
using anderson::cli::RunConfig;

namespace {

const std::map<std::string, std::string> kDescriptions{
    {"spectrum", "Dirichlet eigenvalues or one eigenvector"},
    {"dos", "density of states by counting and by the invariant measure"},
    {"lyapunov", "Lyapunov exponent and variance over an energy range"},
    {"invariant-measure", "stationary phase density"},
    {"mixing", "autocorrelation decay of the phase chain"},
    {"fb-verify", "eigenvector sums against the forward-backward process"},
    {"dtheta-check", "derivative of the end phase against its closed form"},
    {"tails", "eigenvector centers, tent slopes and fluctuations"},
    {"temperature", "temperature profile against its prediction"},
    {"critical", "tails at disorder scaled by 1/sqrt(N)"},
    {"periodic", "periodic spectrum from the trace condition"},
    {"figure", "data for the tail and periodic figures"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer-matrix and Prufer-phase simulations of the 1D Anderson model"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : anderson::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", config_path, "key=value config file");
    auto& store = flags[name];
    for (const auto& key : anderson::cli::config_keys()) sub->add_option(std::string("--") + key.name, store[key.name], key.help);
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << anderson::cli::error_json("usage", e.what()) << "\n";
    return 2;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      RunConfig config = RunConfig::defaults(name);
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
        std::ostringstream text;
        text << f.rdbuf();
        config.merge_text(text.str());
      }
      config.merge_environment();
      for (const auto& key : anderson::cli::config_keys()) {
        const std::string flag = std::string("--") + key.name;
        if (sub->count(flag) > 0) config.set(key.name, flags[name][key.name]);
      }
      return anderson::cli::run(config, std::cout, std::cerr);
    } catch (const ConfigError& e) {
      std::cerr << anderson::cli::error_json("config", e.what()) << "\n";
      return 2;
    }
  }
  return 2;
}
