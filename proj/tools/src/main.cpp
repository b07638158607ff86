// Copyright 2026 The ibsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config_util.hpp"
#include "ibsplit/common/error.hpp"

namespace cli = ibsplit::cli;

int main(int argc, char** argv) {
  CLI::App app{
      "ibsplit: dynamic split learning with information-theoretic analysis"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  cli::GlobalArgs global;
  app.add_option("--config", global.config_path,
                 "JSON configuration file; flags override its values");
  auto* seed_opt =
      app.add_option("--seed", global.seed, "Master random seed");
  app.add_option("--out", global.out_dir,
                 "Output directory (created if missing)");

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic sequence dataset with a known-MI oracle");

  cli::TrainFlags train_flags;
  CLI::App* train = app.add_subcommand(
      "train", "Run two-phase cascaded training and verify mode ordering");
  train->add_option("--data", train_flags.data, "Input CSV dataset");

  cli::AnalyzeFlags analyze_flags;
  CLI::App* analyze = app.add_subcommand(
      "analyze",
      "Compute information-plane and temporal curves from recorded "
      "activations");
  analyze->add_option("--records", analyze_flags.records,
                      "Activations file written by train");

  cli::SimulateFlags sim_flags;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the split-inference link simulation");
  simulate->add_option("--checkpoint", sim_flags.checkpoint,
                       "Cascade checkpoint written by train");
  simulate->add_option("--data", sim_flags.data, "Input CSV dataset");
  simulate->add_option("--mode", sim_flags.mode,
                       "Mode rule: adaptive, informative or compressed");

  cli::EstimateFlags est_flags;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Estimate mutual information from a role-headed CSV");
  estimate->add_option("--input", est_flags.input,
                       "CSV whose header assigns column roles "
                       "(x, y, z, ignore)");
  estimate->add_option("--estimator", est_flags.estimators,
                       "Estimator to run (repeatable): binning, plugin, kde, "
                       "gcmi, conditional_gcmi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  global.seed_set = seed_opt->count() > 0;

  try {
    const nlohmann::json config = cli::load_config_file(global.config_path);
    if (synth->parsed()) return cli::cmd_synth(global, config);
    if (train->parsed()) return cli::cmd_train(global, config, train_flags);
    if (analyze->parsed()) {
      return cli::cmd_analyze(global, config, analyze_flags);
    }
    if (simulate->parsed()) {
      return cli::cmd_simulate(global, config, sim_flags);
    }
    if (estimate->parsed()) {
      return cli::cmd_estimate(global, config, est_flags);
    }
    std::cerr << app.help() << "\n";
    std::cerr << "error: a subcommand is required\n";
    return 2;
  } catch (const ibsplit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ibsplit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
