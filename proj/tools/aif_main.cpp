#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aif/config.hpp"
#include "aif/experiment.hpp"
#include "aif/selftest.hpp"

namespace {

void print_synopsis(const aif::RunSummary& summary, const aif::ExperimentConfig& config) {
  int collapsed = 0, failed = 0;
  double final_sum = 0.0;
  int final_n = 0;
  for (int k = 0; k < summary.trials; ++k) {
    if (!summary.errors[k].empty()) {
      ++failed;
      continue;
    }
    if (summary.collapsed[k]) ++collapsed;
    if (!std::isnan(summary.final_window_mean[k])) {
      final_sum += summary.final_window_mean[k];
      ++final_n;
    }
  }
  std::printf("env=%s agent=%s trials=%d episodes=%d\n", config.env.c_str(),
              config.agent.c_str(), summary.trials, summary.episodes);
  std::printf("successful trials: %d/%d", summary.n_trials, summary.trials);
  if (failed > 0) std::printf("  (failed: %d)", failed);
  std::printf("\n");
  if (final_n > 0) {
    std::printf("final %d-episode mean reward (avg over trials): %.2f\n",
                config.collapse_window, final_sum / final_n);
  }
  std::printf("collapse-flagged trials: %d/%d (threshold %.1f)\n", collapsed,
              summary.n_trials, config.resolved_collapse_threshold());
  std::printf("outputs in %s\n", config.out_dir.c_str());
}

int run_train(aif::ExperimentConfig config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(std::filesystem::path(config.out_dir) / "config.txt");
    out << aif::serialize_config(config);
  }
  const aif::RunSummary summary = aif::run_experiment(config);
  print_synopsis(summary, config);
  return summary.n_trials > 0 ? 0 : 2;
}

int run_summarize(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) {
    std::fprintf(stderr, "error: no manifest.json in %s\n", dir.c_str());
    return 1;
  }
  nlohmann::json manifest;
  in >> manifest;
  std::istringstream cfg_stream(manifest.at("config").get<std::string>());
  aif::ExperimentConfig config = aif::parse_config(cfg_stream);

  const auto results = aif::load_records(dir, config);
  const aif::RunSummary summary = aif::summarize_results(results, config);
  aif::emit_outputs(results, summary, config, dir);
  print_synopsis(summary, config);
  return 0;
}

int run_check() {
  const auto checks = aif::selftest::run_selftests();
  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("[%s] %-28s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deep active inference agents on classic control tasks"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "run a multi-trial experiment");
  std::string env, agent, preset, config_file, out_dir;
  int episodes = -1, trials = -1, workers = -1, log_every = -1;
  long long seed = -1;
  bool no_entropy = false, no_epistemic = false, save_agents = false;
  train->add_option("--env", env, "cartpole | acrobot");
  train->add_option("--agent", agent, "aif | qlearning | actorcritic");
  train->add_option("--episodes", episodes, "episodes per trial");
  train->add_option("--trials", trials, "number of independent trials");
  train->add_option("--seed", seed, "base seed; trial k uses seed+k");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--preset", preset, "desk | paper");
  train->add_option("--config", config_file, "flat key=value config file");
  train->add_option("--workers", workers, "parallel trial workers (0 = auto)");
  train->add_option("--log-every", log_every, "progress line cadence (episodes)");
  train->add_flag("--no-entropy", no_entropy, "ablate the policy entropy term");
  train->add_flag("--no-epistemic", no_epistemic, "ablate the epistemic bonus");
  train->add_flag("--save-agents", save_agents, "checkpoint each trial's final agent");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "recompute summary from logs");
  std::string in_dir;
  summarize->add_option("--in", in_dir, "experiment output directory")->required();

  // check
  app.add_subcommand("check", "run gradient and oracle self-tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) {
      aif::ExperimentConfig config;
      if (!config_file.empty()) config = aif::load_config_file(config_file);
      // Flags override the file; the preset fixes scale before explicit
      // --episodes/--trials overrides.
      if (!env.empty()) config.env = env;
      if (!agent.empty()) config.agent = agent;
      if (!preset.empty()) {
        if (preset == "desk") {
          config.trials = 10;
          config.episodes = config.env == "acrobot" ? 1000 : 2000;
        } else if (preset == "paper") {
          config.trials = 20;
          config.episodes = 15000;
        } else {
          throw std::invalid_argument("unknown preset: " + preset);
        }
      }
      if (episodes >= 0) config.episodes = episodes;
      if (trials >= 0) config.trials = trials;
      if (seed >= 0) config.seed = std::uint64_t(seed);
      if (!out_dir.empty()) config.out_dir = out_dir;
      if (workers >= 0) config.workers = workers;
      if (log_every >= 0) config.log_every = log_every;
      if (no_entropy) config.entropy_enabled = false;
      if (no_epistemic) config.epistemic_enabled = false;
      if (save_agents) config.save_agents = true;
      return run_train(std::move(config));
    }
    if (summarize->parsed()) return run_summarize(in_dir);
    return run_check();
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
