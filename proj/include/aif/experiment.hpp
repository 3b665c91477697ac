#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "aif/checkpoint.hpp"
#include "aif/config.hpp"
#include "aif/runner.hpp"

namespace aif {

inline constexpr const char* kCodeVersion = "deepaif 0.1.0";

// Aggregated multi-trial statistics. Curves cover successful trials only;
// failed trials keep their partial records and surface through `errors`.
struct RunSummary {
  int trials = 0;
  int episodes = 0;
  Vec mean_reward;              // per episode
  Vec std_reward;               // per episode, population std across trials
  int n_trials = 0;             // successful trials contributing to curves
  Vec final_window_mean;        // per trial, NaN for failed trials
  std::vector<bool> collapsed;  // per trial, false for failed trials
  std::vector<std::string> errors;  // per trial, empty string = success
  // Mean epistemic bonus early (first 10 learning episodes) and late (final
  // window) per trial; NaN when undefined.
  Vec epistemic_early;
  Vec epistemic_late;
};

// A trial is collapse-flagged when its mean reward over the final `window`
// episodes falls strictly below `threshold`.
inline bool detect_collapse(const std::vector<EpisodeRecord>& records,
                            int window, double threshold) {
  if (int(records.size()) < window) {
    throw std::invalid_argument("detect_collapse: fewer records than window");
  }
  double sum = 0.0;
  for (std::size_t i = records.size() - window; i < records.size(); ++i) {
    sum += records[i].total_reward;
  }
  return sum / window < threshold;
}

namespace detail {

inline double window_mean(const std::vector<EpisodeRecord>& records,
                          std::size_t begin, std::size_t end,
                          double EpisodeRecord::* field) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = begin; i < end && i < records.size(); ++i) {
    const double v = records[i].*field;
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  return n > 0 ? sum / n : std::nan("");
}

}  // namespace detail

inline RunSummary summarize_results(const std::vector<TrialResult>& results,
                                    const ExperimentConfig& config) {
  RunSummary s;
  s.trials = int(results.size());
  s.episodes = config.episodes;
  s.final_window_mean.assign(results.size(), std::nan(""));
  s.collapsed.assign(results.size(), false);
  s.errors.assign(results.size(), "");
  s.epistemic_early.assign(results.size(), std::nan(""));
  s.epistemic_late.assign(results.size(), std::nan(""));

  const int window = config.collapse_window;
  const double threshold = config.resolved_collapse_threshold();

  std::vector<const TrialResult*> ok;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const TrialResult& r = results[k];
    if (r.failed) {
      s.errors[k] = r.error;
      continue;
    }
    ok.push_back(&r);
    const std::size_t n = r.records.size();
    const std::size_t from = n >= std::size_t(window) ? n - window : 0;
    s.final_window_mean[k] =
        detail::window_mean(r.records, from, n, &EpisodeRecord::total_reward);
    if (int(n) >= window) {
      s.collapsed[k] = detect_collapse(r.records, window, threshold);
    }
    // First ten episodes that actually learned vs the final window.
    std::vector<EpisodeRecord> learned;
    for (const auto& rec : r.records) {
      if (rec.learn_steps > 0) learned.push_back(rec);
      if (learned.size() >= 10) break;
    }
    if (!learned.empty()) {
      s.epistemic_early[k] = detail::window_mean(
          learned, 0, learned.size(), &EpisodeRecord::mean_epistemic);
    }
    s.epistemic_late[k] =
        detail::window_mean(r.records, from, n, &EpisodeRecord::mean_epistemic);
  }

  s.n_trials = int(ok.size());
  s.mean_reward.assign(config.episodes, std::nan(""));
  s.std_reward.assign(config.episodes, std::nan(""));
  for (int ep = 0; ep < config.episodes; ++ep) {
    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (const TrialResult* r : ok) {
      if (ep < int(r->records.size())) {
        const double v = r->records[ep].total_reward;
        sum += v;
        sum2 += v * v;
        ++n;
      }
    }
    if (n > 0) {
      const double mean = sum / n;
      s.mean_reward[ep] = mean;
      const double var = std::max(0.0, sum2 / n - mean * mean);
      s.std_reward[ep] = std::sqrt(var);
    }
  }
  return s;
}

// ---- output files -------------------------------------------------------

inline nlohmann::json record_to_json(const EpisodeRecord& r) {
  return nlohmann::json{{"trial", r.trial},
                        {"episode", r.episode},
                        {"reward", r.total_reward},
                        {"length", r.length},
                        {"transition_loss", r.mean_transition_loss},
                        {"efe_loss", r.mean_efe_loss},
                        {"policy_loss", r.mean_policy_loss},
                        {"policy_entropy", r.mean_policy_entropy},
                        {"epistemic", r.mean_epistemic},
                        {"learn_steps", r.learn_steps}};
}

inline EpisodeRecord record_from_json(const nlohmann::json& j) {
  auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::nan("") : v.get<double>();
  };
  EpisodeRecord r;
  r.trial = j.at("trial").get<int>();
  r.episode = j.at("episode").get<int>();
  r.total_reward = j.at("reward").get<double>();
  r.length = j.at("length").get<int>();
  r.mean_transition_loss = num("transition_loss");
  r.mean_efe_loss = num("efe_loss");
  r.mean_policy_loss = num("policy_loss");
  r.mean_policy_entropy = num("policy_entropy");
  r.mean_epistemic = num("epistemic");
  r.learn_steps = j.at("learn_steps").get<int>();
  return r;
}

namespace detail {

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Writes records.jsonl, summary.csv, rewards_by_trial.csv and manifest.json.
inline void emit_outputs(const std::vector<TrialResult>& results,
                         const RunSummary& summary,
                         const ExperimentConfig& config,
                         const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream out(fs::path(dir) / "records.jsonl");
    if (!out) throw std::runtime_error("emit_outputs: cannot write records.jsonl");
    for (const auto& r : results) {
      for (const auto& rec : r.records) out << record_to_json(rec).dump() << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "summary.csv");
    if (!out) throw std::runtime_error("emit_outputs: cannot write summary.csv");
    out << "episode,mean_reward,std_reward,n_trials\n";
    for (int ep = 0; ep < summary.episodes; ++ep) {
      out << ep << "," << detail::csv_double(summary.mean_reward[ep]) << ","
          << detail::csv_double(summary.std_reward[ep]) << ","
          << summary.n_trials << "\n";
    }
  }
  {
    std::ofstream out(fs::path(dir) / "rewards_by_trial.csv");
    if (!out) throw std::runtime_error("emit_outputs: cannot write rewards_by_trial.csv");
    out << "episode";
    for (int k = 0; k < summary.trials; ++k) out << ",trial_" << k;
    out << "\n";
    for (int ep = 0; ep < summary.episodes; ++ep) {
      out << ep;
      for (const auto& r : results) {
        out << ",";
        if (!r.failed && ep < int(r.records.size())) {
          out << detail::csv_double(r.records[ep].total_reward);
        } else {
          out << "nan";
        }
      }
      out << "\n";
    }
  }
  {
    nlohmann::json manifest;
    manifest["code_version"] = kCodeVersion;
    manifest["config"] = serialize_config(config);
    manifest["base_seed"] = config.seed;
    nlohmann::json trials = nlohmann::json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
      trials.push_back(
          {{"trial", int(k)},
           {"seed", config.seed + k},
           {"failed", results[k].failed},
           {"error", summary.errors[k]},
           {"collapsed", bool(summary.collapsed[k])},
           {"final_window_mean", summary.final_window_mean[k]}});
    }
    manifest["trials"] = trials;
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw std::runtime_error("emit_outputs: cannot write manifest.json");
    out << manifest.dump(1) << "\n";
  }
}

// Runs all trials (parallel across a worker pool), aggregates, and writes
// output files. Every trial is seeded independently, so the scheduling
// order cannot change any numerical result.
inline RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);

  const int n_trials = config.trials;
  std::vector<TrialResult> results(n_trials);
  std::atomic<int> next{0};
  std::mutex log_mutex;

  int workers = config.workers > 0 ? config.workers
                                   : int(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n_trials);

  auto worker = [&]() {
    while (true) {
      const int k = next.fetch_add(1);
      if (k >= n_trials) break;

      std::ofstream stream(fs::path(config.out_dir) /
                           ("records_trial_" + std::to_string(k) + ".jsonl"));
      EpisodeSink sink = [&](const EpisodeRecord& rec) {
        stream << record_to_json(rec).dump() << "\n";
        if (config.log_every > 0 && (rec.episode + 1) % config.log_every == 0) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::fprintf(stderr, "[%s/%s trial %d] episode %d reward %.1f\n",
                       config.env.c_str(), config.agent.c_str(), k,
                       rec.episode + 1, rec.total_reward);
        }
      };
      std::function<void(const Agent&)> on_complete;
      if (config.save_agents) {
        on_complete = [&](const Agent& agent) {
          save_checkpoint(agent, (fs::path(config.out_dir) /
                                  ("agent_trial_" + std::to_string(k) + ".json"))
                                     .string());
        };
      }
      results[k] = run_trial(config, k, sink, on_complete);
      if (results[k].failed) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::fprintf(stderr, "[trial %d] FAILED: %s\n", k,
                     results[k].error.c_str());
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  RunSummary summary = summarize_results(results, config);
  emit_outputs(results, summary, config, config.out_dir);
  return summary;
}

// Rebuilds trial results from a records.jsonl written by emit_outputs.
inline std::vector<TrialResult> load_records(const std::string& dir,
                                             const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "records.jsonl");
  if (!in) throw std::runtime_error("load_records: cannot open records.jsonl in " + dir);
  std::vector<TrialResult> results(config.trials);
  for (int k = 0; k < config.trials; ++k) results[k].trial = k;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const EpisodeRecord rec = record_from_json(nlohmann::json::parse(line));
    if (rec.trial < 0 || rec.trial >= config.trials) {
      throw std::runtime_error("load_records: trial index out of range");
    }
    results[rec.trial].records.push_back(rec);
  }
  // A trial with fewer records than requested episodes did not finish.
  for (auto& r : results) {
    if (int(r.records.size()) < config.episodes) {
      r.failed = true;
      r.error = "incomplete records (" + std::to_string(r.records.size()) + "/" +
                std::to_string(config.episodes) + " episodes)";
    }
  }
  return results;
}

}  // namespace aif
