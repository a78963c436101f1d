#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l2e/config.hpp"
#include "l2e/planmdp.hpp"

namespace l2e {

struct EvalRecord {
  std::int64_t step = 0;
  int episodes = 0;
  std::vector<bool> successes;
  double success_rate = 0.0;
  /// Mean learner losses since the previous record (zero before learning starts).
  SacLosses losses;
};

struct TrainResult {
  std::vector<EvalRecord> evals;
  std::int64_t steps = 0;
  int episodes = 0;
  std::size_t buffer_size = 0;
  std::size_t stored_plans = 0;
  std::int64_t updates = 0;
};

struct TrainOptions {
  /// Output directory; nothing is written when empty.
  std::filesystem::path out;
  /// Called after every episode with (steps, episodes).
  std::function<void(std::int64_t, int)> on_episode;
};

/// Trains one agent. Seeds every random stream from `seed`; identical config
/// and seed give identical results and metric files.
TrainResult train(const ExperimentConfig& config, std::uint64_t seed, const TrainOptions& options = {});

/// Agents seed, seed+1, ... each in out/agent_<i>, run on up to `threads`
/// workers.
std::vector<TrainResult> train_agents(const ExperimentConfig& config, std::uint64_t seed, int agents,
                                      const std::filesystem::path& out, int threads);

/// Worker count from L2E_THREADS (default: hardware concurrency), at least 1.
int worker_threads();

/// Mean over all rollouts and the standard deviation of the per-agent success
/// rates divided by sqrt(#agents) (sample deviation; 0 for a single agent).
struct SuccessSummary {
  double mean = 0.0;
  double std_of_mean = 0.0;
  int agents = 0;
  int rollouts = 0;
};
SuccessSummary summarize(const std::vector<std::vector<bool>>& per_agent);

/// Deterministic-policy evaluation of a saved agent on `rollouts` fresh tasks.
std::vector<bool> evaluate_checkpoint(const std::filesystem::path& checkpoint,
                                      const std::optional<ExperimentConfig>& config, int rollouts,
                                      std::uint64_t seed);

/// Reads agent metric files below the given directories and writes one
/// `<label>.tsv` (step, mean, halfwidth, agents) per series plus plot.py.
/// Returns the written series labels.
std::vector<std::string> emit_plots(const std::vector<std::filesystem::path>& runs,
                                    const std::filesystem::path& out);

struct MetricsFile {
  std::map<std::string, std::string> header;
  std::vector<std::int64_t> steps;
  std::vector<double> success_rates;
};
MetricsFile read_metrics(const std::filesystem::path& path);

}  // namespace l2e
