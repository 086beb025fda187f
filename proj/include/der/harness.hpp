#ifndef DER_HARNESS_HPP_
#define DER_HARNESS_HPP_

#include <functional>
#include <string>
#include <vector>

#include "der/config.hpp"
#include "der/events.hpp"
#include "der/types.hpp"

namespace der {

struct IterationRecord {
    int iteration = 0;
    long timesteps = 0;   // cumulative env steps at the end of the iteration
    long episodes = 0;    // episodes completed within the iteration
    long successes = 0;
    double success_rate = 0.0;
    double mean_reward = 0.0;
    double wall_seconds = 0.0;  // 0 in deterministic mode so CSVs are reproducible
};

struct ExperimentResult {
    std::vector<IterationRecord> records;
    long total_episodes = 0;
    long total_timesteps = 0;
};

/// Scripted demonstrations with distinct seeds, in place of teleoperation.
std::vector<Episode> generate_demos(const ExperimentConfig& cfg, int count);

struct RunOptions {
    std::string out_dir;        // CSV + checkpoints land here; empty = no files
    std::string run_name = "run";
    EventLog* events = nullptr;
    std::function<void(const IterationRecord&)> on_iteration;
    std::function<bool(const IterationRecord&)> stop_after;  // true = stop early
};

/// One ablation cell end to end: demos, structure init, workers + trainer,
/// per-iteration metrics, CSV and final checkpoint.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

void write_metrics_csv(const std::string& path, const std::vector<IterationRecord>& records);
std::vector<IterationRecord> read_metrics_csv(const std::string& path);

struct CellSummary {
    int iterations = 0;  // truncated to the shortest run
    std::vector<double> mean_success;
    std::vector<double> ci_half;  // 95% t-interval half width across seeds
    std::vector<double> mean_reward;
    std::vector<long> iters_to_half;  // per seed; -1 when never reached
};

CellSummary summarize(const std::vector<std::string>& csv_paths, double threshold = 0.5);
void write_summary_csv(const std::string& path, const CellSummary& s);

double t_quantile_975(int df);

}  // namespace der

#endif  // DER_HARNESS_HPP_
