#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hotspan/detector.hpp"
#include "hotspan/episode.hpp"
#include "hotspan/schedule.hpp"
#include "hotspan/simulate.hpp"

namespace hotspan {

/**
 * One comparison run: simulate datasets from a hot-span truth and score the
 * detectors against it.  Every random draw descends from master_seed:
 * stream 0 seeds graph generation, stream 1 is the trial root; each trial's
 * sub-stream 0 seeds its dataset and sub-streams 1.. seed the baseline's
 * candidate sampling, one per configured k.
 */
struct ExperimentConfig {
  std::string graph_file;    // when set, loaded instead of generated
  int nodes = 2000;
  double mean_out_degree = 10.0;
  double p1 = 0.1;
  double p2 = 0.3;
  Span span{10.0, 20.0};
  double rate = 1.0;
  int episodes = 1;
  double horizon = 0.0;      // <= 0 means three times span.end
  int trials = 5;
  std::uint64_t master_seed = 1;
  bool run_proposed = true;
  std::vector<int> naive_k;  // one baseline run per entry
  int workers = 1;
  SimulateOptions simulate;
  DetectOptions detect;
  double activity_bin_width = 0.0;  // > 0: emit the first trial's activity series
};

struct TrialRow {
  int trial = 0;
  std::string method;  // "proposed" or "naive-<k>"
  int naive_k = 0;
  std::uint64_t dataset_seed = 0;
  Span span;
  double p1 = 0.0;
  double p2 = 0.0;
  double rate = 0.0;
  double objective = 0.0;
  double span_err = 0.0;
  double prob_err = 0.0;
  long em_invocations = 0;
  double wall_seconds = 0.0;
  bool weak_evidence = false;
  std::string error;  // non-empty rows are excluded from aggregates
};

struct MethodAggregate {
  std::string method;
  int trials = 0;    // successful rows
  int failures = 0;
  double mean_span_err = 0.0;
  double std_span_err = 0.0;
  double mean_prob_err = 0.0;
  double std_prob_err = 0.0;
  double mean_em = 0.0;
  double mean_wall = 0.0;
  double total_wall = 0.0;
};

struct ActivityBin {
  double bin_start = 0.0;
  double ratio = 0.0;  // activations in the bin over the episode total
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRow> rows;
  std::vector<MethodAggregate> aggregates;
  std::vector<std::vector<ActivityBin>> activity;  // per episode, first trial only
};

/**
 * Runs all trials (concurrently up to config.workers) and aggregates per
 * method.  Deterministic given master_seed except for wall-clock fields.
 */
ExperimentReport run_experiment(const ExperimentConfig& config);

/** Per-episode activation histogram, normalized to sum to 1. */
std::vector<std::vector<ActivityBin>> activity_series(const Dataset& data, double bin_width);

void save_report(const ExperimentReport& report, std::ostream& out);
void save_report_file(const ExperimentReport& report, const std::string& path);

}  // namespace hotspan
