#include "hotspan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hotspan/errors.hpp"
#include "hotspan/rng.hpp"

namespace hotspan {

namespace {

struct MethodSpec {
  std::string name;
  int naive_k = 0;  // 0 means the proposed method
};

std::vector<MethodSpec> method_list(const ExperimentConfig& config) {
  std::vector<MethodSpec> methods;
  if (config.run_proposed) methods.push_back({"proposed", 0});
  for (int k : config.naive_k) methods.push_back({"naive-" + std::to_string(k), k});
  if (methods.empty()) throw std::invalid_argument("experiment: no methods configured");
  return methods;
}

void fill_from_report(TrialRow& row, const DetectionReport& report,
                      const ExperimentConfig& config) {
  row.span = report.span;
  row.p1 = report.p1;
  row.p2 = report.p2;
  row.rate = report.rate;
  row.objective = report.objective;
  row.em_invocations = report.em_invocations;
  row.wall_seconds = report.wall_seconds;
  row.weak_evidence = report.weak_evidence;
  row.span_err = span_error(report.span, config.span);
  row.prob_err = prob_error(report.p1, report.p2, config.p1, config.p2);
}

MethodAggregate aggregate_rows(const std::string& method, const std::vector<TrialRow>& rows) {
  MethodAggregate agg;
  agg.method = method;
  std::vector<double> span_errs, prob_errs;
  for (const auto& row : rows) {
    if (row.method != method) continue;
    if (!row.error.empty()) {
      agg.failures++;
      continue;
    }
    agg.trials++;
    span_errs.push_back(row.span_err);
    prob_errs.push_back(row.prob_err);
    agg.mean_em += static_cast<double>(row.em_invocations);
    agg.mean_wall += row.wall_seconds;
    agg.total_wall += row.wall_seconds;
  }
  const auto mean_std = [](const std::vector<double>& xs, double& mean, double& stdev) {
    if (xs.empty()) return;
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  };
  mean_std(span_errs, agg.mean_span_err, agg.std_span_err);
  mean_std(prob_errs, agg.mean_prob_err, agg.std_prob_err);
  if (agg.trials > 0) {
    agg.mean_em /= agg.trials;
    agg.mean_wall /= agg.trials;
  }
  return agg;
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["graph_file"] = c.graph_file;
  j["nodes"] = c.nodes;
  j["mean_out_degree"] = c.mean_out_degree;
  j["p1"] = c.p1;
  j["p2"] = c.p2;
  j["span"] = {c.span.start, c.span.end};
  j["rate"] = c.rate;
  j["episodes"] = c.episodes;
  j["horizon"] = c.horizon;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["run_proposed"] = c.run_proposed;
  j["naive_k"] = c.naive_k;
  j["workers"] = c.workers;
  j["min_active"] = c.simulate.min_active;
  j["weak_evidence_threshold"] = c.detect.weak_evidence_threshold;
  j["activity_bin_width"] = c.activity_bin_width;
  return j;
}

}  // namespace

std::vector<std::vector<ActivityBin>> activity_series(const Dataset& data, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("activity_series: bin width must be positive");
  std::vector<std::vector<ActivityBin>> out;
  out.reserve(data.episodes.size());
  for (const auto& ep : data.episodes) {
    std::size_t last_bin = 0;
    for (const auto& a : ep.activations)
      last_bin = std::max(last_bin, static_cast<std::size_t>(std::floor(a.time / bin_width)));
    std::vector<double> counts(last_bin + 1, 0.0);
    for (const auto& a : ep.activations)
      counts[static_cast<std::size_t>(std::floor(a.time / bin_width))] += 1.0;
    std::vector<ActivityBin> series(counts.size());
    const double total = static_cast<double>(ep.activations.size());
    for (std::size_t b = 0; b < counts.size(); ++b)
      series[b] = {static_cast<double>(b) * bin_width, counts[b] / total};
    out.push_back(std::move(series));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  const std::vector<MethodSpec> methods = method_list(config);

  const Graph graph =
      config.graph_file.empty()
          ? generate_random_graph(config.nodes, config.mean_out_degree,
                                  derive_seed(config.master_seed, 0))
          : load_edge_list_file(config.graph_file);
  const PiecewiseSchedule truth =
      PiecewiseSchedule::hot_span(config.p1, config.p2, config.span, config.rate);
  const double horizon =
      config.horizon > 0.0 ? config.horizon : default_horizon(config.span);
  const std::uint64_t trial_root = derive_seed(config.master_seed, 1);

  ExperimentReport report;
  report.config = config;
  report.rows.assign(static_cast<std::size_t>(config.trials) * methods.size(), TrialRow{});
  Dataset first_dataset;

  std::atomic<int> next_trial{0};
  const auto worker = [&]() {
    for (int t = next_trial.fetch_add(1); t < config.trials; t = next_trial.fetch_add(1)) {
      const std::uint64_t trial_seed = derive_seed(trial_root, static_cast<std::uint64_t>(t));
      const std::uint64_t dataset_seed = derive_seed(trial_seed, 0);
      TrialRow* rows = &report.rows[static_cast<std::size_t>(t) * methods.size()];
      for (std::size_t i = 0; i < methods.size(); ++i) {
        rows[i].trial = t;
        rows[i].method = methods[i].name;
        rows[i].naive_k = methods[i].naive_k;
        rows[i].dataset_seed = dataset_seed;
      }
      try {
        const Dataset dataset = simulate_dataset(graph, truth, config.episodes, horizon,
                                                 dataset_seed, config.simulate);
        if (t == 0) first_dataset = dataset;
        const ParentCache cache(graph, dataset);
        int naive_index = 0;
        for (std::size_t i = 0; i < methods.size(); ++i) {
          try {
            if (methods[i].naive_k == 0) {
              fill_from_report(rows[i], detect_proposed(cache, config.detect), config);
            } else {
              const std::uint64_t naive_seed =
                  derive_seed(trial_seed, static_cast<std::uint64_t>(1 + naive_index));
              DetectionReport dr =
                  detect_naive(cache, methods[i].naive_k, naive_seed, config.detect);
              fill_from_report(rows[i], dr, config);
            }
          } catch (const std::exception& e) {
            rows[i].error = e.what();
          }
          if (methods[i].naive_k != 0) naive_index++;
        }
      } catch (const std::exception& e) {
        for (std::size_t i = 0; i < methods.size(); ++i) rows[i].error = e.what();
      }
    }
  };

  const int worker_count = std::min(config.workers, config.trials);
  if (worker_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  report.aggregates.reserve(methods.size());
  for (const auto& m : methods) report.aggregates.push_back(aggregate_rows(m.name, report.rows));
  if (config.activity_bin_width > 0.0 && !first_dataset.episodes.empty())
    report.activity = activity_series(first_dataset, config.activity_bin_width);
  return report;
}

void save_report(const ExperimentReport& report, std::ostream& out) {
  nlohmann::json j;
  j["format"] = "hotspan-report";
  j["version"] = 1;
  j["config"] = config_json(report.config);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json jr;
    jr["trial"] = r.trial;
    jr["method"] = r.method;
    jr["naive_k"] = r.naive_k;
    jr["dataset_seed"] = r.dataset_seed;
    jr["span"] = {r.span.start, r.span.end};
    jr["p1"] = r.p1;
    jr["p2"] = r.p2;
    jr["rate"] = r.rate;
    jr["objective"] = r.objective;
    jr["span_err"] = r.span_err;
    jr["prob_err"] = r.prob_err;
    jr["em_invocations"] = r.em_invocations;
    jr["wall_seconds"] = r.wall_seconds;
    jr["weak_evidence"] = r.weak_evidence;
    jr["error"] = r.error;
    rows.push_back(std::move(jr));
  }
  auto& aggs = j["aggregates"] = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    nlohmann::json ja;
    ja["method"] = a.method;
    ja["trials"] = a.trials;
    ja["failures"] = a.failures;
    ja["mean_span_err"] = a.mean_span_err;
    ja["std_span_err"] = a.std_span_err;
    ja["mean_prob_err"] = a.mean_prob_err;
    ja["std_prob_err"] = a.std_prob_err;
    ja["mean_em"] = a.mean_em;
    ja["mean_wall"] = a.mean_wall;
    ja["total_wall"] = a.total_wall;
    aggs.push_back(std::move(ja));
  }
  auto& act = j["activity"] = nlohmann::json::array();
  for (const auto& series : report.activity) {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& bin : series) js.push_back({bin.bin_start, bin.ratio});
    act.push_back(std::move(js));
  }
  out << j.dump(2) << '\n';
}

void save_report_file(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  save_report(report, out);
}

}  // namespace hotspan
