// Command-line front end: graph generation, cascade simulation, parameter
// fitting, hot-span detection and the full comparison experiment.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hotspan/detector.hpp"
#include "hotspan/em.hpp"
#include "hotspan/episode.hpp"
#include "hotspan/errors.hpp"
#include "hotspan/experiment.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/likelihood.hpp"
#include "hotspan/multispan.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/simulate.hpp"

namespace {

using nlohmann::json;

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write output file: " + out_path);
    out << j.dump(2) << '\n';
  }
}

hotspan::Graph load_graph_for(const hotspan::Dataset& dataset, const std::string& graph_flag) {
  const std::string& path = graph_flag.empty() ? dataset.graph_path : graph_flag;
  if (path.empty())
    throw hotspan::data_error(
        "no graph available: pass --graph or use a dataset that records its graph path");
  return hotspan::load_edge_list_file(path);
}

json fit_json(const hotspan::FitResult& fit) {
  json j;
  j["boundaries"] = fit.boundaries;
  j["group_probs"] = fit.group_probs;
  j["segment_probs"] = fit.segment_probs;
  j["rate"] = fit.rate;
  j["log_likelihood"] = fit.log_likelihood;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["rate_update_skips"] = fit.rate_update_skips;
  return j;
}

json detection_json(const hotspan::DetectionReport& r) {
  json j;
  j["method"] = r.method;
  j["span"] = {r.span.start, r.span.end};
  j["p1"] = r.p1;
  j["p2"] = r.p2;
  j["rate"] = r.rate;
  j["objective"] = r.objective;
  j["relative_uplift"] = r.relative_uplift;
  j["weak_evidence"] = r.weak_evidence;
  j["em_invocations"] = r.em_invocations;
  j["wall_seconds"] = r.wall_seconds;
  j["candidate_count"] = r.candidate_count;
  if (r.uniform_p) j["uniform_p"] = *r.uniform_p;
  if (r.uniform_rate) j["uniform_rate"] = *r.uniform_rate;
  if (r.method == "naive") {
    j["naive_k"] = r.naive_k;
    j["naive_seed"] = r.naive_seed;
  }
  return j;
}

json segmentation_json(const hotspan::SegmentationState& s) {
  json j;
  j["segments"] = s.segments();
  j["boundaries"] = s.boundaries;
  j["segment_probs"] = s.segment_probs;
  j["rate"] = s.rate;
  j["log_likelihood"] = s.log_likelihood;
  j["score"] = s.score;
  j["stop_reason"] = s.stop_reason;
  j["em_invocations"] = s.em_invocations;
  auto& steps = j["history"] = json::array();
  for (const auto& step : s.history) {
    steps.push_back({{"boundary", step.boundary},
                     {"log_likelihood", step.log_likelihood},
                     {"score", step.score},
                     {"accepted", step.accepted}});
  }
  return j;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const hotspan::parse_error*>(&e)) return "parse";
  if (dynamic_cast<const hotspan::data_error*>(&e)) return "data";
  if (dynamic_cast<const hotspan::fit_error*>(&e)) return "fit";
  if (dynamic_cast<const hotspan::detect_error*>(&e)) return "detect";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "argument";
  return "runtime";
}

struct EmFlags {
  double tol = 1e-8;
  int max_iter = 1000;
  std::optional<double> p0;
  std::optional<double> r0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "EM convergence tolerance on the log-likelihood change");
    cmd->add_option("--max-iter", max_iter, "EM iteration cap");
    cmd->add_option("--p0", p0, "initial diffusion probability (default: degree-based)");
    cmd->add_option("--r0", r0, "initial delay rate (default: inverse mean delay)");
  }

  hotspan::EmConfig config() const {
    hotspan::EmConfig c;
    c.tol = tol;
    c.max_iter = max_iter;
    c.p0 = p0;
    c.r0 = r0;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hot-span diffusion analysis"};
  app.require_subcommand(1);

  // gen-graph
  auto* gen = app.add_subcommand("gen-graph", "generate a directed random graph");
  int gen_nodes = 2000;
  double gen_degree = 10.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--nodes", gen_nodes, "node count")->required();
  gen->add_option("--mean-out-degree", gen_degree, "expected out-degree")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "edge list output path")->required();
  gen->callback([&] {
    const hotspan::Graph g = hotspan::generate_random_graph(gen_nodes, gen_degree, gen_seed);
    hotspan::save_edge_list_file(g, gen_out);
    emit({{"nodes", g.node_count()},
          {"edges", g.edge_count()},
          {"mean_out_degree", g.mean_out_degree()},
          {"path", gen_out}},
         "");
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate diffusion episodes");
  std::string sim_graph, sim_out;
  double sim_p1 = 0.1, sim_p2 = 0.3, sim_t1 = 10.0, sim_t2 = 20.0, sim_r = 1.0;
  double sim_horizon = 0.0;
  int sim_episodes = 5, sim_min_active = 10;
  std::uint64_t sim_seed = 1;
  std::vector<double> sim_boundaries, sim_probs;
  sim->add_option("--graph", sim_graph, "edge list path")->required();
  sim->add_option("--p1", sim_p1, "normal-span diffusion probability");
  sim->add_option("--p2", sim_p2, "hot-span diffusion probability");
  sim->add_option("--t1", sim_t1, "hot span start");
  sim->add_option("--t2", sim_t2, "hot span end");
  sim->add_option("--r", sim_r, "exponential delay rate");
  sim->add_option("--episodes", sim_episodes, "episode count");
  sim->add_option("--horizon", sim_horizon, "observation window end (default: 3×t2)");
  sim->add_option("--seed", sim_seed, "simulation seed");
  sim->add_option("--min-active", sim_min_active, "redraw episodes smaller than this");
  sim->add_option("--boundaries", sim_boundaries, "custom profile boundaries (overrides t1/t2)")
      ->delimiter(',');
  sim->add_option("--probs", sim_probs, "custom per-segment probabilities (one more than boundaries)")
      ->delimiter(',');
  sim->add_option("--out", sim_out, "dataset output path")->required();
  sim->callback([&] {
    const hotspan::Graph g = hotspan::load_edge_list_file(sim_graph);
    const hotspan::PiecewiseSchedule sched =
        sim_probs.empty()
            ? hotspan::PiecewiseSchedule::hot_span(sim_p1, sim_p2, {sim_t1, sim_t2}, sim_r)
            : hotspan::PiecewiseSchedule(sim_boundaries, sim_probs, sim_r);
    const double horizon =
        sim_horizon > 0.0
            ? sim_horizon
            : 3.0 * (sched.boundaries().empty() ? sim_t2 : sched.boundaries().back());
    hotspan::SimulateOptions opts;
    opts.min_active = sim_min_active;
    hotspan::Dataset d =
        hotspan::simulate_dataset(g, sched, sim_episodes, horizon, sim_seed, opts);
    d.graph_path = sim_graph;
    hotspan::save_dataset_file(d, sim_out);
    emit({{"episodes", d.episodes.size()},
          {"activations", d.total_activations()},
          {"resimulations", d.resimulations},
          {"horizon", horizon},
          {"path", sim_out}},
         "");
  });

  // fit
  auto* fit = app.add_subcommand("fit", "fit diffusion parameters by EM");
  std::string fit_data, fit_graph, fit_out;
  std::vector<double> fit_span_pts, fit_boundaries;
  EmFlags fit_em;
  fit->add_option("--data", fit_data, "dataset path")->required();
  fit->add_option("--graph", fit_graph, "edge list path (default: recorded in the dataset)");
  auto* span_opt =
      fit->add_option("--span", fit_span_pts, "fit two probabilities switched inside [T1, T2)")
          ->expected(2);
  auto* bounds_opt =
      fit->add_option("--boundaries", fit_boundaries, "fit one probability per segment")
          ->delimiter(',');
  span_opt->excludes(bounds_opt);
  fit_em.attach(fit);
  fit->add_option("--out", fit_out, "report output path (default: stdout)");
  fit->callback([&] {
    const hotspan::Dataset d = hotspan::load_dataset_file(fit_data);
    const hotspan::Graph g = load_graph_for(d, fit_graph);
    const hotspan::ParentCache cache(g, d);
    hotspan::FitResult result;
    std::string mode;
    if (!fit_span_pts.empty()) {
      mode = "span";
      result =
          hotspan::fit_span(cache, {fit_span_pts[0], fit_span_pts[1]}, fit_em.config());
    } else if (!fit_boundaries.empty()) {
      mode = "piecewise";
      result = hotspan::fit_piecewise(cache, fit_boundaries, fit_em.config());
    } else {
      mode = "uniform";
      result = hotspan::fit_uniform(cache, fit_em.config());
    }
    json j = fit_json(result);
    j["mode"] = mode;
    emit(j, fit_out);
  });

  // detect
  auto* det = app.add_subcommand("detect", "detect the hot span");
  std::string det_data, det_graph, det_out, det_method = "proposed", det_dump;
  int det_k = 20;
  std::uint64_t det_seed = 1;
  double det_weak = 0.1;
  std::vector<double> det_truth;
  EmFlags det_em;
  det->add_option("--data", det_data, "dataset path")->required();
  det->add_option("--graph", det_graph, "edge list path (default: recorded in the dataset)");
  det->add_option("--method", det_method, "proposed or naive")
      ->check(CLI::IsMember({"proposed", "naive"}));
  det->add_option("--k", det_k, "candidate sample size for the naive method");
  det->add_option("--seed", det_seed, "candidate-sampling seed for the naive method");
  det->add_option("--weak-threshold", det_weak,
                  "relative uplift below which the result is flagged as weak evidence");
  det->add_option("--truth", det_truth, "T1,T2,P1,P2 to add error metrics")->expected(4)->delimiter(',');
  det->add_option("--dump-scores", det_dump, "write per-node gradient scores to this path");
  det_em.attach(det);
  det->add_option("--out", det_out, "report output path (default: stdout)");
  det->callback([&] {
    const hotspan::Dataset d = hotspan::load_dataset_file(det_data);
    const hotspan::Graph g = load_graph_for(d, det_graph);
    const hotspan::ParentCache cache(g, d);
    hotspan::DetectOptions opts;
    opts.em = det_em.config();
    opts.weak_evidence_threshold = det_weak;
    const hotspan::DetectionReport report =
        det_method == "naive" ? hotspan::detect_naive(cache, det_k, det_seed, opts)
                              : hotspan::detect_proposed(cache, opts);
    json j = detection_json(report);
    if (!det_truth.empty()) {
      j["span_err"] = hotspan::span_error(report.span, {det_truth[0], det_truth[1]});
      j["prob_err"] =
          hotspan::prob_error(report.p1, report.p2, det_truth[2], det_truth[3]);
    }
    if (!det_dump.empty()) {
      // Scores at the uniform estimate, one row per activation.
      const hotspan::FitResult uniform = hotspan::fit_uniform(cache, opts.em);
      const hotspan::GradientTable table = hotspan::link_gradient(
          cache, hotspan::PiecewiseSchedule::uniform(uniform.p(), uniform.rate));
      std::ofstream dump(det_dump);
      if (!dump) throw std::runtime_error("cannot write score dump: " + det_dump);
      dump << "episode\tnode\ttime\tscore\n";
      for (std::size_t m = 0; m < cache.episodes().size(); ++m) {
        const auto& ep = cache.episodes()[m];
        for (std::size_t i = 0; i < ep.activations.size(); ++i)
          dump << m << '\t' << ep.activations[i].node << '\t' << ep.activations[i].time << '\t'
               << table.scores[m][i] << '\n';
      }
    }
    emit(j, det_out);
  });

  // detect-multi
  auto* multi = app.add_subcommand("detect-multi", "recover a piecewise probability profile");
  std::string multi_data, multi_graph, multi_out, multi_criterion = "mdl";
  int multi_max = 8;
  EmFlags multi_em;
  multi->add_option("--data", multi_data, "dataset path")->required();
  multi->add_option("--graph", multi_graph, "edge list path (default: recorded in the dataset)");
  multi->add_option("--max-segments", multi_max, "segment cap");
  multi->add_option("--criterion", multi_criterion, "stopping criterion")
      ->check(CLI::IsMember({"mdl", "aic"}));
  multi_em.attach(multi);
  multi->add_option("--out", multi_out, "report output path (default: stdout)");
  multi->callback([&] {
    const hotspan::Dataset d = hotspan::load_dataset_file(multi_data);
    const hotspan::Graph g = load_graph_for(d, multi_graph);
    const hotspan::ParentCache cache(g, d);
    hotspan::MultispanOptions opts;
    opts.em = multi_em.config();
    opts.criterion = multi_criterion == "aic" ? hotspan::SplitCriterion::aic
                                              : hotspan::SplitCriterion::mdl;
    emit(segmentation_json(hotspan::detect_multispan(cache, multi_max, opts)), multi_out);
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "simulate and compare detectors over trials");
  hotspan::ExperimentConfig config;
  std::vector<double> exp_span{10.0, 20.0};
  std::string exp_out;
  bool exp_skip_proposed = false;
  EmFlags exp_em;
  exp->add_option("--graph", config.graph_file, "edge list path (default: generate)");
  exp->add_option("--nodes", config.nodes, "generated graph node count");
  exp->add_option("--mean-out-degree", config.mean_out_degree, "generated graph out-degree");
  exp->add_option("--p1", config.p1, "normal-span probability");
  exp->add_option("--p2", config.p2, "hot-span probability");
  exp->add_option("--span", exp_span, "hot span T1 T2")->expected(2);
  exp->add_option("--r", config.rate, "delay rate");
  exp->add_option("--episodes", config.episodes, "episodes per trial");
  exp->add_option("--horizon", config.horizon, "observation window end (default: 3×T2)");
  exp->add_option("--trials", config.trials, "trial count");
  exp->add_option("--seed", config.master_seed, "master seed");
  exp->add_option("--naive-k", config.naive_k, "baseline candidate sizes, e.g. 5,10,20")
      ->delimiter(',');
  exp->add_flag("--skip-proposed", exp_skip_proposed, "run only the baselines");
  exp->add_option("--workers", config.workers, "concurrent trials");
  exp->add_option("--min-active", config.simulate.min_active, "episode size floor");
  exp->add_option("--weak-threshold", config.detect.weak_evidence_threshold,
                  "weak-evidence flag threshold");
  exp->add_option("--activity-bin", config.activity_bin_width,
                  "emit the first trial's activity series with this bin width");
  exp_em.attach(exp);
  exp->add_option("--out", exp_out, "report output path (default: stdout)");
  exp->callback([&] {
    config.span = {exp_span[0], exp_span[1]};
    config.run_proposed = !exp_skip_proposed;
    config.detect.em = exp_em.config();
    const hotspan::ExperimentReport report = hotspan::run_experiment(config);
    if (exp_out.empty()) {
      hotspan::save_report(report, std::cout);
    } else {
      hotspan::save_report_file(report, exp_out);
      json summary;
      for (const auto& a : report.aggregates)
        summary[a.method] = {{"mean_span_err", a.mean_span_err},
                             {"mean_prob_err", a.mean_prob_err},
                             {"mean_em", a.mean_em},
                             {"failures", a.failures}};
      emit({{"path", exp_out}, {"aggregates", summary}}, "");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
