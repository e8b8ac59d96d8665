#include "hotspan/parent_cache.hpp"

#include <string>
#include <vector>

#include "hotspan/errors.hpp"

namespace hotspan {

std::size_t EpisodeCache::arc_count() const {
  std::size_t n = 0;
  for (const auto& c : children) n += c.arcs.size();
  return n;
}

std::size_t EpisodeCache::failure_count() const {
  std::size_t n = 0;
  for (const auto& f : failures) n += f.targets.size();
  return n;
}

ParentCache::ParentCache(const Graph& g, const Dataset& data) {
  data.validate();
  if (data.node_count != g.node_count())
    throw data_error("parent cache: dataset node count " + std::to_string(data.node_count) +
                     " does not match graph node count " + std::to_string(g.node_count()));
  node_count_ = g.node_count();
  mean_out_degree_ = g.mean_out_degree();

  std::vector<int> act_index(static_cast<std::size_t>(node_count_), -1);
  double delay_sum = 0.0;
  episodes_.reserve(data.episodes.size());
  for (std::size_t m = 0; m < data.episodes.size(); ++m) {
    const Episode& ep = data.episodes[m];
    EpisodeCache cache;
    cache.phi = ep.horizon;
    cache.activations = ep.activations;
    for (std::size_t i = 0; i < ep.activations.size(); ++i)
      act_index[static_cast<std::size_t>(ep.activations[i].node)] = static_cast<int>(i);

    for (std::size_t i = 1; i < ep.activations.size(); ++i) {
      const auto& [v, tv] = ep.activations[i];
      ChildParents child;
      child.child_index = static_cast<int>(i);
      for (int u : g.in_neighbors(v)) {
        const int ui = act_index[static_cast<std::size_t>(u)];
        if (ui < 0) continue;
        const double tu = ep.activations[static_cast<std::size_t>(ui)].time;
        if (!(tu < tv)) continue;  // strictly earlier parents only
        child.arcs.push_back({ui, tv - tu});
        delay_sum += tv - tu;
      }
      if (child.arcs.empty())
        throw data_error("parent cache: node " + std::to_string(v) + " in episode " +
                         std::to_string(m) + " has no active earlier in-neighbor");
      total_arcs_ += child.arcs.size();
      cache.children.push_back(std::move(child));
    }

    for (std::size_t i = 0; i < ep.activations.size(); ++i) {
      const auto& [v, tv] = ep.activations[i];
      FailureGroup group;
      group.source_index = static_cast<int>(i);
      group.window = cache.phi - tv;
      for (int w : g.out_neighbors(v))
        if (act_index[static_cast<std::size_t>(w)] < 0) group.targets.push_back(w);
      if (!group.targets.empty()) cache.failures.push_back(std::move(group));
    }

    total_pairs_ += cache.arc_count() + cache.failure_count();
    total_activations_ += cache.activations.size();
    for (const auto& a : ep.activations) act_index[static_cast<std::size_t>(a.node)] = -1;
    episodes_.push_back(std::move(cache));
  }
  if (total_arcs_ > 0) mean_delay_ = delay_sum / static_cast<double>(total_arcs_);
}

}  // namespace hotspan
