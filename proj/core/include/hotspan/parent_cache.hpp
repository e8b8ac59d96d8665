#pragma once

#include <cstddef>
#include <vector>

#include "hotspan/episode.hpp"
#include "hotspan/graph.hpp"

namespace hotspan {

/** One possible activator of a child: an in-neighbor active strictly earlier. */
struct ParentArc {
  int parent_index = -1;  // index into EpisodeCache::activations
  double delay = 0.0;     // child time minus parent time, > 0
};

/** Parent list of one non-source active node. */
struct ChildParents {
  int child_index = -1;  // index into EpisodeCache::activations
  std::vector<ParentArc> arcs;
};

/** Out-links of one active node whose targets never activated in the episode. */
struct FailureGroup {
  int source_index = -1;  // index into EpisodeCache::activations
  double window = 0.0;    // horizon minus source time, >= 0
  std::vector<int> targets;
};

struct EpisodeCache {
  double phi = 0.0;
  std::vector<Activation> activations;  // episode order: sorted by time, source first
  std::vector<ChildParents> children;   // one per non-source activation, same order
  std::vector<FailureGroup> failures;   // ascending source_index

  std::size_t arc_count() const;
  std::size_t failure_count() const;
};

/**
 * Index structure for likelihood evaluation: per episode, every active node's
 * candidate parents (with delays) and every active node's never-activated
 * out-neighbors (with residual windows).  Built once per (graph, dataset) and
 * immutable afterwards; all evaluations read from it.
 *
 * Throws data_error if a non-source active node has no active earlier
 * in-neighbor, since no parameter setting can explain its activation.
 */
class ParentCache {
 public:
  ParentCache(const Graph& g, const Dataset& data);

  const std::vector<EpisodeCache>& episodes() const { return episodes_; }
  int node_count() const { return node_count_; }
  double mean_out_degree() const { return mean_out_degree_; }

  /** Parent-child arcs across all episodes. */
  std::size_t total_arcs() const { return total_arcs_; }
  /** Arcs plus never-activated-target links: the likelihood's pair population. */
  std::size_t total_pairs() const { return total_pairs_; }
  std::size_t total_activations() const { return total_activations_; }
  /** Mean arc delay; 0 when there are no arcs. */
  double mean_delay() const { return mean_delay_; }

 private:
  std::vector<EpisodeCache> episodes_;
  int node_count_ = 0;
  double mean_out_degree_ = 0.0;
  std::size_t total_arcs_ = 0;
  std::size_t total_pairs_ = 0;
  std::size_t total_activations_ = 0;
  double mean_delay_ = 0.0;
};

}  // namespace hotspan
