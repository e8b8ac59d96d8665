#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hotspan {

class Graph;

/** One node becoming active at a point in time. */
struct Activation {
  int node = -1;
  double time = 0.0;

  friend bool operator==(const Activation&, const Activation&) = default;
};

/**
 * A single observed cascade: the source activates at time 0 and the trace
 * records every activation up to the observation horizon.  Activations are
 * sorted by time, start with the source, and never repeat a node.
 */
struct Episode {
  int source = -1;
  double horizon = 0.0;  // end of the observation window
  std::vector<Activation> activations;

  /** Time of the first activation (the source's). */
  double start_time() const { return activations.front().time; }

  /** Nodes active strictly before time t, in activation order. */
  std::vector<int> active_before(double t) const;

  /** Throws data_error unless the invariants above hold for this graph size. */
  void validate(int node_count) const;
};

/** A collection of episodes over one graph. */
struct Dataset {
  int node_count = 0;
  std::string graph_path;     // optional; recorded so tools can reload the graph
  int resimulations = 0;      // episodes redrawn for falling below the size floor
  std::vector<Episode> episodes;

  std::size_t total_activations() const;
  void validate() const;
};

void save_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset_file(const Dataset& dataset, const std::string& path);

/** Throws parse_error on malformed input, data_error on invariant violations. */
Dataset load_dataset(std::istream& in);
Dataset load_dataset_file(const std::string& path);

}  // namespace hotspan
