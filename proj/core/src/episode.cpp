#include "hotspan/episode.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "hotspan/errors.hpp"

namespace hotspan {

namespace {
constexpr const char* kFormatTag = "hotspan-dataset";
constexpr int kFormatVersion = 1;
}  // namespace

std::vector<int> Episode::active_before(double t) const {
  std::vector<int> out;
  for (const auto& a : activations) {
    if (!(a.time < t)) break;
    out.push_back(a.node);
  }
  return out;
}

void Episode::validate(int node_count) const {
  if (activations.empty()) throw data_error("episode: no activations");
  if (activations.front().node != source || activations.front().time != 0.0)
    throw data_error("episode: first activation must be the source at time 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw data_error("episode: horizon must be positive and finite");
  std::unordered_set<int> seen;
  double prev = 0.0;
  for (const auto& a : activations) {
    if (a.node < 0 || a.node >= node_count)
      throw data_error("episode: node id " + std::to_string(a.node) + " out of range");
    if (!seen.insert(a.node).second)
      throw data_error("episode: node " + std::to_string(a.node) + " activates twice");
    if (!std::isfinite(a.time) || a.time < prev)
      throw data_error("episode: activation times must be non-decreasing and finite");
    if (a.time > horizon) throw data_error("episode: activation after the horizon");
    prev = a.time;
  }
}

std::size_t Dataset::total_activations() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.activations.size();
  return n;
}

void Dataset::validate() const {
  if (node_count <= 0) throw data_error("dataset: node count must be positive");
  if (episodes.empty()) throw data_error("dataset: no episodes");
  for (const auto& e : episodes) e.validate(node_count);
}

void save_dataset(const Dataset& dataset, std::ostream& out) {
  nlohmann::json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["node_count"] = dataset.node_count;
  j["graph_path"] = dataset.graph_path;
  j["resimulations"] = dataset.resimulations;
  auto& eps = j["episodes"] = nlohmann::json::array();
  for (const auto& e : dataset.episodes) {
    nlohmann::json je;
    je["source"] = e.source;
    je["horizon"] = e.horizon;
    auto& acts = je["activations"] = nlohmann::json::array();
    for (const auto& a : e.activations) acts.push_back({a.node, a.time});
    eps.push_back(std::move(je));
  }
  out << j.dump(2) << '\n';
}

void save_dataset_file(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  save_dataset(dataset, out);
}

Dataset load_dataset(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("dataset: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag)
      throw parse_error("dataset: unrecognized format tag");
    if (j.at("version").get<int>() != kFormatVersion)
      throw parse_error("dataset: unsupported format version");
    Dataset d;
    d.node_count = j.at("node_count").get<int>();
    d.graph_path = j.value("graph_path", std::string{});
    d.resimulations = j.value("resimulations", 0);
    for (const auto& je : j.at("episodes")) {
      Episode e;
      e.source = je.at("source").get<int>();
      e.horizon = je.at("horizon").get<double>();
      for (const auto& ja : je.at("activations")) {
        if (!ja.is_array() || ja.size() != 2)
          throw parse_error("dataset: activation entries must be [node, time] pairs");
        e.activations.push_back({ja.at(0).get<int>(), ja.at(1).get<double>()});
      }
      d.episodes.push_back(std::move(e));
    }
    d.validate();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("dataset: ") + e.what());
  }
}

Dataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open dataset file: " + path);
  return load_dataset(in);
}

}  // namespace hotspan
