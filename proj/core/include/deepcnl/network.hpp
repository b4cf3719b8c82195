#ifndef DEEPCNL_NETWORK_HPP
#define DEEPCNL_NETWORK_HPP

#include <string>
#include <utility>
#include <vector>

#include "deepcnl/model.hpp"

namespace deepcnl {

/// Which layer-0 input-to-gate weight matrices contribute to the extracted
/// pair weight. Default is {input, input representation, output} ("igo").
struct GateSelection {
  bool input_gate = false;      // i
  bool input_rep = false;       // g
  bool output_gate = false;     // o
  bool forget_gate = false;     // f

  static GateSelection parse(const std::string& s);
  std::string str() const;
  std::size_t count() const;
};

using PairKey = std::pair<std::string, std::string>;

struct PairWeight {
  PairKey pair;
  double weight = 0.0;
};

using PairWeights = std::vector<PairWeight>;

struct NetworkEdge {
  std::string source, target;  // source < target
  double weight = 0.0;
};

struct NetworkMeta {
  double gamma = 0.0;
  std::string gates;
  std::string config_hash;
  std::string date_range;
  std::uint64_t seed = 0;
};

/// Weighted undirected graph over stock symbols; edges kept sorted by weight
/// descending (ties by lexicographic pair).
struct CoInvestNetwork {
  std::vector<std::string> nodes;
  std::vector<NetworkEdge> edges;
  NetworkMeta meta;
};

/// w_{i,j} = sum over hidden units, selected gates, and the pair's K layer-0
/// input columns of the raw (signed) gate weight entries. absolute=true sums
/// |w| instead (sensitivity mode, not the default).
PairWeights extract_weights(const DeepCnlModel& model, const GateSelection& gates,
                            bool absolute = false);

/// Sorts by weight descending (ties by lexicographic pair) and keeps the top
/// ceil(gamma * P) pairs as edges.
CoInvestNetwork generate_network(const PairWeights& weights, double gamma,
                                 const std::vector<std::string>& nodes);

/// Edge list CSV `source,target,weight` plus `<path>.meta.json` sidecar.
void save_network(const CoInvestNetwork& net, const std::string& path);
CoInvestNetwork load_network(const std::string& path);

}  // namespace deepcnl

#endif  // DEEPCNL_NETWORK_HPP
