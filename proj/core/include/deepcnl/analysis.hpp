#ifndef DEEPCNL_ANALYSIS_HPP
#define DEEPCNL_ANALYSIS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "deepcnl/network.hpp"

namespace deepcnl {

/// ticker -> market capitalization (USD billions), all positive.
using MarketCapTable = std::map<std::string, double>;

MarketCapTable load_market_caps(const std::string& path);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

/// 2 |E_induced| / (s (s-1)) over the subset nodes present in the network.
double edge_density(const CoInvestNetwork& net, const std::set<std::string>& subset);

/// k highest-degree nodes, ties by ticker lexicographic order. k > node count
/// returns all nodes.
std::vector<std::string> top_degree(const CoInvestNetwork& net, std::size_t k);

/// Mean and population std of market caps; missing tickers are excluded and
/// reported through `missing` when given.
MeanStd influence(const std::vector<std::string>& tickers, const MarketCapTable& caps,
                  std::vector<std::string>* missing = nullptr);

/// Induced subgraph on the largest connected node set; size ties resolved by
/// the smallest lexicographic member.
CoInvestNetwork largest_component(const CoInvestNetwork& net);

struct DistanceStats {
  MeanStd stats;
  std::size_t observed = 0;  // networks where both nodes present and connected
  std::size_t skipped = 0;
};

/// Unweighted BFS hop distance per network; absent/disconnected networks are
/// skipped and counted. Throws if u, v are never co-present.
DistanceStats avg_distance(const std::vector<CoInvestNetwork>& nets, const std::string& u,
                           const std::string& v);

/// Fraction of watchlist tickers appearing as an endpoint of some edge.
double coverage(const CoInvestNetwork& net, const std::vector<std::string>& watchlist);

}  // namespace deepcnl

#endif  // DEEPCNL_ANALYSIS_HPP
