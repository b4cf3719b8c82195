#ifndef DEEPCNL_SYNTHMARKET_HPP
#define DEEPCNL_SYNTHMARKET_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "deepcnl/data.hpp"
#include "deepcnl/network.hpp"

namespace deepcnl {

/// One investor group: a stock subset moved together by a common buy-sell
/// pressure when the group is active.
struct InvestorGroup {
  std::vector<std::string> stocks;  // at least 2
  double activity = 0.3;            // per-day probability of starting an episode
  double magnitude = 0.02;          // daily return shock while active
  std::size_t episode_days = 3;     // pressure persistence (signed episodes)
};

struct MarketSpec {
  std::vector<std::string> symbols;
  std::vector<InvestorGroup> groups;
  double noise_sigma = 0.01;      // per-stock independent return noise
  double base_price_low = 20.0;   // base prices drawn uniformly in this range
  double base_price_high = 200.0;
  double volume_base = 1e6;
  double volume_boost = 2.0;      // multiplicative volume surge while any group is active
  std::vector<double> index_weights;  // per symbol; equal weights when empty

  void validate() const;

  /// Ground truth: union of within-group pairs (canonical order).
  std::set<PairKey> ground_truth() const;
};

struct GeneratedMarket {
  AlignedPanel panel;                // unnormalized OHLCV
  std::vector<double> index_close;   // weighted sum of closes
  std::set<PairKey> truth;
};

/// Multiplicative returns driven by persistent signed group pressure episodes
/// plus independent noise; OHLC derived from the close path with a bounded
/// intraday spread; volumes surge on active days. Deterministic per seed.
GeneratedMarket generate(const MarketSpec& spec, std::size_t days, std::uint64_t seed);

/// Fraction of the k highest-weight edges present in the ground truth.
double precision_at_k(const CoInvestNetwork& net, const std::set<PairKey>& truth,
                      std::size_t k);

/// 20 stocks, 4 groups of 4-6 stocks, for recovery experiments.
MarketSpec demo_spec();

/// Nested subsets S1 in S2 in S3 with group structure densest on S1,
/// for the subgraph-density ordering experiment.
MarketSpec nested_spec(std::vector<std::set<std::string>>* subsets = nullptr);

void save_spec(const MarketSpec& spec, const std::string& path);
MarketSpec load_spec(const std::string& path);

/// Emits quotes CSV rows (same schema load_quotes reads) for the panel.
void write_quotes_csv(const AlignedPanel& panel, const std::string& path,
                      const std::string& provenance = "");

/// Index as a one-ticker quotes CSV (close = index level).
void write_index_csv(const std::vector<double>& index_close,
                     const std::vector<std::string>& dates, const std::string& symbol,
                     const std::string& path, const std::string& provenance = "");

void write_truth_csv(const std::set<PairKey>& truth, const std::string& path);
std::set<PairKey> load_truth_csv(const std::string& path);

}  // namespace deepcnl

#endif  // DEEPCNL_SYNTHMARKET_HPP
