#include <doctest.h>

#include <filesystem>
#include <limits>

#include "deepcnl/baselines.hpp"
#include "deepcnl/data.hpp"
#include "deepcnl/rng.hpp"
#include "deepcnl/synthmarket.hpp"

using namespace deepcnl;
namespace fs = std::filesystem;

namespace {

MarketSpec tiny_spec() {
  MarketSpec spec;
  spec.symbols = {"X0", "X1", "X2", "X3"};
  InvestorGroup g;
  g.stocks = {"X0", "X1"};
  g.activity = 0.4;
  g.magnitude = 0.03;
  g.episode_days = 3;
  spec.groups.push_back(g);
  spec.noise_sigma = 0.01;
  return spec;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  MarketSpec spec = tiny_spec();
  GeneratedMarket a = generate(spec, 60, 5);
  GeneratedMarket b = generate(spec, 60, 5);
  GeneratedMarket c = generate(spec, 60, 6);
  REQUIRE(a.panel.values.size() == b.panel.values.size());
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.panel.values.size(); ++i) {
    if (a.panel.values[i] != b.panel.values[i]) identical = false;
    if (a.panel.values[i] != c.panel.values[i]) differs = true;
  }
  CHECK(identical);
  CHECK(differs);
  CHECK(a.index_close == b.index_close);
}

TEST_CASE("generated panel satisfies quote invariants") {
  GeneratedMarket m = generate(tiny_spec(), 100, 11);
  const AlignedPanel& p = m.panel;
  int open = p.feature_index("open"), close = p.feature_index("close");
  int low = p.feature_index("low"), high = p.feature_index("high");
  int vol = p.feature_index("volume");
  for (std::size_t s = 0; s < p.num_symbols(); ++s)
    for (std::size_t t = 0; t < p.num_dates(); ++t) {
      CHECK(p.at(s, low, t) <= p.at(s, open, t));
      CHECK(p.at(s, low, t) <= p.at(s, close, t));
      CHECK(p.at(s, high, t) >= p.at(s, open, t));
      CHECK(p.at(s, high, t) >= p.at(s, close, t));
      CHECK(p.at(s, close, t) > 0.0);
      CHECK(p.at(s, vol, t) > 0.0);
    }
  CHECK(p.num_dates() == 100);
  CHECK(m.index_close.size() == 100);
}

TEST_CASE("one always-active group with zero noise moves all stocks in lockstep") {
  MarketSpec spec;
  spec.symbols = {"X0", "X1", "X2"};
  InvestorGroup g;
  g.stocks = {"X0", "X1", "X2"};
  g.activity = 1.0;
  g.magnitude = 0.02;
  g.episode_days = 1;
  spec.groups.push_back(g);
  spec.noise_sigma = 0.0;
  GeneratedMarket m = generate(spec, 80, 3);
  auto c0 = m.panel.series("X0", "close");
  auto c1 = m.panel.series("X1", "close");
  auto c2 = m.panel.series("X2", "close");
  CHECK(pearson(c0, c1).r == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pearson(c0, c2).r == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("with zero noise the index moves with the applied pressure") {
  // single group over every stock, zero noise: every index move must carry the
  // sign of the day's aggregate pressure, and flat days stay flat
  MarketSpec spec;
  spec.symbols = {"X0", "X1"};
  InvestorGroup g;
  g.stocks = {"X0", "X1"};
  g.activity = 0.5;
  g.magnitude = 0.02;
  g.episode_days = 2;
  spec.groups.push_back(g);
  spec.noise_sigma = 0.0;
  GeneratedMarket m = generate(spec, 120, 9);
  auto c0 = m.panel.series("X0", "close");
  int moves = 0;
  for (std::size_t t = 1; t < m.index_close.size(); ++t) {
    double didx = m.index_close[t] - m.index_close[t - 1];
    double dstk = c0[t] - c0[t - 1];
    // stocks and index share the single pressure source exactly
    CHECK(didx * dstk >= 0.0);
    if (didx != 0.0) ++moves;
  }
  CHECK(moves > 10);  // episodes do fire
}

TEST_CASE("independent noise series are filtered by the pcc significance gate") {
  // day returns of a null market are independent, so at least 95% of pairs
  // fail p < 0.01 across seeds (close prices themselves are random walks and
  // would show the usual spurious level correlation, so compare on returns)
  MarketSpec spec;
  spec.symbols = {"X0", "X1", "X2", "X3", "X4", "X5"};
  spec.noise_sigma = 0.01;
  std::size_t filtered = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GeneratedMarket m = generate(spec, 120, seed);
    AlignedPanel returns;
    returns.symbols = m.panel.symbols;
    returns.features = {"close"};
    returns.dates.assign(m.panel.dates.begin() + 1, m.panel.dates.end());
    returns.values = NdArray({6, 1, m.panel.dates.size() - 1});
    for (std::size_t s = 0; s < 6; ++s) {
      auto c = m.panel.series(m.panel.symbols[s], "close");
      for (std::size_t t = 1; t < c.size(); ++t)
        returns.at(s, 0, t - 1) = c[t] / c[t - 1] - 1.0;
    }
    PairWeights w = pcc_weights(returns, "close", 0.01);
    for (const auto& pw : w) {
      ++total;
      if (pw.weight == -std::numeric_limits<double>::infinity()) ++filtered;
    }
  }
  CHECK(total == 15 * 8);
  CHECK(static_cast<double>(filtered) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("co-held pairs correlate more than non-co-held pairs") {
  MarketSpec spec = tiny_spec();  // group {X0, X1} of four stocks
  double held = 0, other = 0;
  int held_n = 0, other_n = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GeneratedMarket m = generate(spec, 200, seed);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) {
        auto a = m.panel.series(m.panel.symbols[i], "close");
        auto b = m.panel.series(m.panel.symbols[j], "close");
        std::vector<double> ra, rb;
        for (std::size_t t = 1; t < a.size(); ++t) {
          ra.push_back(a[t] / a[t - 1] - 1.0);
          rb.push_back(b[t] / b[t - 1] - 1.0);
        }
        double r = pearson(ra, rb).r;
        if (m.truth.count({m.panel.symbols[i], m.panel.symbols[j]})) {
          held += r;
          ++held_n;
        } else {
          other += r;
          ++other_n;
        }
      }
  }
  CHECK(held / held_n > other / other_n + 0.3);
}

TEST_CASE("ground truth is the union of within-group pairs") {
  MarketSpec spec;
  spec.symbols = {"A", "B", "C", "D"};
  InvestorGroup g1, g2;
  g1.stocks = {"A", "B", "C"};
  g2.stocks = {"C", "D"};
  spec.groups = {g1, g2};
  auto truth = spec.ground_truth();
  CHECK(truth.size() == 4);  // AB AC BC CD
  CHECK(truth.count({"A", "B"}) == 1);
  CHECK(truth.count({"C", "D"}) == 1);
  CHECK(truth.count({"A", "D"}) == 0);
}

TEST_CASE("spec validation rejects degenerate groups") {
  MarketSpec spec = tiny_spec();
  CHECK_NOTHROW(spec.validate());
  spec.groups[0].stocks = {"X0"};
  CHECK_THROWS(spec.validate());
  spec = tiny_spec();
  spec.groups[0].stocks = {"X0", "NOPE"};
  CHECK_THROWS(spec.validate());
  spec = tiny_spec();
  spec.noise_sigma = -1.0;
  CHECK_THROWS(spec.validate());
}

TEST_CASE("precision_at_k basics") {
  CoInvestNetwork net;
  net.nodes = {"A", "B", "C", "D"};
  net.edges = {{"A", "B", 3.0}, {"C", "D", 2.0}, {"A", "C", 1.0}};
  std::set<PairKey> truth{{"A", "B"}, {"C", "D"}};
  CHECK(precision_at_k(net, truth, 2) == 1.0);
  CHECK(precision_at_k(net, truth, 3) == doctest::Approx(2.0 / 3.0));
  CHECK(precision_at_k(net, {{"B", "C"}}, 3) == 0.0);
  CHECK_THROWS(precision_at_k(net, truth, 4));
}

TEST_CASE("random selection precision approaches truth/P in expectation") {
  // draw k random edges out of P pairs; mean precision over many trials must
  // approach |truth| / P
  Rng rng(88);
  const int n = 12;  // 66 pairs
  std::vector<PairKey> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pairs.push_back({"S" + std::to_string(i), "S" + std::to_string(j)});
  std::set<PairKey> truth(pairs.begin(), pairs.begin() + 11);
  double expect = 11.0 / 66.0;
  double total = 0;
  const int trials = 4000, k = 9;
  for (int t = 0; t < trials; ++t) {
    // partial fisher-yates for a k-subset
    std::vector<std::size_t> idx(pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    int hit = 0;
    for (int d = 0; d < k; ++d) {
      std::size_t pick = d + rng.below(idx.size() - d);
      std::swap(idx[d], idx[pick]);
      if (truth.count(pairs[idx[d]])) ++hit;
    }
    total += static_cast<double>(hit) / k;
  }
  CHECK(total / trials == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("market spec round-trips through json") {
  MarketSpec spec = tiny_spec();
  spec.index_weights = {0.4, 0.3, 0.2, 0.1};
  fs::path p = fs::temp_directory_path() / "deepcnl_test_spec.json";
  save_spec(spec, p.string());
  MarketSpec back = load_spec(p.string());
  CHECK(back.symbols == spec.symbols);
  REQUIRE(back.groups.size() == 1);
  CHECK(back.groups[0].stocks == spec.groups[0].stocks);
  CHECK(back.groups[0].activity == spec.groups[0].activity);
  CHECK(back.groups[0].magnitude == spec.groups[0].magnitude);
  CHECK(back.groups[0].episode_days == spec.groups[0].episode_days);
  CHECK(back.noise_sigma == spec.noise_sigma);
  CHECK(back.index_weights == spec.index_weights);
  fs::remove(p);
}

TEST_CASE("generated quotes round-trip through the csv loader") {
  GeneratedMarket m = generate(tiny_spec(), 40, 21);
  fs::path p = fs::temp_directory_path() / "deepcnl_test_market.csv";
  write_quotes_csv(m.panel, p.string(), "roundtrip test");
  auto records = load_quotes(p.string());
  AlignedPanel back = build_panel(records, m.panel.symbols, "0000-00-00", "9999-99-99");
  REQUIRE(back.num_symbols() == m.panel.num_symbols());
  REQUIRE(back.num_dates() == m.panel.num_dates());
  int close = m.panel.feature_index("close");
  for (std::size_t s = 0; s < back.num_symbols(); ++s)
    for (std::size_t t = 0; t < back.num_dates(); ++t)
      CHECK(back.at(s, close, t) == m.panel.at(s, close, t));
  fs::remove(p);
}

TEST_CASE("truth pairs round-trip through csv") {
  std::set<PairKey> truth{{"A", "B"}, {"C", "D"}};
  fs::path p = fs::temp_directory_path() / "deepcnl_test_truth.csv";
  write_truth_csv(truth, p.string());
  CHECK(load_truth_csv(p.string()) == truth);
  fs::remove(p);
}

TEST_CASE("bundled demo spec shape") {
  MarketSpec demo = demo_spec();
  CHECK(demo.symbols.size() == 20);
  CHECK(demo.groups.size() == 4);
  for (const auto& g : demo.groups) {
    CHECK(g.stocks.size() >= 4);
    CHECK(g.stocks.size() <= 6);
  }
  CHECK(demo.ground_truth().size() == 41);
  CHECK_NOTHROW(demo.validate());
}

TEST_CASE("bundled nested spec builds a strict subset chain") {
  std::vector<std::set<std::string>> subsets;
  MarketSpec spec = nested_spec(&subsets);
  CHECK_NOTHROW(spec.validate());
  REQUIRE(subsets.size() == 3);
  CHECK(subsets[0].size() < subsets[1].size());
  CHECK(subsets[1].size() < subsets[2].size());
  for (const auto& s : subsets[0]) CHECK(subsets[1].count(s) == 1);
  for (const auto& s : subsets[1]) CHECK(subsets[2].count(s) == 1);
}
