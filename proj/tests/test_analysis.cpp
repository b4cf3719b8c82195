#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "deepcnl/analysis.hpp"

using namespace deepcnl;
namespace fs = std::filesystem;

namespace {

CoInvestNetwork make_net(const std::vector<std::string>& nodes,
                         const std::vector<std::pair<std::string, std::string>>& edges) {
  CoInvestNetwork net;
  net.nodes = nodes;
  double w = static_cast<double>(edges.size());
  for (const auto& [a, b] : edges) net.edges.push_back({a, b, w--});
  return net;
}

}  // namespace

TEST_CASE("edge density counts induced edges over subset pairs") {
  CoInvestNetwork net = make_net({"A", "B", "C", "D"},
                                 {{"A", "B"}, {"B", "C"}, {"C", "D"}});
  // subset {A,B,C}: induced edges AB, BC of 3 possible -> 2/3
  CHECK(edge_density(net, {"A", "B", "C"}) == doctest::Approx(2.0 / 3.0));
  // complete coverage check: {A,B} -> 1
  CHECK(edge_density(net, {"A", "B"}) == 1.0);
  // subset nodes absent from the network are ignored
  CHECK(edge_density(net, {"A", "B", "ZZ"}) == 1.0);
  // fewer than two present subset nodes is an error, not a zero
  CHECK_THROWS(edge_density(net, {"A"}));
  CHECK_THROWS(edge_density(net, {"X", "Y"}));
}

TEST_CASE("top_degree ranks by degree with lexicographic ties") {
  CoInvestNetwork net = make_net({"A", "B", "C", "D", "E"},
                                 {{"A", "B"}, {"A", "C"}, {"B", "C"}, {"D", "A"}});
  // degrees: A=3, B=2, C=2, D=1, E=0
  auto top = top_degree(net, 3);
  CHECK(top == std::vector<std::string>{"A", "B", "C"});
  // k beyond node count returns everything
  CHECK(top_degree(net, 10).size() == 5);
  CHECK(top_degree(net, 10).back() == "E");
}

TEST_CASE("influence averages known caps and reports missing tickers") {
  MarketCapTable caps{{"A", 100.0}, {"B", 50.0}, {"C", 150.0}};
  std::vector<std::string> missing;
  MeanStd ms = influence({"A", "B", "X"}, caps, &missing);
  CHECK(ms.mean == doctest::Approx(75.0));
  CHECK(ms.std == doctest::Approx(25.0));  // population std of {100, 50}
  CHECK(missing == std::vector<std::string>{"X"});
  CHECK_THROWS(influence({"Y", "Z"}, caps));
}

TEST_CASE("load_market_caps reads symbol,cap pairs and rejects nonpositive") {
  fs::path p = fs::temp_directory_path() / "deepcnl_test_caps.csv";
  {
    std::ofstream out(p);
    out << "symbol,cap_usd_bn\nAAA,123.5\nBBB,8\n";
  }
  MarketCapTable caps = load_market_caps(p.string());
  CHECK(caps.size() == 2);
  CHECK(caps.at("AAA") == 123.5);
  {
    std::ofstream out(p);
    out << "symbol,cap_usd_bn\nAAA,-3\n";
  }
  CHECK_THROWS(load_market_caps(p.string()));
  fs::remove(p);
}

TEST_CASE("largest_component returns the induced subgraph of the biggest part") {
  CoInvestNetwork net = make_net({"A", "B", "C", "D", "E", "F"},
                                 {{"A", "B"}, {"B", "C"}, {"D", "E"}});
  CoInvestNetwork comp = largest_component(net);
  CHECK(comp.nodes == std::vector<std::string>{"A", "B", "C"});
  CHECK(comp.edges.size() == 2);
}

TEST_CASE("largest_component size ties pick the lexicographically first") {
  CoInvestNetwork net = make_net({"C", "D", "A", "B"}, {{"C", "D"}, {"A", "B"}});
  CoInvestNetwork comp = largest_component(net);
  CHECK(comp.nodes == std::vector<std::string>{"A", "B"});
}

TEST_CASE("largest_component of an edgeless network is a singleton") {
  CoInvestNetwork net = make_net({"B", "A"}, {});
  CoInvestNetwork comp = largest_component(net);
  CHECK(comp.nodes == std::vector<std::string>{"A"});
  CHECK(comp.edges.empty());
}

TEST_CASE("avg_distance averages BFS hops across networks and skips absences") {
  CoInvestNetwork y1 = make_net({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
  CoInvestNetwork y2 = make_net({"A", "C", "D"}, {{"A", "C"}});
  CoInvestNetwork y3 = make_net({"A", "B"}, {{"A", "B"}});  // C absent
  DistanceStats ds = avg_distance({y1, y2, y3}, "A", "C");
  // y1: distance 2, y2: distance 1, y3: skipped
  CHECK(ds.observed == 2);
  CHECK(ds.skipped == 1);
  CHECK(ds.stats.mean == doctest::Approx(1.5));
  CHECK(ds.stats.std == doctest::Approx(0.5));
}

TEST_CASE("avg_distance counts disconnected co-present nodes as skipped") {
  CoInvestNetwork split = make_net({"A", "B", "C", "D"}, {{"A", "B"}, {"C", "D"}});
  CoInvestNetwork joined = make_net({"A", "C"}, {{"A", "C"}});
  DistanceStats ds = avg_distance({split, joined}, "A", "C");
  CHECK(ds.observed == 1);
  CHECK(ds.skipped == 1);
  CHECK(ds.stats.mean == doctest::Approx(1.0));
  // with every network disconnected there is nothing to average
  CHECK_THROWS(avg_distance({split}, "A", "C"));
}

TEST_CASE("avg_distance throws when the pair is never co-present") {
  CoInvestNetwork net = make_net({"A", "B"}, {{"A", "B"}});
  CHECK_THROWS(avg_distance({net}, "A", "Z"));
}

TEST_CASE("coverage is the fraction of watchlist tickers on some edge") {
  CoInvestNetwork net = make_net({"A", "B", "C", "D"}, {{"A", "B"}});
  // C, D are nodes but sit on no edge
  CHECK(coverage(net, {"A", "B", "C", "Q"}) == doctest::Approx(0.5));
  CHECK(coverage(net, {"Q"}) == 0.0);
  CHECK_THROWS(coverage(net, {}));
}
