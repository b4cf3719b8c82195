#include "deepcnl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "deepcnl/csvio.hpp"

namespace deepcnl {

MarketCapTable load_market_caps(const std::string& path) {
  CsvTable table = read_csv(path);
  int cs = table.column("symbol"), cc = table.column("cap_usd_bn");
  if (cs < 0 || cc < 0)
    throw std::runtime_error("market cap table needs columns symbol,cap_usd_bn: " + path);
  MarketCapTable caps;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    double v = std::stod(table.rows[r][cc]);
    if (v <= 0)
      throw std::runtime_error("market cap must be positive at row " + std::to_string(r + 1));
    caps[table.rows[r][cs]] = v;
  }
  return caps;
}

double edge_density(const CoInvestNetwork& net, const std::set<std::string>& subset) {
  std::set<std::string> present;
  for (const auto& n : net.nodes)
    if (subset.count(n)) present.insert(n);
  std::size_t s = present.size();
  if (s < 2) throw std::invalid_argument("edge_density: fewer than 2 subset nodes present");
  std::size_t internal = 0;
  for (const auto& e : net.edges)
    if (present.count(e.source) && present.count(e.target)) ++internal;
  return 2.0 * static_cast<double>(internal) /
         (static_cast<double>(s) * static_cast<double>(s - 1));
}

std::vector<std::string> top_degree(const CoInvestNetwork& net, std::size_t k) {
  if (net.nodes.empty()) throw std::invalid_argument("top_degree: empty network");
  std::map<std::string, std::size_t> deg;
  for (const auto& n : net.nodes) deg[n] = 0;
  for (const auto& e : net.edges) {
    ++deg[e.source];
    ++deg[e.target];
  }
  std::vector<std::pair<std::string, std::size_t>> by_degree(deg.begin(), deg.end());
  std::sort(by_degree.begin(), by_degree.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, by_degree.size()); ++i)
    out.push_back(by_degree[i].first);
  return out;
}

MeanStd influence(const std::vector<std::string>& tickers, const MarketCapTable& caps,
                  std::vector<std::string>* missing) {
  std::vector<double> vals;
  for (const auto& t : tickers) {
    auto it = caps.find(t);
    if (it == caps.end()) {
      if (missing) missing->push_back(t);
    } else {
      vals.push_back(it->second);
    }
  }
  if (vals.empty()) throw std::invalid_argument("influence: no ticker present in cap table");
  MeanStd out;
  for (double v : vals) out.mean += v;
  out.mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(var / static_cast<double>(vals.size()));
  return out;
}

namespace {

std::map<std::string, std::vector<std::string>> adjacency(const CoInvestNetwork& net) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& n : net.nodes) adj[n];
  for (const auto& e : net.edges) {
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  return adj;
}

}  // namespace

CoInvestNetwork largest_component(const CoInvestNetwork& net) {
  CoInvestNetwork out;
  out.meta = net.meta;
  if (net.nodes.empty()) return out;
  auto adj = adjacency(net);

  std::set<std::string> unvisited(net.nodes.begin(), net.nodes.end());
  std::set<std::string> best;
  while (!unvisited.empty()) {
    std::string start = *unvisited.begin();
    std::set<std::string> comp;
    std::deque<std::string> queue{start};
    unvisited.erase(start);
    comp.insert(start);
    while (!queue.empty()) {
      std::string v = queue.front();
      queue.pop_front();
      for (const auto& u : adj[v])
        if (unvisited.erase(u)) {
          comp.insert(u);
          queue.push_back(u);
        }
    }
    // ties by smallest lexicographic node; sets iterate in sorted order
    if (comp.size() > best.size() ||
        (comp.size() == best.size() && !best.empty() && *comp.begin() < *best.begin()))
      best = std::move(comp);
  }
  out.nodes.assign(best.begin(), best.end());
  for (const auto& e : net.edges)
    if (best.count(e.source) && best.count(e.target)) out.edges.push_back(e);
  return out;
}

DistanceStats avg_distance(const std::vector<CoInvestNetwork>& nets, const std::string& u,
                           const std::string& v) {
  if (u == v) throw std::invalid_argument("avg_distance: identical tickers");
  std::vector<double> dists;
  std::size_t skipped = 0;
  for (const auto& net : nets) {
    auto adj = adjacency(net);
    if (!adj.count(u) || !adj.count(v)) {
      ++skipped;
      continue;
    }
    // BFS from u
    std::map<std::string, std::size_t> dist{{u, 0}};
    std::deque<std::string> queue{u};
    while (!queue.empty() && !dist.count(v)) {
      std::string cur = queue.front();
      queue.pop_front();
      for (const auto& nb : adj[cur])
        if (!dist.count(nb)) {
          dist[nb] = dist[cur] + 1;
          queue.push_back(nb);
        }
    }
    auto it = dist.find(v);
    if (it == dist.end()) {
      ++skipped;
    } else {
      dists.push_back(static_cast<double>(it->second));
    }
  }
  if (dists.empty())
    throw std::runtime_error("avg_distance: no observations for " + u + "-" + v);
  DistanceStats out;
  out.observed = dists.size();
  out.skipped = skipped;
  for (double d : dists) out.stats.mean += d;
  out.stats.mean /= static_cast<double>(dists.size());
  double var = 0.0;
  for (double d : dists) var += (d - out.stats.mean) * (d - out.stats.mean);
  out.stats.std = std::sqrt(var / static_cast<double>(dists.size()));
  return out;
}

double coverage(const CoInvestNetwork& net, const std::vector<std::string>& watchlist) {
  if (watchlist.empty()) throw std::invalid_argument("coverage: empty watchlist");
  std::set<std::string> endpoints;
  for (const auto& e : net.edges) {
    endpoints.insert(e.source);
    endpoints.insert(e.target);
  }
  std::size_t hit = 0;
  for (const auto& w : watchlist)
    if (endpoints.count(w)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(watchlist.size());
}

}  // namespace deepcnl
