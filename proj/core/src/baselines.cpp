#include "deepcnl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace deepcnl {

void SimpleGraph::add_edge(int a, int b) {
  if (a == b) throw std::invalid_argument("SimpleGraph: self-loop");
  if (a > b) std::swap(a, b);
  edges.emplace_back(a, b);
}

std::vector<int> SimpleGraph::degrees() const {
  std::vector<int> deg(num_nodes, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

namespace {

// Lentz continued fraction for the incomplete beta (Numerical Recipes form).
double betacf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log(1.0 - x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("pearson: need n >= 3");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson: constant input, correlation undefined");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);

  PearsonResult res;
  res.r = r;
  double df = static_cast<double>(n - 2);
  if (std::fabs(r) >= 1.0) {
    res.p = 0.0;
  } else {
    double t2 = r * r * df / (1.0 - r * r);
    // two-sided: p = I_{df/(df+t^2)}(df/2, 1/2)
    res.p = incomplete_beta(df / 2.0, 0.5, df / (df + t2));
  }
  return res;
}

namespace {

std::vector<PairKey> panel_pairs(const AlignedPanel& panel) {
  std::vector<PairKey> pairs;
  for (std::size_t i = 0; i < panel.num_symbols(); ++i)
    for (std::size_t j = i + 1; j < panel.num_symbols(); ++j)
      pairs.emplace_back(panel.symbols[i], panel.symbols[j]);
  return pairs;
}

}  // namespace

PairWeights pcc_weights(const AlignedPanel& panel, const std::string& feature,
                        double p_threshold) {
  if (panel.feature_index(feature) < 0)
    throw std::invalid_argument("pcc_weights: unknown feature " + feature);
  PairWeights out;
  for (const auto& [a, b] : panel_pairs(panel)) {
    PearsonResult res = pearson(panel.series(a, feature), panel.series(b, feature));
    double w = res.p < p_threshold ? res.r : -std::numeric_limits<double>::infinity();
    out.push_back({{a, b}, w});
  }
  return out;
}

double dtw_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("dtw_distance: empty sequence");
  std::size_t n = x.size(), m = y.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      double cost = std::fabs(x[i - 1] - y[j - 1]);
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

PairWeights dtw_weights(const AlignedPanel& panel, const std::string& feature) {
  if (panel.feature_index(feature) < 0)
    throw std::invalid_argument("dtw_weights: unknown feature " + feature);
  AlignedPanel norm = minmax_normalize(panel);
  PairWeights out;
  for (const auto& [a, b] : panel_pairs(norm)) {
    double d = dtw_distance(norm.series(a, feature), norm.series(b, feature));
    out.push_back({{a, b}, 1.0 / (d + 1.0)});
  }
  return out;
}

SimpleGraph visibility_graph(const std::vector<double>& series) {
  std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("visibility_graph: need at least 2 points");
  SimpleGraph g;
  g.num_nodes = n;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    g.add_edge(static_cast<int>(a), static_cast<int>(a + 1));
    for (std::size_t b = a + 2; b < n; ++b) {
      bool visible = true;
      for (std::size_t c = a + 1; c < b; ++c) {
        // strict: y_c must lie below the segment from (a, y_a) to (b, y_b)
        double bound = series[b] + (series[a] - series[b]) *
                                       (static_cast<double>(b) - static_cast<double>(c)) /
                                       (static_cast<double>(b) - static_cast<double>(a));
        if (series[c] >= bound) {
          visible = false;
          break;
        }
      }
      if (visible) g.add_edge(static_cast<int>(a), static_cast<int>(b));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

namespace {

// Joint label refinement: histograms over iterations 0..h for both graphs,
// with one shared compression map per iteration.
std::pair<std::map<long long, int>, std::map<long long, int>> wl_histograms(
    const SimpleGraph& g1, const SimpleGraph& g2, std::size_t iterations) {
  auto initial = [](const SimpleGraph& g) {
    return g.labels.empty() ? g.degrees() : g.labels;
  };
  std::vector<int> l1 = initial(g1), l2 = initial(g2);

  auto adjacency = [](const SimpleGraph& g) {
    std::vector<std::vector<int>> adj(g.num_nodes);
    for (auto [a, b] : g.edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    return adj;
  };
  std::vector<std::vector<int>> a1 = adjacency(g1), a2 = adjacency(g2);

  std::map<long long, int> h1, h2;
  long long label_base = 0;  // offset per iteration keeps histograms disjoint
  auto accumulate = [&](const std::vector<int>& labels, std::map<long long, int>& hist) {
    for (int l : labels) ++hist[label_base + l];
  };
  accumulate(l1, h1);
  accumulate(l2, h2);

  int next_label = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::map<std::pair<int, std::vector<int>>, int> compress;
    auto refine = [&](const std::vector<int>& labels, const std::vector<std::vector<int>>& adj) {
      std::vector<int> out(labels.size());
      for (std::size_t v = 0; v < labels.size(); ++v) {
        std::vector<int> neigh;
        for (int u : adj[v]) neigh.push_back(labels[u]);
        std::sort(neigh.begin(), neigh.end());
        auto key = std::make_pair(labels[v], std::move(neigh));
        auto [pos, inserted] = compress.try_emplace(key, next_label);
        if (inserted) ++next_label;
        out[v] = pos->second;
      }
      return out;
    };
    l1 = refine(l1, a1);
    l2 = refine(l2, a2);
    label_base += 1000000007LL;  // separate iterations in the histogram key space
    accumulate(l1, h1);
    accumulate(l2, h2);
  }
  return {h1, h2};
}

double hist_dot(const std::map<long long, int>& a, const std::map<long long, int>& b) {
  double s = 0.0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end()) s += static_cast<double>(v) * static_cast<double>(it->second);
  }
  return s;
}

}  // namespace

double wl_similarity(const SimpleGraph& g1, const SimpleGraph& g2, std::size_t iterations) {
  auto [h1, h2] = wl_histograms(g1, g2, iterations);
  double k12 = hist_dot(h1, h2);
  double k11 = hist_dot(h1, h1);
  double k22 = hist_dot(h2, h2);
  if (k11 == 0.0 || k22 == 0.0) return 0.0;
  return k12 / std::sqrt(k11 * k22);
}

PairWeights vwl_weights(const AlignedPanel& panel, const std::string& feature,
                        std::size_t iterations) {
  if (panel.feature_index(feature) < 0)
    throw std::invalid_argument("vwl_weights: unknown feature " + feature);
  std::vector<SimpleGraph> graphs;
  graphs.reserve(panel.num_symbols());
  for (const auto& sym : panel.symbols)
    graphs.push_back(visibility_graph(panel.series(sym, feature)));
  PairWeights out;
  for (std::size_t i = 0; i < panel.num_symbols(); ++i)
    for (std::size_t j = i + 1; j < panel.num_symbols(); ++j)
      out.push_back({{panel.symbols[i], panel.symbols[j]},
                     wl_similarity(graphs[i], graphs[j], iterations)});
  return out;
}

}  // namespace deepcnl
