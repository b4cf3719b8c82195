#ifndef DEEPCNL_BASELINES_HPP
#define DEEPCNL_BASELINES_HPP

#include <string>
#include <vector>

#include "deepcnl/data.hpp"
#include "deepcnl/network.hpp"

namespace deepcnl {

/// Undirected simple graph with integer node labels (WL input).
struct SimpleGraph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // a < b, sorted
  std::vector<int> labels;                 // optional; degree labels used if empty

  void add_edge(int a, int b);
  std::vector<int> degrees() const;
};

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  // two-sided
};

/// Sample Pearson r with the two-sided p-value from the Student-t transform
/// t = r sqrt((n-2)/(1-r^2)), CDF via the regularized incomplete beta.
PearsonResult pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Continued-fraction regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Pair weight = r when p < p_threshold, else -inf sentinel (never selected).
PairWeights pcc_weights(const AlignedPanel& panel, const std::string& feature,
                        double p_threshold);

/// Classic full dynamic program, cost |x_a - y_b|, no window constraint.
double dtw_distance(const std::vector<double>& x, const std::vector<double>& y);

/// Pair weight = 1 / (d + 1) on min-max normalized series.
PairWeights dtw_weights(const AlignedPanel& panel, const std::string& feature);

/// Natural visibility graph: a < b connect iff every intermediate point lies
/// strictly below the segment between them; adjacent points always connect.
SimpleGraph visibility_graph(const std::vector<double>& series);

/// Normalized Weisfeiler-Lehman subtree kernel, initial labels = degrees.
double wl_similarity(const SimpleGraph& g1, const SimpleGraph& g2, std::size_t iterations);

/// Per stock: visibility graph of the feature series; pair weight = WL similarity.
PairWeights vwl_weights(const AlignedPanel& panel, const std::string& feature,
                        std::size_t iterations);

}  // namespace deepcnl

#endif  // DEEPCNL_BASELINES_HPP
