#ifndef DEEPCNL_MODEL_HPP
#define DEEPCNL_MODEL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deepcnl/data.hpp"
#include "deepcnl/ndarray.hpp"

namespace deepcnl {

struct ModelConfig {
  std::size_t K = 4;       // latent patterns
  std::size_t L = 5;       // window (one trading week)
  std::size_t H = 32;      // hidden size
  std::size_t layers = 1;
  double lambda = 1e-4;
  double lr = 1e-3;
  std::size_t epochs = 200;
  std::uint64_t seed = 42;
  std::vector<std::string> features = {"close", "volume"};
  std::string gates = "igo";

  /// Paper-scale preset: K=16, H=256, 2 layers.
  static ModelConfig paper_scale();

  void validate() const;
};

/// K convolution filters shared across all pairs, each L x 2M, plus one bias.
/// kernels layout: flattened K x (L*2M), [k][window offset][row].
struct KernelBank {
  std::size_t K = 0, L = 0, rows = 0;  // rows = 2M
  NdArray kernels;
  double bias = 0.0;
};

/// Per-pair, per-pattern convolution outputs; evidence length N-L+1.
struct EvidenceTensor {
  std::vector<std::pair<std::string, std::string>> pairs;  // canonical lexicographic
  std::size_t K = 0;
  std::size_t steps = 0;  // N - L + 1
  std::vector<double> values;

  double& at(std::size_t p, std::size_t k, std::size_t t) {
    return values[(p * K + k) * steps + t];
  }
  double at(std::size_t p, std::size_t k, std::size_t t) const {
    return values[(p * K + k) * steps + t];
  }
};

struct LstmLayerParams {
  std::size_t input_dim = 0, hidden = 0;
  NdArray w_ii, w_if, w_ig, w_io;  // H x input_dim
  NdArray w_hi, w_hf, w_hg, w_ho;  // H x H
  NdArray b_ii, b_if, b_ig, b_io;  // H
  NdArray b_hi, b_hf, b_hg, b_ho;  // H
};

/// Top-layer hidden state -> K-vector, then alpha . out + beta -> scalar.
struct Head {
  NdArray projection;  // K x H
  NdArray alpha;       // K
  double beta = 0.0;
};

struct DeepCnlModel {
  ModelConfig config;
  KernelBank bank;
  std::vector<LstmLayerParams> lstm;
  Head head;
  std::vector<std::pair<std::string, std::string>> pair_order;
  bool trained = false;
};

struct TrainResult {
  DeepCnlModel model;
  std::vector<double> loss_history;  // per epoch, pre-update
  std::vector<double> acc_history;
  double final_accuracy = 0.0;
  bool degenerate_targets = false;  // all labels identical
  // optimizer state for checkpoint resume
  std::vector<NdArray> adam_m, adam_v;
  std::size_t adam_steps = 0;
};

/// Valid stride-1 convolution of every observation matrix against the shared
/// kernel bank; all matrices must share N and row count.
EvidenceTensor compute_evidence(const std::vector<ObservationMatrix>& observations,
                                const KernelBank& bank);

/// One LSTM cell update: f,i,o = sigmoid gates, g = tanh input representation,
/// c = f*c_prev + i*g, h = o*tanh(c).
std::pair<std::vector<double>, std::vector<double>> lstm_step(
    const std::vector<double>& x, const std::vector<double>& h_prev,
    const std::vector<double>& c_prev, const LstmLayerParams& layer);

/// Unrolls the stacked LSTM over the evidence steps (zero initial state) and
/// applies the projection and K->1 head; one raw score per evidence step.
std::vector<double> forward(const EvidenceTensor& evidence,
                            const std::vector<LstmLayerParams>& lstm, const Head& head);

/// (rise_degree, fall_degree) = (e^y/(1+e^y), 1/(1+e^y)); sums to 1.
std::pair<double, double> score(double y_raw);

/// Mean NLL of the softmax over (rise_degree, fall_degree) against the labels,
/// plus lambda * Frobenius norm over all parameters.
double loss(const std::vector<double>& y_raw, const std::vector<int>& labels,
            const std::vector<const NdArray*>& params, double lambda);

/// Trains on the panel (min-max normalized internally, per window) against the
/// rise-fall labels of index_close; score tau is paired with the index move
/// from day tau+L-1 to tau+L, so the evidence window strictly precedes the
/// predicted move.
TrainResult train(const AlignedPanel& panel, const std::vector<double>& index_close,
                  const ModelConfig& config);

}  // namespace deepcnl

#endif  // DEEPCNL_MODEL_HPP
