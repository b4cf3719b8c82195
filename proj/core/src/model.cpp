#include "deepcnl/model.hpp"

#include <cmath>
#include <stdexcept>

#include "deepcnl/optim.hpp"
#include "deepcnl/rng.hpp"
#include "deepcnl/tape.hpp"

namespace deepcnl {

ModelConfig ModelConfig::paper_scale() {
  ModelConfig cfg;
  cfg.K = 16;
  cfg.H = 256;
  cfg.layers = 2;
  return cfg;
}

void ModelConfig::validate() const {
  if (K < 1 || L < 1 || H < 1 || layers < 1)
    throw std::invalid_argument("ModelConfig: K, L, H, layers must be positive");
  if (lambda < 0) throw std::invalid_argument("ModelConfig: lambda must be >= 0");
  if (lr <= 0) throw std::invalid_argument("ModelConfig: lr must be positive");
  if (features.empty()) throw std::invalid_argument("ModelConfig: empty feature subset");
  for (char c : gates)
    if (c != 'i' && c != 'g' && c != 'o' && c != 'f')
      throw std::invalid_argument("ModelConfig: unknown gate '" + std::string(1, c) + "'");
  if (gates.empty()) throw std::invalid_argument("ModelConfig: empty gate selection");
}

EvidenceTensor compute_evidence(const std::vector<ObservationMatrix>& observations,
                                const KernelBank& bank) {
  if (observations.empty()) throw std::invalid_argument("compute_evidence: no observations");
  std::size_t rows = observations.front().rows.rows();
  std::size_t N = observations.front().rows.cols();
  if (rows != bank.rows) throw std::invalid_argument("compute_evidence: row count mismatch");
  if (N < bank.L) throw std::invalid_argument("compute_evidence: series shorter than window");
  for (const auto& obs : observations)
    if (obs.rows.rows() != rows || obs.rows.cols() != N)
      throw std::invalid_argument("compute_evidence: observation shapes differ");

  std::size_t T = N - bank.L + 1;
  EvidenceTensor ev;
  ev.K = bank.K;
  ev.steps = T;
  ev.values.resize(observations.size() * bank.K * T);
  for (std::size_t p = 0; p < observations.size(); ++p) {
    ev.pairs.push_back(observations[p].pair);
    const NdArray& A = observations[p].rows;
    for (std::size_t k = 0; k < bank.K; ++k) {
      const double* ker = bank.kernels.data() + k * bank.L * rows;
      for (std::size_t t = 0; t < T; ++t) {
        double s = bank.bias;
        for (std::size_t dt = 0; dt < bank.L; ++dt)
          for (std::size_t r = 0; r < rows; ++r) s += ker[dt * rows + r] * A.at(r, t + dt);
        ev.at(p, k, t) = s;
      }
    }
  }
  return ev;
}

namespace {

double sigmoid_stable(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> lstm_step(
    const std::vector<double>& x, const std::vector<double>& h_prev,
    const std::vector<double>& c_prev, const LstmLayerParams& layer) {
  std::size_t H = layer.hidden, D = layer.input_dim;
  if (x.size() != D || h_prev.size() != H || c_prev.size() != H)
    throw std::invalid_argument("lstm_step: shape mismatch");
  auto gate_pre = [&](const NdArray& wi, const NdArray& bi, const NdArray& wh,
                      const NdArray& bh, std::size_t l) {
    double s = bi[l] + bh[l];
    const double* wir = wi.data() + l * D;
    for (std::size_t d = 0; d < D; ++d) s += wir[d] * x[d];
    const double* whr = wh.data() + l * H;
    for (std::size_t hh = 0; hh < H; ++hh) s += whr[hh] * h_prev[hh];
    return s;
  };
  std::vector<double> h(H), c(H);
  for (std::size_t l = 0; l < H; ++l) {
    double f = sigmoid_stable(gate_pre(layer.w_if, layer.b_if, layer.w_hf, layer.b_hf, l));
    double i = sigmoid_stable(gate_pre(layer.w_ii, layer.b_ii, layer.w_hi, layer.b_hi, l));
    double o = sigmoid_stable(gate_pre(layer.w_io, layer.b_io, layer.w_ho, layer.b_ho, l));
    double g = std::tanh(gate_pre(layer.w_ig, layer.b_ig, layer.w_hg, layer.b_hg, l));
    c[l] = f * c_prev[l] + i * g;
    h[l] = o * std::tanh(c[l]);
  }
  return {h, c};
}

std::vector<double> forward(const EvidenceTensor& evidence,
                            const std::vector<LstmLayerParams>& lstm, const Head& head) {
  if (evidence.pairs.empty() || evidence.steps == 0)
    throw std::invalid_argument("forward: empty evidence");
  if (lstm.empty()) throw std::invalid_argument("forward: no LSTM layers");
  std::size_t P = evidence.pairs.size(), K = evidence.K;
  if (lstm.front().input_dim != P * K)
    throw std::invalid_argument("forward: layer-0 input_dim != P*K");
  std::size_t Ktop = head.alpha.size();

  std::vector<std::vector<double>> h(lstm.size()), c(lstm.size());
  for (std::size_t l = 0; l < lstm.size(); ++l) {
    h[l].assign(lstm[l].hidden, 0.0);
    c[l].assign(lstm[l].hidden, 0.0);
  }

  std::vector<double> scores(evidence.steps);
  std::vector<double> x(P * K);
  for (std::size_t t = 0; t < evidence.steps; ++t) {
    // pair-major, pattern-minor flattening of X(t)
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t k = 0; k < K; ++k) x[p * K + k] = evidence.at(p, k, t);
    const std::vector<double>* in = &x;
    for (std::size_t l = 0; l < lstm.size(); ++l) {
      auto [hn, cn] = lstm_step(*in, h[l], c[l], lstm[l]);
      h[l] = std::move(hn);
      c[l] = std::move(cn);
      in = &h[l];
    }
    const std::vector<double>& htop = h.back();
    double y = head.beta;
    for (std::size_t k = 0; k < Ktop; ++k) {
      double out_k = 0.0;
      const double* prow = head.projection.data() + k * htop.size();
      for (std::size_t hh = 0; hh < htop.size(); ++hh) out_k += prow[hh] * htop[hh];
      y += head.alpha[k] * out_k;
    }
    scores[t] = y;
  }
  return scores;
}

std::pair<double, double> score(double y_raw) {
  if (!std::isfinite(y_raw)) throw std::invalid_argument("score: non-finite input");
  double rise = sigmoid_stable(y_raw);
  return {rise, 1.0 - rise};
}

double loss(const std::vector<double>& y_raw, const std::vector<int>& labels,
            const std::vector<const NdArray*>& params, double lambda) {
  if (y_raw.size() != labels.size()) throw std::invalid_argument("loss: length mismatch");
  if (y_raw.empty()) throw std::invalid_argument("loss: empty input");
  double acc = 0.0;
  for (std::size_t t = 0; t < y_raw.size(); ++t) {
    auto [rise, fall] = score(y_raw[t]);
    double s = (labels[t] == 1) ? (rise - fall) : (fall - rise);
    acc += std::log(1.0 + std::exp(-s));  // -log softmax over (rise, fall)
  }
  acc /= static_cast<double>(y_raw.size());
  if (lambda > 0.0) {
    double ssq = 0.0;
    for (const NdArray* p : params) ssq += p->sum_of_squares();
    acc += lambda * std::sqrt(ssq);
  }
  return acc;
}

namespace {

NdArray init_uniform(Rng& rng, std::vector<std::size_t> shape, std::size_t fan_in) {
  NdArray a(std::move(shape));
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-bound, bound);
  return a;
}

struct TrainWorkspace {
  std::vector<Parameter> params;  // checkpoint order
  Parameter* kernels = nullptr;
  Parameter* conv_bias = nullptr;
  struct LayerRefs {
    Parameter *w_ii, *w_if, *w_ig, *w_io, *w_hi, *w_hf, *w_hg, *w_ho;
    Parameter *b_ii, *b_if, *b_ig, *b_io, *b_hi, *b_hf, *b_hg, *b_ho;
  };
  std::vector<LayerRefs> layers;
  Parameter* projection = nullptr;
  Parameter* alpha = nullptr;
  Parameter* beta = nullptr;
};

TrainWorkspace init_params(const ModelConfig& cfg, std::size_t P, std::size_t rows2m,
                           Rng& rng) {
  TrainWorkspace ws;
  auto& ps = ws.params;
  ps.reserve(2 + cfg.layers * 16 + 3);
  std::size_t ker_fan = cfg.L * rows2m;
  ps.emplace_back("kernels", init_uniform(rng, {cfg.K, cfg.L * rows2m}, ker_fan));
  ps.emplace_back("conv_bias", init_uniform(rng, {1}, ker_fan));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    std::size_t D = (l == 0) ? P * cfg.K : cfg.H;
    std::string suffix = "_l" + std::to_string(l);
    for (const char* g : {"i", "f", "g", "o"})
      ps.emplace_back("w_i" + std::string(g) + suffix, init_uniform(rng, {cfg.H, D}, D));
    for (const char* g : {"i", "f", "g", "o"})
      ps.emplace_back("w_h" + std::string(g) + suffix, init_uniform(rng, {cfg.H, cfg.H}, cfg.H));
    for (const char* g : {"i", "f", "g", "o"})
      ps.emplace_back("b_i" + std::string(g) + suffix, init_uniform(rng, {cfg.H}, D));
    for (const char* g : {"i", "f", "g", "o"})
      ps.emplace_back("b_h" + std::string(g) + suffix, init_uniform(rng, {cfg.H}, cfg.H));
  }
  ps.emplace_back("projection", init_uniform(rng, {cfg.K, cfg.H}, cfg.H));
  ps.emplace_back("alpha", init_uniform(rng, {cfg.K}, cfg.K));
  ps.emplace_back("beta", init_uniform(rng, {1}, cfg.K));

  // wire up refs (vector is fully built, pointers are stable)
  std::size_t idx = 0;
  ws.kernels = &ps[idx++];
  ws.conv_bias = &ps[idx++];
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    TrainWorkspace::LayerRefs r{};
    r.w_ii = &ps[idx++]; r.w_if = &ps[idx++]; r.w_ig = &ps[idx++]; r.w_io = &ps[idx++];
    r.w_hi = &ps[idx++]; r.w_hf = &ps[idx++]; r.w_hg = &ps[idx++]; r.w_ho = &ps[idx++];
    r.b_ii = &ps[idx++]; r.b_if = &ps[idx++]; r.b_ig = &ps[idx++]; r.b_io = &ps[idx++];
    r.b_hi = &ps[idx++]; r.b_hf = &ps[idx++]; r.b_hg = &ps[idx++]; r.b_ho = &ps[idx++];
    ws.layers.push_back(r);
  }
  ws.projection = &ps[idx++];
  ws.alpha = &ps[idx++];
  ws.beta = &ps[idx++];
  return ws;
}

DeepCnlModel snapshot_model(const ModelConfig& cfg, const TrainWorkspace& ws,
                            std::size_t rows2m,
                            std::vector<std::pair<std::string, std::string>> pair_order) {
  DeepCnlModel m;
  m.config = cfg;
  m.bank.K = cfg.K;
  m.bank.L = cfg.L;
  m.bank.rows = rows2m;
  m.bank.kernels = ws.kernels->value;
  m.bank.bias = ws.conv_bias->value[0];
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const auto& r = ws.layers[l];
    LstmLayerParams lp;
    lp.input_dim = (l == 0) ? pair_order.size() * cfg.K : cfg.H;
    lp.hidden = cfg.H;
    lp.w_ii = r.w_ii->value; lp.w_if = r.w_if->value;
    lp.w_ig = r.w_ig->value; lp.w_io = r.w_io->value;
    lp.w_hi = r.w_hi->value; lp.w_hf = r.w_hf->value;
    lp.w_hg = r.w_hg->value; lp.w_ho = r.w_ho->value;
    lp.b_ii = r.b_ii->value; lp.b_if = r.b_if->value;
    lp.b_ig = r.b_ig->value; lp.b_io = r.b_io->value;
    lp.b_hi = r.b_hi->value; lp.b_hf = r.b_hf->value;
    lp.b_hg = r.b_hg->value; lp.b_ho = r.b_ho->value;
    m.lstm.push_back(std::move(lp));
  }
  m.head.projection = ws.projection->value;
  m.head.alpha = ws.alpha->value;
  m.head.beta = ws.beta->value[0];
  m.pair_order = std::move(pair_order);
  return m;
}

}  // namespace

TrainResult train(const AlignedPanel& raw_panel, const std::vector<double>& index_close,
                  const ModelConfig& config) {
  config.validate();
  if (raw_panel.num_symbols() < 2) throw std::invalid_argument("train: need at least 2 stocks");
  std::size_t N = raw_panel.num_dates();
  if (index_close.size() != N)
    throw std::invalid_argument("train: index series length != panel date axis");
  if (N <= config.L + 1) throw std::invalid_argument("train: N must exceed L+1");

  AlignedPanel panel = minmax_normalize(raw_panel);

  // pairwise observation matrices in panel symbol order (i < j)
  std::vector<ObservationMatrix> observations;
  std::vector<std::pair<std::string, std::string>> pair_order;
  for (std::size_t i = 0; i < panel.num_symbols(); ++i)
    for (std::size_t j = i + 1; j < panel.num_symbols(); ++j) {
      observations.push_back(
          observation_matrix(panel, panel.symbols[i], panel.symbols[j], config.features));
      pair_order.push_back(observations.back().pair);
    }
  std::size_t P = observations.size();
  std::size_t rows2m = observations.front().rows.rows();
  std::size_t T = N - config.L + 1;
  std::size_t T_used = T - 1;  // score tau pairs with the move to day tau+L

  TargetSeries targets = rise_fall_targets(index_close);
  std::vector<int> labels(T_used);
  for (std::size_t t = 0; t < T_used; ++t) labels[t] = targets.values[t + config.L - 1];

  TrainResult result;
  bool all_same = true;
  for (std::size_t t = 1; t < labels.size(); ++t)
    if (labels[t] != labels[0]) { all_same = false; break; }
  result.degenerate_targets = all_same;

  Rng rng(config.seed);
  TrainWorkspace ws = init_params(config, P, rows2m, rng);
  std::vector<Parameter*> param_ptrs;
  for (Parameter& p : ws.params) param_ptrs.push_back(&p);
  AdamConfig acfg;
  acfg.lr = config.lr;
  Adam adam(param_ptrs, acfg);

  Tape tape;
  auto run_epoch = [&](bool with_grad, double* acc_out) {
    tape.clear();
    Var kernels = tape.param(*ws.kernels);
    Var cbias = tape.param(*ws.conv_bias);
    std::vector<Var> conv;
    conv.reserve(P);
    for (std::size_t p = 0; p < P; ++p)
      conv.push_back(tape.conv_rows(kernels, cbias, observations[p].rows, config.K, config.L));

    struct LayerVars {
      Var w_ii, w_if, w_ig, w_io, w_hi, w_hf, w_hg, w_ho;
      Var b_ii, b_if, b_ig, b_io, b_hi, b_hf, b_hg, b_ho;
      Var h, c;
    };
    std::vector<LayerVars> lv(config.layers);
    for (std::size_t l = 0; l < config.layers; ++l) {
      const auto& r = ws.layers[l];
      lv[l].w_ii = tape.param(*r.w_ii); lv[l].w_if = tape.param(*r.w_if);
      lv[l].w_ig = tape.param(*r.w_ig); lv[l].w_io = tape.param(*r.w_io);
      lv[l].w_hi = tape.param(*r.w_hi); lv[l].w_hf = tape.param(*r.w_hf);
      lv[l].w_hg = tape.param(*r.w_hg); lv[l].w_ho = tape.param(*r.w_ho);
      lv[l].b_ii = tape.param(*r.b_ii); lv[l].b_if = tape.param(*r.b_if);
      lv[l].b_ig = tape.param(*r.b_ig); lv[l].b_io = tape.param(*r.b_io);
      lv[l].b_hi = tape.param(*r.b_hi); lv[l].b_hf = tape.param(*r.b_hf);
      lv[l].b_hg = tape.param(*r.b_hg); lv[l].b_ho = tape.param(*r.b_ho);
      lv[l].h = tape.constant(NdArray({config.H}));
      lv[l].c = tape.constant(NdArray({config.H}));
    }
    Var proj = tape.param(*ws.projection);
    Var alpha = tape.param(*ws.alpha);
    Var beta = tape.param(*ws.beta);
    Var one = tape.constant_scalar(1.0);
    Var neg_one = tape.constant_scalar(-1.0);

    std::vector<Var> step_losses;
    step_losses.reserve(T_used);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < T_used; ++t) {
      std::vector<Var> cols;
      cols.reserve(P);
      for (std::size_t p = 0; p < P; ++p) cols.push_back(tape.pick_col(conv[p], T, t));
      Var x = tape.concat(cols);
      for (std::size_t l = 0; l < config.layers; ++l) {
        LayerVars& L = lv[l];
        auto gate = [&](Var wi, Var bi, Var wh, Var bh) {
          return tape.add(tape.add(tape.matvec(wi, x), bi),
                          tape.add(tape.matvec(wh, L.h), bh));
        };
        Var f = tape.sigmoid(gate(L.w_if, L.b_if, L.w_hf, L.b_hf));
        Var i = tape.sigmoid(gate(L.w_ii, L.b_ii, L.w_hi, L.b_hi));
        Var o = tape.sigmoid(gate(L.w_io, L.b_io, L.w_ho, L.b_ho));
        Var g = tape.tanh(gate(L.w_ig, L.b_ig, L.w_hg, L.b_hg));
        L.c = tape.add(tape.mul(f, L.c), tape.mul(i, g));
        L.h = tape.mul(o, tape.tanh(L.c));
        x = L.h;
      }
      Var out = tape.matvec(proj, lv.back().h);
      Var y = tape.add(tape.sum(tape.mul(alpha, out)), beta);
      double y_val = tape.value(y)[0];
      if ((y_val > 0.0 ? 1 : 0) == labels[t]) ++correct;

      // -log softmax over (rise, fall) degrees; s = +-(2 sigmoid(y) - 1)
      Var g0 = tape.sigmoid(y);
      Var s = tape.add(tape.scale(g0, 2.0), neg_one);
      if (labels[t] == 0) s = tape.scale(s, -1.0);
      step_losses.push_back(tape.log(tape.add(one, tape.exp(tape.scale(s, -1.0)))));
    }
    Var mean_ce = tape.scale(tape.sum(tape.concat(step_losses)),
                             1.0 / static_cast<double>(T_used));
    Var total = mean_ce;
    if (config.lambda > 0.0) {
      // Frobenius norm over every parameter leaf already on the tape
      std::vector<Var> sq_terms;
      sq_terms.push_back(tape.sum_squares(kernels));
      sq_terms.push_back(tape.sum_squares(cbias));
      for (auto& L : lv) {
        for (Var w : {L.w_ii, L.w_if, L.w_ig, L.w_io, L.w_hi, L.w_hf, L.w_hg, L.w_ho,
                      L.b_ii, L.b_if, L.b_ig, L.b_io, L.b_hi, L.b_hf, L.b_hg, L.b_ho})
          sq_terms.push_back(tape.sum_squares(w));
      }
      sq_terms.push_back(tape.sum_squares(proj));
      sq_terms.push_back(tape.sum_squares(alpha));
      sq_terms.push_back(tape.sum_squares(beta));
      Var reg = tape.scale(tape.sqrt(tape.sum(tape.concat(sq_terms))), config.lambda);
      total = tape.add(mean_ce, reg);
    }
    if (acc_out) *acc_out = static_cast<double>(correct) / static_cast<double>(T_used);
    if (with_grad) tape.backward(total);
    return tape.value(total)[0];
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double acc = 0.0;
    double l = run_epoch(true, &acc);
    result.loss_history.push_back(l);
    result.acc_history.push_back(acc);
    adam.step();
  }
  double final_acc = 0.0;
  run_epoch(false, &final_acc);
  result.final_accuracy = final_acc;
  tape.clear();

  result.model = snapshot_model(config, ws, rows2m, pair_order);
  result.model.trained = config.epochs > 0;
  result.adam_m = adam.first_moments();
  result.adam_v = adam.second_moments();
  result.adam_steps = adam.step_count();
  return result;
}

}  // namespace deepcnl
