#include <doctest.h>

#include <cmath>

#include "deepcnl/model.hpp"
#include "deepcnl/rng.hpp"

using namespace deepcnl;

namespace {

// two binary series convolved by hand-chosen pattern kernels; the expected
// output matrix is known exactly
ObservationMatrix two_row_obs() {
  ObservationMatrix obs;
  obs.pair = {"S0", "S1"};
  obs.features_per_stock = 1;
  obs.rows = NdArray({2, 6}, {1, 1, 1, 1, 1, 1,
                              1, 1, 0, 1, 1, 0});
  return obs;
}

KernelBank two_kernels() {
  KernelBank bank;
  bank.K = 2;
  bank.L = 3;
  bank.rows = 2;
  // layout [k][window offset][row]
  bank.kernels = NdArray({2, 6}, {0, 0, 0, 0, 0, 1,
                                  1, 1, 1, 1, 1, 0});
  bank.bias = 0.0;
  return bank;
}

LstmLayerParams random_layer(std::size_t input_dim, std::size_t hidden, Rng& rng) {
  LstmLayerParams lp;
  lp.input_dim = input_dim;
  lp.hidden = hidden;
  auto mat = [&](std::size_t r, std::size_t c) {
    NdArray m({r, c});
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.uniform(-1, 1);
    return m;
  };
  auto vec = [&](std::size_t n) {
    NdArray v({n});
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(-1, 1);
    return v;
  };
  lp.w_ii = mat(hidden, input_dim); lp.w_if = mat(hidden, input_dim);
  lp.w_ig = mat(hidden, input_dim); lp.w_io = mat(hidden, input_dim);
  lp.w_hi = mat(hidden, hidden); lp.w_hf = mat(hidden, hidden);
  lp.w_hg = mat(hidden, hidden); lp.w_ho = mat(hidden, hidden);
  lp.b_ii = vec(hidden); lp.b_if = vec(hidden); lp.b_ig = vec(hidden);
  lp.b_io = vec(hidden); lp.b_hi = vec(hidden); lp.b_hf = vec(hidden);
  lp.b_hg = vec(hidden); lp.b_ho = vec(hidden);
  return lp;
}

// small synthetic panel with a weak planted co-movement so training has
// something to latch onto
AlignedPanel tiny_panel(std::size_t num_symbols, std::size_t days, Rng& rng) {
  AlignedPanel panel;
  for (std::size_t s = 0; s < num_symbols; ++s)
    panel.symbols.push_back("T" + std::to_string(s));
  for (std::size_t t = 0; t < days; ++t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "2021-01-%02zu", t + 1);
    panel.dates.push_back(buf);
  }
  panel.features = {"open", "close", "low", "high", "volume"};
  panel.values = NdArray({num_symbols, 5, days});
  for (std::size_t s = 0; s < num_symbols; ++s) {
    double price = 50.0 + 10.0 * static_cast<double>(s);
    for (std::size_t t = 0; t < days; ++t) {
      price *= 1.0 + rng.uniform(-0.02, 0.02);
      panel.at(s, 0, t) = price * 0.99;
      panel.at(s, 1, t) = price;
      panel.at(s, 2, t) = price * 0.98;
      panel.at(s, 3, t) = price * 1.01;
      panel.at(s, 4, t) = 1e5 * (1.0 + rng.uniform(0, 1));
    }
  }
  return panel;
}

std::vector<double> tiny_index(std::size_t days, Rng& rng) {
  std::vector<double> idx(days);
  double v = 100.0;
  for (std::size_t t = 0; t < days; ++t) {
    v *= 1.0 + rng.uniform(-0.01, 0.01);
    idx[t] = v;
  }
  return idx;
}

}  // namespace

TEST_CASE("evidence convolution reproduces the hand-worked binary example") {
  EvidenceTensor ev = compute_evidence({two_row_obs()}, two_kernels());
  REQUIRE(ev.pairs.size() == 1);
  REQUIRE(ev.K == 2);
  REQUIRE(ev.steps == 4);
  const double want[2][4] = {{0, 1, 1, 0}, {5, 4, 4, 5}};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t t = 0; t < 4; ++t) CHECK(ev.at(0, k, t) == want[k][t]);
}

TEST_CASE("evidence bias shifts every entry") {
  KernelBank bank = two_kernels();
  bank.bias = 2.5;
  EvidenceTensor ev = compute_evidence({two_row_obs()}, bank);
  CHECK(ev.at(0, 0, 0) == 2.5);
  CHECK(ev.at(0, 1, 0) == 7.5);
}

TEST_CASE("evidence requires consistent observation shapes") {
  ObservationMatrix a = two_row_obs();
  ObservationMatrix b = two_row_obs();
  b.rows = NdArray({2, 5});
  CHECK_THROWS(compute_evidence({a, b}, two_kernels()));
}

TEST_CASE("lstm_step matches a scalar oracle over 100 randomized steps") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    LstmLayerParams lp = random_layer(1, 1, rng);
    double x = rng.uniform(-2, 2);
    double h_prev = rng.uniform(-1, 1);
    double c_prev = rng.uniform(-1, 1);

    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    double f = sig(lp.w_if[0] * x + lp.w_hf[0] * h_prev + lp.b_if[0] + lp.b_hf[0]);
    double i = sig(lp.w_ii[0] * x + lp.w_hi[0] * h_prev + lp.b_ii[0] + lp.b_hi[0]);
    double o = sig(lp.w_io[0] * x + lp.w_ho[0] * h_prev + lp.b_io[0] + lp.b_ho[0]);
    double g = std::tanh(lp.w_ig[0] * x + lp.w_hg[0] * h_prev + lp.b_ig[0] + lp.b_hg[0]);
    double c = f * c_prev + i * g;
    double h = o * std::tanh(c);

    auto [hv, cv] = lstm_step({x}, {h_prev}, {c_prev}, lp);
    CHECK(std::abs(hv[0] - h) < 1e-12);
    CHECK(std::abs(cv[0] - c) < 1e-12);
  }
}

TEST_CASE("forward with zero weights emits the head bias at every step") {
  EvidenceTensor ev = compute_evidence({two_row_obs()}, two_kernels());
  LstmLayerParams lp;
  lp.input_dim = 2;
  lp.hidden = 3;
  auto zmat = [](std::size_t r, std::size_t c) { return NdArray({r, c}); };
  lp.w_ii = zmat(3, 2); lp.w_if = zmat(3, 2); lp.w_ig = zmat(3, 2); lp.w_io = zmat(3, 2);
  lp.w_hi = zmat(3, 3); lp.w_hf = zmat(3, 3); lp.w_hg = zmat(3, 3); lp.w_ho = zmat(3, 3);
  lp.b_ii = NdArray({3}); lp.b_if = NdArray({3}); lp.b_ig = NdArray({3});
  lp.b_io = NdArray({3}); lp.b_hi = NdArray({3}); lp.b_hf = NdArray({3});
  lp.b_hg = NdArray({3}); lp.b_ho = NdArray({3});
  Head head;
  head.projection = NdArray({2, 3});
  head.alpha = NdArray({2});
  head.beta = 0.75;
  auto scores = forward(ev, {lp}, head);
  REQUIRE(scores.size() == 4);
  for (double y : scores) CHECK(y == 0.75);
}

TEST_CASE("score is a complementary pair summing to one") {
  auto [rise, fall] = score(0.0);
  CHECK(rise == doctest::Approx(0.5));
  CHECK(fall == doctest::Approx(0.5));
  auto [r2, f2] = score(3.0);
  CHECK(r2 > 0.9);
  CHECK(r2 + f2 == doctest::Approx(1.0).epsilon(1e-12));
  // extreme raw scores stay finite
  auto [r3, f3] = score(1000.0);
  CHECK(r3 == doctest::Approx(1.0));
  CHECK(std::isfinite(f3));
  auto [r4, f4] = score(-1000.0);
  CHECK(f4 == doctest::Approx(1.0));
  CHECK(std::isfinite(r4));
}

TEST_CASE("loss fixed points: uniform scores give ln 2") {
  std::vector<double> y(5, 0.0);
  std::vector<int> labels{1, 0, 1, 1, 0};
  CHECK(loss(y, labels, {}, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("loss fixed points: saturated correct scores reach the softmax floor") {
  std::vector<double> y{1000.0, -1000.0};
  std::vector<int> labels{1, 0};
  double floor = std::log(1.0 + std::exp(-1.0));  // 0.31326168751822286
  CHECK(loss(y, labels, {}, 0.0) == doctest::Approx(floor).epsilon(1e-12));
  // wrong saturated labels land at softplus(+1)
  std::vector<int> wrong{0, 1};
  CHECK(loss(y, wrong, {}, 0.0) ==
        doctest::Approx(std::log(1.0 + std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("loss regularizer isolates as lambda times frobenius norm") {
  std::vector<double> y(3, 0.0);
  std::vector<int> labels{1, 0, 1};
  NdArray w({2, 2}, {3, 0, 0, 4});  // frobenius norm 5
  double with_reg = loss(y, labels, {&w}, 0.1);
  CHECK(with_reg - std::log(2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("train with zero epochs returns the seeded initialization") {
  Rng rng(55);
  AlignedPanel panel = tiny_panel(3, 12, rng);
  auto idx = tiny_index(12, rng);
  ModelConfig cfg;
  cfg.K = 2; cfg.L = 3; cfg.H = 4; cfg.epochs = 0; cfg.seed = 9;
  TrainResult a = train(panel, idx, cfg);
  TrainResult b = train(panel, idx, cfg);
  CHECK(a.loss_history.empty());
  CHECK_FALSE(a.model.trained);
  REQUIRE(a.model.pair_order.size() == 3);
  // same seed, same init
  for (std::size_t i = 0; i < a.model.bank.kernels.size(); ++i)
    CHECK(a.model.bank.kernels[i] == b.model.bank.kernels[i]);
  CHECK(a.model.bank.kernels.shape() ==
        std::vector<std::size_t>{2, 3 * 2 * cfg.features.size()});
}

TEST_CASE("train is deterministic and reduces loss on a small panel") {
  Rng rng(56);
  AlignedPanel panel = tiny_panel(3, 30, rng);
  auto idx = tiny_index(30, rng);
  ModelConfig cfg;
  cfg.K = 2; cfg.L = 3; cfg.H = 4; cfg.epochs = 30; cfg.seed = 3;
  TrainResult a = train(panel, idx, cfg);
  TrainResult b = train(panel, idx, cfg);
  REQUIRE(a.loss_history.size() == 30);
  REQUIRE(a.acc_history.size() == 30);
  for (std::size_t e = 0; e < 30; ++e) CHECK(a.loss_history[e] == b.loss_history[e]);
  CHECK(a.model.trained);
  CHECK(a.loss_history.back() < a.loss_history.front());
  CHECK(a.final_accuracy >= 0.0);
  CHECK(a.final_accuracy <= 1.0);
  CHECK(a.adam_steps == 30);
  // pair order is canonical lexicographic
  CHECK(a.model.pair_order[0] == std::make_pair(std::string("T0"), std::string("T1")));
  CHECK(a.model.pair_order[2] == std::make_pair(std::string("T1"), std::string("T2")));
}

TEST_CASE("train flags degenerate targets") {
  Rng rng(57);
  AlignedPanel panel = tiny_panel(3, 15, rng);
  std::vector<double> idx(15);
  for (std::size_t t = 0; t < 15; ++t) idx[t] = 100.0 + t;  // monotone rise
  ModelConfig cfg;
  cfg.K = 2; cfg.L = 3; cfg.H = 4; cfg.epochs = 2; cfg.seed = 3;
  TrainResult r = train(panel, idx, cfg);
  CHECK(r.degenerate_targets);
}

TEST_CASE("model config validation rejects bad values") {
  ModelConfig cfg;
  cfg.K = 0;
  CHECK_THROWS(cfg.validate());
  cfg = ModelConfig{};
  cfg.lambda = -1.0;
  CHECK_THROWS(cfg.validate());
  cfg = ModelConfig{};
  cfg.gates = "xz";
  CHECK_THROWS(cfg.validate());
  CHECK_NOTHROW(ModelConfig{}.validate());
}

TEST_CASE("paper-scale preset raises capacity") {
  ModelConfig p = ModelConfig::paper_scale();
  CHECK(p.K == 16);
  CHECK(p.H == 256);
  CHECK(p.layers == 2);
  CHECK_NOTHROW(p.validate());
}
