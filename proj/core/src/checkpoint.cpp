#include "deepcnl/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "deepcnl/csvio.hpp"

namespace deepcnl {

using nlohmann::json;

namespace {

json array_to_json(const NdArray& a) {
  return json{{"shape", a.shape()}, {"data", a.vec()}};
}

NdArray array_from_json(const json& j) {
  std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
  std::vector<double> data = j.at("data").get<std::vector<double>>();
  return NdArray(std::move(shape), std::move(data));
}

json config_to_json(const ModelConfig& c) {
  return json{{"K", c.K},           {"L", c.L},       {"H", c.H},
              {"layers", c.layers}, {"lambda", c.lambda}, {"lr", c.lr},
              {"epochs", c.epochs}, {"seed", c.seed}, {"features", c.features},
              {"gates", c.gates}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.K = j.at("K");
  c.L = j.at("L");
  c.H = j.at("H");
  c.layers = j.at("layers");
  c.lambda = j.at("lambda");
  c.lr = j.at("lr");
  c.epochs = j.at("epochs");
  c.seed = j.at("seed");
  c.features = j.at("features").get<std::vector<std::string>>();
  c.gates = j.at("gates");
  return c;
}

json layer_to_json(const LstmLayerParams& l) {
  return json{{"input_dim", l.input_dim}, {"hidden", l.hidden},
              {"w_ii", array_to_json(l.w_ii)}, {"w_if", array_to_json(l.w_if)},
              {"w_ig", array_to_json(l.w_ig)}, {"w_io", array_to_json(l.w_io)},
              {"w_hi", array_to_json(l.w_hi)}, {"w_hf", array_to_json(l.w_hf)},
              {"w_hg", array_to_json(l.w_hg)}, {"w_ho", array_to_json(l.w_ho)},
              {"b_ii", array_to_json(l.b_ii)}, {"b_if", array_to_json(l.b_if)},
              {"b_ig", array_to_json(l.b_ig)}, {"b_io", array_to_json(l.b_io)},
              {"b_hi", array_to_json(l.b_hi)}, {"b_hf", array_to_json(l.b_hf)},
              {"b_hg", array_to_json(l.b_hg)}, {"b_ho", array_to_json(l.b_ho)}};
}

LstmLayerParams layer_from_json(const json& j) {
  LstmLayerParams l;
  l.input_dim = j.at("input_dim");
  l.hidden = j.at("hidden");
  l.w_ii = array_from_json(j.at("w_ii"));
  l.w_if = array_from_json(j.at("w_if"));
  l.w_ig = array_from_json(j.at("w_ig"));
  l.w_io = array_from_json(j.at("w_io"));
  l.w_hi = array_from_json(j.at("w_hi"));
  l.w_hf = array_from_json(j.at("w_hf"));
  l.w_hg = array_from_json(j.at("w_hg"));
  l.w_ho = array_from_json(j.at("w_ho"));
  l.b_ii = array_from_json(j.at("b_ii"));
  l.b_if = array_from_json(j.at("b_if"));
  l.b_ig = array_from_json(j.at("b_ig"));
  l.b_io = array_from_json(j.at("b_io"));
  l.b_hi = array_from_json(j.at("b_hi"));
  l.b_hf = array_from_json(j.at("b_hf"));
  l.b_hg = array_from_json(j.at("b_hg"));
  l.b_ho = array_from_json(j.at("b_ho"));
  return l;
}

}  // namespace

Checkpoint make_checkpoint(const TrainResult& result, const std::string& config_hash) {
  Checkpoint cp;
  cp.model = result.model;
  cp.adam_m = result.adam_m;
  cp.adam_v = result.adam_v;
  cp.adam_steps = result.adam_steps;
  cp.config_hash = config_hash;
  return cp;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  json j;
  j["format"] = "deepcnl-checkpoint-v1";
  j["config"] = config_to_json(cp.model.config);
  j["config_hash"] = cp.config_hash;
  j["trained"] = cp.model.trained;
  j["kernel_bank"] = json{{"K", cp.model.bank.K},
                          {"L", cp.model.bank.L},
                          {"rows", cp.model.bank.rows},
                          {"kernels", array_to_json(cp.model.bank.kernels)},
                          {"bias", cp.model.bank.bias}};
  json layers = json::array();
  for (const auto& l : cp.model.lstm) layers.push_back(layer_to_json(l));
  j["lstm"] = layers;
  j["head"] = json{{"projection", array_to_json(cp.model.head.projection)},
                   {"alpha", array_to_json(cp.model.head.alpha)},
                   {"beta", cp.model.head.beta}};
  json pairs = json::array();
  for (const auto& [a, b] : cp.model.pair_order) pairs.push_back(json::array({a, b}));
  j["pair_order"] = pairs;
  json opt;
  opt["steps"] = cp.adam_steps;
  opt["m"] = json::array();
  opt["v"] = json::array();
  for (const auto& m : cp.adam_m) opt["m"].push_back(array_to_json(m));
  for (const auto& v : cp.adam_v) opt["v"].push_back(array_to_json(v));
  j["optimizer"] = opt;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump();
  out << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "deepcnl-checkpoint-v1")
    throw std::runtime_error("not a deepcnl checkpoint: " + path);
  Checkpoint cp;
  cp.model.config = config_from_json(j.at("config"));
  cp.config_hash = j.value("config_hash", "");
  cp.model.trained = j.at("trained");
  const json& kb = j.at("kernel_bank");
  cp.model.bank.K = kb.at("K");
  cp.model.bank.L = kb.at("L");
  cp.model.bank.rows = kb.at("rows");
  cp.model.bank.kernels = array_from_json(kb.at("kernels"));
  cp.model.bank.bias = kb.at("bias");
  for (const json& l : j.at("lstm")) cp.model.lstm.push_back(layer_from_json(l));
  const json& h = j.at("head");
  cp.model.head.projection = array_from_json(h.at("projection"));
  cp.model.head.alpha = array_from_json(h.at("alpha"));
  cp.model.head.beta = h.at("beta");
  for (const json& p : j.at("pair_order"))
    cp.model.pair_order.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  const json& opt = j.at("optimizer");
  cp.adam_steps = opt.at("steps");
  for (const json& m : opt.at("m")) cp.adam_m.push_back(array_from_json(m));
  for (const json& v : opt.at("v")) cp.adam_v.push_back(array_from_json(v));
  return cp;
}

void save_history_csv(const std::vector<double>& loss, const std::vector<double>& acc,
                      const std::string& path, const std::string& provenance) {
  if (loss.size() != acc.size())
    throw std::invalid_argument("save_history_csv: history length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write history: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "epoch,loss,accuracy\n";
  for (std::size_t e = 0; e < loss.size(); ++e)
    out << e << "," << format_double(loss[e]) << "," << format_double(acc[e]) << "\n";
}

}  // namespace deepcnl
