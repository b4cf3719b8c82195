#include "deepcnl/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "deepcnl/csvio.hpp"

namespace deepcnl {

GateSelection GateSelection::parse(const std::string& s) {
  GateSelection g;
  for (char c : s) {
    switch (c) {
      case 'i': g.input_gate = true; break;
      case 'g': g.input_rep = true; break;
      case 'o': g.output_gate = true; break;
      case 'f': g.forget_gate = true; break;
      default:
        throw std::invalid_argument("GateSelection: unknown gate '" + std::string(1, c) + "'");
    }
  }
  if (g.count() == 0) throw std::invalid_argument("GateSelection: empty selection");
  return g;
}

std::string GateSelection::str() const {
  std::string s;
  if (input_gate) s += 'i';
  if (input_rep) s += 'g';
  if (output_gate) s += 'o';
  if (forget_gate) s += 'f';
  return s;
}

std::size_t GateSelection::count() const {
  return std::size_t(input_gate) + std::size_t(input_rep) + std::size_t(output_gate) +
         std::size_t(forget_gate);
}

PairWeights extract_weights(const DeepCnlModel& model, const GateSelection& gates,
                            bool absolute) {
  if (!model.trained) throw std::invalid_argument("extract_weights: model not trained");
  if (model.lstm.empty()) throw std::invalid_argument("extract_weights: no LSTM layers");
  if (gates.count() == 0) throw std::invalid_argument("extract_weights: empty gate selection");
  const LstmLayerParams& l0 = model.lstm.front();
  std::size_t P = model.pair_order.size();
  std::size_t K = model.config.K;
  std::size_t H = l0.hidden;
  if (l0.input_dim != P * K)
    throw std::invalid_argument("extract_weights: layer-0 columns do not map to pairs");

  std::vector<const NdArray*> mats;
  if (gates.input_gate) mats.push_back(&l0.w_ii);
  if (gates.input_rep) mats.push_back(&l0.w_ig);
  if (gates.output_gate) mats.push_back(&l0.w_io);
  if (gates.forget_gate) mats.push_back(&l0.w_if);

  PairWeights out;
  out.reserve(P);
  for (std::size_t p = 0; p < P; ++p) {
    double w = 0.0;
    for (const NdArray* m : mats)
      for (std::size_t l = 0; l < H; ++l)
        for (std::size_t k = 0; k < K; ++k) {
          double v = m->at(l, p * K + k);
          w += absolute ? std::fabs(v) : v;
        }
    out.push_back({model.pair_order[p], w});
  }
  return out;
}

namespace {

PairKey canonical(const PairKey& p) {
  return p.first < p.second ? p : PairKey{p.second, p.first};
}

}  // namespace

CoInvestNetwork generate_network(const PairWeights& weights, double gamma,
                                 const std::vector<std::string>& nodes) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("generate_network: gamma must be in (0, 1]");
  PairWeights sorted;
  sorted.reserve(weights.size());
  for (const auto& pw : weights) {
    if (pw.pair.first == pw.pair.second)
      throw std::invalid_argument("generate_network: self-loop pair");
    sorted.push_back({canonical(pw.pair), pw.weight});
  }
  std::sort(sorted.begin(), sorted.end(), [](const PairWeight& a, const PairWeight& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.pair < b.pair;
  });
  std::size_t P = sorted.size();
  // tolerance guards FP noise in gamma*P (e.g. 0.001 * 1000 slightly above 1)
  std::size_t count =
      static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(P) - 1e-9));
  count = std::min(count, P);

  CoInvestNetwork net;
  net.nodes = nodes;
  net.meta.gamma = gamma;
  for (std::size_t e = 0; e < count; ++e)
    net.edges.push_back({sorted[e].pair.first, sorted[e].pair.second, sorted[e].weight});
  return net;
}

void save_network(const CoInvestNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network: " + path);
  out << "source,target,weight\n";
  for (const auto& e : net.edges)
    out << e.source << "," << e.target << "," << format_double(e.weight) << "\n";
  out.close();

  nlohmann::json meta{{"gamma", net.meta.gamma},
                      {"gates", net.meta.gates},
                      {"config_hash", net.meta.config_hash},
                      {"date_range", net.meta.date_range},
                      {"seed", net.meta.seed},
                      {"nodes", net.nodes}};
  std::ofstream mo(path + ".meta.json");
  if (!mo) throw std::runtime_error("cannot write network metadata: " + path + ".meta.json");
  mo << meta.dump(2) << "\n";
}

CoInvestNetwork load_network(const std::string& path) {
  CsvTable table = read_csv(path);
  int cs = table.column("source"), ct = table.column("target"), cw = table.column("weight");
  if (cs < 0 || ct < 0 || cw < 0)
    throw std::runtime_error("malformed network file (need source,target,weight): " + path);
  CoInvestNetwork net;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    NetworkEdge e{row[cs], row[ct], std::stod(row[cw])};
    if (e.source == e.target)
      throw std::runtime_error("network file has self-loop at row " + std::to_string(r + 1));
    if (e.source > e.target) std::swap(e.source, e.target);
    net.edges.push_back(std::move(e));
    seen.insert(net.edges.back().source);
    seen.insert(net.edges.back().target);
  }
  std::ifstream mi(path + ".meta.json");
  if (mi) {
    nlohmann::json meta;
    mi >> meta;
    net.meta.gamma = meta.value("gamma", 0.0);
    net.meta.gates = meta.value("gates", "");
    net.meta.config_hash = meta.value("config_hash", "");
    net.meta.date_range = meta.value("date_range", "");
    net.meta.seed = meta.value("seed", std::uint64_t{0});
    net.nodes = meta.value("nodes", std::vector<std::string>{});
  }
  if (net.nodes.empty()) net.nodes.assign(seen.begin(), seen.end());
  return net;
}

}  // namespace deepcnl
