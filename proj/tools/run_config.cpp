#include "run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace deepcnl::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));

    if (key == "quotes") cfg.quotes = val;
    else if (key == "index_quotes") cfg.index_quotes = val;
    else if (key == "index_symbol") cfg.index_symbol = val;
    else if (key == "symbols") cfg.symbols = split_list(val);
    else if (key == "symbol_cap") cfg.symbol_cap = std::stoul(val);
    else if (key == "start") cfg.start = val;
    else if (key == "end") cfg.end = val;
    else if (key == "yearly_split") cfg.yearly_split = parse_bool(val, key);
    else if (key == "trials") cfg.trials = std::stoul(val);
    else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "jobs") cfg.jobs = std::stoul(val);
    else if (key == "preset") {
      cfg.preset = val;
      if (val == "paper") {
        ModelConfig base = ModelConfig::paper_scale();
        cfg.model.K = base.K;
        cfg.model.H = base.H;
        cfg.model.layers = base.layers;
      } else if (val != "desk" && !val.empty()) {
        throw std::runtime_error("config: unknown preset " + val);
      }
    }
    else if (key == "K") cfg.model.K = std::stoul(val);
    else if (key == "L") cfg.model.L = std::stoul(val);
    else if (key == "H") cfg.model.H = std::stoul(val);
    else if (key == "layers") cfg.model.layers = std::stoul(val);
    else if (key == "lambda") cfg.model.lambda = std::stod(val);
    else if (key == "lr") cfg.model.lr = std::stod(val);
    else if (key == "epochs") cfg.model.epochs = std::stoul(val);
    else if (key == "features") cfg.model.features = split_list(val);
    else if (key == "gates") cfg.model.gates = val;
    else if (key == "gamma") cfg.gamma = std::stod(val);
    else if (key == "p_threshold") cfg.p_threshold = std::stod(val);
    else if (key == "baseline_feature") cfg.baseline_feature = val;
    else if (key == "wl_iterations") cfg.wl_iterations = std::stoul(val);
    else
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
  }
  if (cfg.trials == 0) throw std::runtime_error("config: trials must be >= 1");
  cfg.model.validate();
  if (!(cfg.gamma > 0.0) || cfg.gamma > 1.0)
    throw std::runtime_error("config: gamma must be in (0, 1]");
  return cfg;
}

std::string RunConfig::render() const {
  std::ostringstream os;
  os << "quotes=" << quotes << "\nindex_quotes=" << index_quotes
     << "\nindex_symbol=" << index_symbol << "\nsymbols=";
  for (std::size_t i = 0; i < symbols.size(); ++i) os << (i ? "," : "") << symbols[i];
  os << "\nsymbol_cap=" << symbol_cap << "\nstart=" << start << "\nend=" << end
     << "\nyearly_split=" << yearly_split << "\ntrials=" << trials << "\nseed=" << seed
     << "\nK=" << model.K << "\nL=" << model.L << "\nH=" << model.H
     << "\nlayers=" << model.layers << "\nlambda=" << model.lambda << "\nlr=" << model.lr
     << "\nepochs=" << model.epochs << "\nfeatures=";
  for (std::size_t i = 0; i < model.features.size(); ++i)
    os << (i ? "," : "") << model.features[i];
  os << "\ngates=" << model.gates << "\ngamma=" << gamma << "\np_threshold=" << p_threshold
     << "\nbaseline_feature=" << baseline_feature << "\nwl_iterations=" << wl_iterations
     << "\n";
  return os.str();
}

std::string RunConfig::hash() const {
  std::string text = render();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace deepcnl::cli
