#include "deepcnl/synthmarket.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "deepcnl/csvio.hpp"
#include "deepcnl/rng.hpp"

namespace deepcnl {

using nlohmann::json;

void MarketSpec::validate() const {
  if (symbols.size() < 2) throw std::invalid_argument("MarketSpec: need at least 2 symbols");
  std::set<std::string> known(symbols.begin(), symbols.end());
  if (known.size() != symbols.size())
    throw std::invalid_argument("MarketSpec: duplicate symbols");
  for (const auto& g : groups) {
    if (g.stocks.size() < 2)
      throw std::invalid_argument("MarketSpec: group must hold at least 2 stocks");
    for (const auto& s : g.stocks)
      if (!known.count(s)) throw std::invalid_argument("MarketSpec: unknown stock " + s);
    if (g.activity < 0 || g.activity > 1)
      throw std::invalid_argument("MarketSpec: activity must be in [0,1]");
    if (g.episode_days < 1)
      throw std::invalid_argument("MarketSpec: episode_days must be >= 1");
  }
  if (noise_sigma < 0) throw std::invalid_argument("MarketSpec: negative noise");
  if (base_price_low <= 0 || base_price_high < base_price_low)
    throw std::invalid_argument("MarketSpec: bad base price range");
  if (!index_weights.empty() && index_weights.size() != symbols.size())
    throw std::invalid_argument("MarketSpec: index weight count mismatch");
}

std::set<PairKey> MarketSpec::ground_truth() const {
  std::set<PairKey> truth;
  for (const auto& g : groups)
    for (std::size_t i = 0; i < g.stocks.size(); ++i)
      for (std::size_t j = i + 1; j < g.stocks.size(); ++j) {
        PairKey p{g.stocks[i], g.stocks[j]};
        if (p.first > p.second) std::swap(p.first, p.second);
        truth.insert(p);
      }
  return truth;
}

namespace {

// Howard Hinnant's civil_from_days; day 0 = 1970-01-01
std::string date_from_day_number(long long z) {
  z += 719468;
  long long era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long y = static_cast<long long>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp < 10 ? mp + 3 : mp - 9;
  y += (m <= 2);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", y, m, d);
  return buf;
}

}  // namespace

GeneratedMarket generate(const MarketSpec& raw_spec, std::size_t days, std::uint64_t seed) {
  raw_spec.validate();
  if (days < 20) throw std::invalid_argument("generate: need at least 20 days");

  MarketSpec spec = raw_spec;
  std::sort(spec.symbols.begin(), spec.symbols.end());
  std::size_t S = spec.symbols.size();
  std::map<std::string, std::size_t> sym_index;
  for (std::size_t s = 0; s < S; ++s) sym_index[spec.symbols[s]] = s;

  // index weights follow the sorted symbol order of the original spec
  std::vector<double> weights(S, 1.0 / static_cast<double>(S));
  if (!raw_spec.index_weights.empty()) {
    double total = 0.0;
    for (double w : raw_spec.index_weights) total += w;
    if (total <= 0) throw std::invalid_argument("generate: non-positive index weight sum");
    for (std::size_t s = 0; s < S; ++s) {
      auto it = std::find(raw_spec.symbols.begin(), raw_spec.symbols.end(), spec.symbols[s]);
      weights[s] = raw_spec.index_weights[it - raw_spec.symbols.begin()] / total;
    }
  }

  Rng rng(seed);
  std::vector<double> close(S), open(S);
  for (std::size_t s = 0; s < S; ++s)
    close[s] = rng.uniform(spec.base_price_low, spec.base_price_high);

  struct GroupState {
    std::size_t remaining = 0;
    double pressure = 0.0;
  };
  std::vector<GroupState> gstate(spec.groups.size());

  GeneratedMarket out;
  out.truth = spec.ground_truth();
  AlignedPanel& panel = out.panel;
  panel.symbols = spec.symbols;
  panel.features = {"open", "close", "low", "high", "volume"};
  panel.dates.reserve(days);
  long long day0 = 18262;  // 2020-01-01
  for (std::size_t d = 0; d < days; ++d)
    panel.dates.push_back(date_from_day_number(day0 + static_cast<long long>(d)));
  panel.values = NdArray({S, 5, days});

  for (std::size_t d = 0; d < days; ++d) {
    // advance group episodes
    std::vector<double> pressure(S, 0.0);
    std::vector<bool> active(S, false);
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
      GroupState& st = gstate[g];
      const InvestorGroup& grp = spec.groups[g];
      if (st.remaining == 0) {
        double roll = rng.uniform();
        double sign_roll = rng.uniform();
        if (roll < grp.activity) {
          st.remaining = grp.episode_days;
          st.pressure = (sign_roll < 0.5 ? 1.0 : -1.0) * grp.magnitude;
        }
      }
      if (st.remaining > 0) {
        --st.remaining;
        for (const auto& sym : grp.stocks) {
          std::size_t s = sym_index[sym];
          pressure[s] += st.pressure;
          active[s] = true;
        }
      }
    }

    for (std::size_t s = 0; s < S; ++s) {
      double noise = rng.normal() * spec.noise_sigma;
      double vol_noise = rng.uniform();
      double spread_roll = rng.uniform();
      double prev_close = close[s];
      if (d > 0) {
        double r = std::clamp(pressure[s] + noise, -0.2, 0.2);
        close[s] = prev_close * (1.0 + r);
        open[s] = prev_close;
      } else {
        open[s] = close[s];
      }
      double hi_base = std::max(open[s], close[s]);
      double lo_base = std::min(open[s], close[s]);
      double spread = 0.002 + 0.004 * spread_roll;
      double volume = spec.volume_base * (1.0 + 0.2 * vol_noise);
      if (active[s]) volume *= 1.0 + spec.volume_boost;

      panel.at(s, 0, d) = open[s];
      panel.at(s, 1, d) = close[s];
      panel.at(s, 2, d) = lo_base * (1.0 - spread);
      panel.at(s, 3, d) = hi_base * (1.0 + spread);
      panel.at(s, 4, d) = volume;
    }

    double idx = 0.0;
    for (std::size_t s = 0; s < S; ++s) idx += weights[s] * close[s];
    out.index_close.push_back(idx);
  }
  return out;
}

double precision_at_k(const CoInvestNetwork& net, const std::set<PairKey>& truth,
                      std::size_t k) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be positive");
  if (net.edges.size() < k)
    throw std::invalid_argument("precision_at_k: k exceeds edge count");
  // edges are kept sorted by weight descending
  std::size_t hit = 0;
  for (std::size_t e = 0; e < k; ++e) {
    PairKey p{net.edges[e].source, net.edges[e].target};
    if (truth.count(p)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(k);
}

namespace {

std::string synth_symbol(std::size_t i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "S%02zu", i);
  return buf;
}

std::vector<std::string> symbol_range(std::size_t from, std::size_t to) {
  std::vector<std::string> out;
  for (std::size_t i = from; i < to; ++i) out.push_back(synth_symbol(i));
  return out;
}

}  // namespace

MarketSpec demo_spec() {
  MarketSpec spec;
  spec.symbols = symbol_range(0, 20);
  // 4 disjoint groups of 4-6 stocks
  std::vector<std::pair<std::size_t, std::size_t>> ranges{{0, 4}, {4, 9}, {9, 14}, {14, 20}};
  for (auto [a, b] : ranges) {
    InvestorGroup g;
    g.stocks = symbol_range(a, b);
    g.activity = 0.35;
    g.magnitude = 0.04;
    g.episode_days = 5;
    spec.groups.push_back(g);
  }
  spec.noise_sigma = 0.002;
  spec.volume_boost = 4.0;
  return spec;
}

MarketSpec nested_spec(std::vector<std::set<std::string>>* subsets) {
  MarketSpec spec;
  spec.symbols = symbol_range(0, 15);
  auto s1 = symbol_range(0, 4);
  auto s2 = symbol_range(0, 8);
  auto s3 = symbol_range(0, 12);
  InvestorGroup g1{s1, 0.4, 0.025, 3};
  InvestorGroup g2{s2, 0.25, 0.015, 3};
  InvestorGroup g3{s3, 0.15, 0.01, 3};
  spec.groups = {g1, g2, g3};
  spec.noise_sigma = 0.005;
  if (subsets) {
    subsets->clear();
    subsets->push_back({s1.begin(), s1.end()});
    subsets->push_back({s2.begin(), s2.end()});
    subsets->push_back({s3.begin(), s3.end()});
  }
  return spec;
}

void save_spec(const MarketSpec& spec, const std::string& path) {
  json j;
  j["symbols"] = spec.symbols;
  j["groups"] = json::array();
  for (const auto& g : spec.groups)
    j["groups"].push_back(json{{"stocks", g.stocks},
                               {"activity", g.activity},
                               {"magnitude", g.magnitude},
                               {"episode_days", g.episode_days}});
  j["noise_sigma"] = spec.noise_sigma;
  j["base_price_low"] = spec.base_price_low;
  j["base_price_high"] = spec.base_price_high;
  j["volume_base"] = spec.volume_base;
  j["volume_boost"] = spec.volume_boost;
  j["index_weights"] = spec.index_weights;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write market spec: " + path);
  out << j.dump(2) << "\n";
}

MarketSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open market spec: " + path);
  json j;
  in >> j;
  MarketSpec spec;
  spec.symbols = j.at("symbols").get<std::vector<std::string>>();
  for (const json& gj : j.at("groups")) {
    InvestorGroup g;
    g.stocks = gj.at("stocks").get<std::vector<std::string>>();
    g.activity = gj.at("activity");
    g.magnitude = gj.at("magnitude");
    g.episode_days = gj.at("episode_days");
    spec.groups.push_back(std::move(g));
  }
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  spec.base_price_low = j.value("base_price_low", spec.base_price_low);
  spec.base_price_high = j.value("base_price_high", spec.base_price_high);
  spec.volume_base = j.value("volume_base", spec.volume_base);
  spec.volume_boost = j.value("volume_boost", spec.volume_boost);
  spec.index_weights = j.value("index_weights", std::vector<double>{});
  spec.validate();
  return spec;
}

void write_quotes_csv(const AlignedPanel& panel, const std::string& path,
                      const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write quotes: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "date,symbol,open,close,low,high,volume\n";
  int fo = panel.feature_index("open"), fc = panel.feature_index("close");
  int fl = panel.feature_index("low"), fh = panel.feature_index("high");
  int fv = panel.feature_index("volume");
  for (std::size_t s = 0; s < panel.num_symbols(); ++s)
    for (std::size_t t = 0; t < panel.num_dates(); ++t)
      out << panel.dates[t] << "," << panel.symbols[s] << ","
          << format_double(panel.at(s, fo, t)) << "," << format_double(panel.at(s, fc, t))
          << "," << format_double(panel.at(s, fl, t)) << ","
          << format_double(panel.at(s, fh, t)) << "," << format_double(panel.at(s, fv, t))
          << "\n";
}

void write_index_csv(const std::vector<double>& index_close,
                     const std::vector<std::string>& dates, const std::string& symbol,
                     const std::string& path, const std::string& provenance) {
  if (index_close.size() != dates.size())
    throw std::invalid_argument("write_index_csv: length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write index: " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "date,symbol,open,close,low,high,volume\n";
  for (std::size_t t = 0; t < dates.size(); ++t) {
    double c = index_close[t];
    double o = t == 0 ? c : index_close[t - 1];
    double lo = std::min(o, c), hi = std::max(o, c);
    out << dates[t] << "," << symbol << "," << format_double(o) << "," << format_double(c)
        << "," << format_double(lo) << "," << format_double(hi) << ",0\n";
  }
}

void write_truth_csv(const std::set<PairKey>& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth pairs: " + path);
  out << "a,b\n";
  for (const auto& [a, b] : truth) out << a << "," << b << "\n";
}

std::set<PairKey> load_truth_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  int ca = table.column("a"), cb = table.column("b");
  if (ca < 0 || cb < 0) throw std::runtime_error("truth file needs columns a,b: " + path);
  std::set<PairKey> truth;
  for (const auto& row : table.rows) {
    PairKey p{row[ca], row[cb]};
    if (p.first > p.second) std::swap(p.first, p.second);
    truth.insert(p);
  }
  return truth;
}

}  // namespace deepcnl
