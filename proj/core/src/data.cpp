#include "deepcnl/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "deepcnl/csvio.hpp"

namespace deepcnl {

int AlignedPanel::symbol_index(const std::string& sym) const {
  auto it = std::find(symbols.begin(), symbols.end(), sym);
  return it == symbols.end() ? -1 : static_cast<int>(it - symbols.begin());
}

int AlignedPanel::feature_index(const std::string& feat) const {
  auto it = std::find(features.begin(), features.end(), feat);
  return it == features.end() ? -1 : static_cast<int>(it - features.begin());
}

std::vector<double> AlignedPanel::series(const std::string& sym, const std::string& feat) const {
  int s = symbol_index(sym);
  int f = feature_index(feat);
  if (s < 0) throw std::invalid_argument("unknown symbol: " + sym);
  if (f < 0) throw std::invalid_argument("unknown feature: " + feat);
  std::vector<double> out(num_dates());
  for (std::size_t t = 0; t < out.size(); ++t)
    out[t] = at(static_cast<std::size_t>(s), static_cast<std::size_t>(f), t);
  return out;
}

namespace {

double parse_number(const std::string& cell, std::size_t row, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("row " + std::to_string(row) + ": non-numeric " + what + " '" +
                             cell + "'");
  }
}

}  // namespace

std::vector<RawQuoteRecord> load_quotes(const std::string& path) {
  CsvTable table = read_csv(path);
  const char* required[] = {"date", "symbol", "open", "close", "low", "high", "volume"};
  std::map<std::string, int> col;
  for (const char* name : required) {
    int c = table.column(name);
    if (c < 0) throw std::runtime_error("missing required column '" + std::string(name) +
                                        "' in " + path);
    col[name] = c;
  }
  std::vector<RawQuoteRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    if (cells.size() < table.header.size())
      throw std::runtime_error("row " + std::to_string(r + 1) + ": too few cells");
    RawQuoteRecord rec;
    rec.date = cells[col["date"]];
    rec.symbol = cells[col["symbol"]];
    rec.open = parse_number(cells[col["open"]], r + 1, "open");
    rec.close = parse_number(cells[col["close"]], r + 1, "close");
    rec.low = parse_number(cells[col["low"]], r + 1, "low");
    rec.high = parse_number(cells[col["high"]], r + 1, "high");
    rec.volume = parse_number(cells[col["volume"]], r + 1, "volume");
    if (rec.volume < 0)
      throw std::runtime_error("row " + std::to_string(r + 1) + ": negative volume");
    if (rec.low > std::min(rec.open, rec.close) || rec.high < std::max(rec.open, rec.close))
      throw std::runtime_error("row " + std::to_string(r + 1) +
                               ": low/high outside open/close bounds");
    out.push_back(std::move(rec));
  }
  return out;
}

AlignedPanel build_panel(const std::vector<RawQuoteRecord>& records,
                         const std::vector<std::string>& symbols, const std::string& start,
                         const std::string& end, PanelBuildReport* report) {
  if (symbols.empty()) throw std::invalid_argument("build_panel: empty symbol list");
  if (start > end) throw std::invalid_argument("build_panel: start after end");

  // ISO dates compare lexicographically
  std::map<std::string, std::map<std::string, const RawQuoteRecord*>> by_symbol;
  for (const auto& r : records) {
    if (r.date < start || r.date > end) continue;
    by_symbol[r.symbol][r.date] = &r;
  }

  std::vector<std::string> kept;
  for (const auto& s : symbols) {
    auto it = by_symbol.find(s);
    if (it == by_symbol.end() || it->second.empty()) {
      if (report) report->dropped_symbols.push_back(s);
    } else {
      kept.push_back(s);
    }
  }
  if (kept.empty()) throw std::runtime_error("build_panel: all symbols dropped");
  // canonical symbol order so panel-position pairs match lexicographic pairs
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  // intersection of date sets across kept symbols
  std::set<std::string> dates;
  for (const auto& [d, rec] : by_symbol[kept.front()]) dates.insert(d);
  for (std::size_t i = 1; i < kept.size(); ++i) {
    std::set<std::string> next;
    for (const auto& [d, rec] : by_symbol[kept[i]])
      if (dates.count(d)) next.insert(d);
    dates = std::move(next);
  }
  if (dates.size() < 2) throw std::runtime_error("build_panel: fewer than 2 common dates");

  AlignedPanel panel;
  panel.symbols = kept;
  panel.dates.assign(dates.begin(), dates.end());
  panel.features = {"open", "close", "low", "high", "volume"};
  panel.values = NdArray({kept.size(), panel.features.size(), panel.dates.size()});
  for (std::size_t s = 0; s < kept.size(); ++s) {
    const auto& recs = by_symbol[kept[s]];
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
      const RawQuoteRecord* r = recs.at(panel.dates[t]);
      panel.at(s, 0, t) = r->open;
      panel.at(s, 1, t) = r->close;
      panel.at(s, 2, t) = r->low;
      panel.at(s, 3, t) = r->high;
      panel.at(s, 4, t) = r->volume;
    }
  }
  return panel;
}

AlignedPanel minmax_normalize(const AlignedPanel& panel) {
  AlignedPanel out = panel;
  std::size_t N = panel.num_dates();
  for (std::size_t s = 0; s < panel.num_symbols(); ++s) {
    for (std::size_t f = 0; f < panel.num_features(); ++f) {
      double lo = panel.at(s, f, 0), hi = lo;
      for (std::size_t t = 1; t < N; ++t) {
        lo = std::min(lo, panel.at(s, f, t));
        hi = std::max(hi, panel.at(s, f, t));
      }
      double span = hi - lo;
      for (std::size_t t = 0; t < N; ++t)
        out.at(s, f, t) = span == 0.0 ? 0.0 : (panel.at(s, f, t) - lo) / span;
    }
  }
  return out;
}

ObservationMatrix observation_matrix(const AlignedPanel& panel, const std::string& i,
                                     const std::string& j,
                                     const std::vector<std::string>& features) {
  if (i == j) throw std::invalid_argument("observation_matrix: identical tickers");
  if (features.empty()) throw std::invalid_argument("observation_matrix: empty feature subset");
  int si = panel.symbol_index(i);
  int sj = panel.symbol_index(j);
  if (si < 0) throw std::invalid_argument("unknown ticker: " + i);
  if (sj < 0) throw std::invalid_argument("unknown ticker: " + j);
  // canonical order by panel position
  std::string a = i, b = j;
  if (si > sj) {
    std::swap(a, b);
    std::swap(si, sj);
  }
  // selected features in panel feature order
  std::vector<std::size_t> fidx;
  for (std::size_t f = 0; f < panel.num_features(); ++f)
    if (std::find(features.begin(), features.end(), panel.features[f]) != features.end())
      fidx.push_back(f);
  if (fidx.empty()) throw std::invalid_argument("observation_matrix: no feature matched");

  std::size_t M = fidx.size(), N = panel.num_dates();
  ObservationMatrix obs;
  obs.pair = {a, b};
  obs.features_per_stock = M;
  obs.rows = NdArray({2 * M, N});
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t t = 0; t < N; ++t) {
      obs.rows.at(m, t) = panel.at(static_cast<std::size_t>(si), fidx[m], t);
      obs.rows.at(M + m, t) = panel.at(static_cast<std::size_t>(sj), fidx[m], t);
    }
  }
  return obs;
}

TargetSeries rise_fall_targets(const std::vector<double>& index_close,
                               const std::string& source_symbol) {
  if (index_close.size() < 2)
    throw std::invalid_argument("rise_fall_targets: need at least 2 values");
  TargetSeries out;
  out.source_symbol = source_symbol;
  out.values.reserve(index_close.size() - 1);
  for (std::size_t t = 1; t < index_close.size(); ++t)
    out.values.push_back(index_close[t] > index_close[t - 1] ? 1 : 0);
  return out;
}

}  // namespace deepcnl
