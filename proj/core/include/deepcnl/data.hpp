#ifndef DEEPCNL_DATA_HPP
#define DEEPCNL_DATA_HPP

#include <string>
#include <utility>
#include <vector>

#include "deepcnl/ndarray.hpp"

namespace deepcnl {

/// One OHLCV row as it appears in the quotes CSV.
struct RawQuoteRecord {
  std::string date;  // ISO-8601 YYYY-MM-DD
  std::string symbol;
  double open = 0, close = 0, low = 0, high = 0;
  double volume = 0;
};

/// Per-stock, per-feature value grid over a common date axis. Feature order
/// is fixed as (open, close, low, high, volume).
struct AlignedPanel {
  std::vector<std::string> symbols;
  std::vector<std::string> dates;
  std::vector<std::string> features;
  NdArray values;  // (symbol, feature, time)

  std::size_t num_symbols() const { return symbols.size(); }
  std::size_t num_dates() const { return dates.size(); }
  std::size_t num_features() const { return features.size(); }

  double& at(std::size_t s, std::size_t f, std::size_t t) {
    return values[(s * features.size() + f) * dates.size() + t];
  }
  double at(std::size_t s, std::size_t f, std::size_t t) const {
    return values[(s * features.size() + f) * dates.size() + t];
  }

  int symbol_index(const std::string& sym) const;
  int feature_index(const std::string& feat) const;

  /// Copy of one (symbol, feature) row.
  std::vector<double> series(const std::string& sym, const std::string& feat) const;
};

/// Two stocks' selected feature rows stacked into one 2M x N matrix;
/// the pair is stored in canonical (i < j) panel order.
struct ObservationMatrix {
  std::pair<std::string, std::string> pair;
  std::size_t features_per_stock = 0;  // M
  NdArray rows;                        // 2M x N
};

/// Binary rise(1)/fall(0) day-over-day labels of the market index;
/// length N-1 (the first date has no predecessor).
struct TargetSeries {
  std::vector<int> values;
  std::string source_symbol;
};

struct PanelBuildReport {
  std::vector<std::string> dropped_symbols;
};

/// Parses a quotes CSV (header date,symbol,open,close,low,high,volume in any
/// column order). Throws on missing columns, unparseable numbers, negative
/// volume, or low/high bounds violations, naming the offending row.
std::vector<RawQuoteRecord> load_quotes(const std::string& path);

/// Date axis = days on which every surviving symbol has a record within
/// [start, end]; symbols with zero records in range are dropped and reported.
/// Surviving symbols are stored in sorted order.
AlignedPanel build_panel(const std::vector<RawQuoteRecord>& records,
                         const std::vector<std::string>& symbols, const std::string& start,
                         const std::string& end, PanelBuildReport* report = nullptr);

/// Per (symbol, feature) row: v' = (v - min) / (max - min); constant rows
/// map to all zeros.
AlignedPanel minmax_normalize(const AlignedPanel& panel);

ObservationMatrix observation_matrix(const AlignedPanel& panel, const std::string& i,
                                     const std::string& j,
                                     const std::vector<std::string>& features);

/// values[t-1] = 1 iff index_close[t] > index_close[t-1] (flat counts as fall).
TargetSeries rise_fall_targets(const std::vector<double>& index_close,
                               const std::string& source_symbol = "");

}  // namespace deepcnl

#endif  // DEEPCNL_DATA_HPP
