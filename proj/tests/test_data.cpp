#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>

#include "deepcnl/data.hpp"

using namespace deepcnl;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("deepcnl_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
  std::string str() const { return path.string(); }
};

const char* kBasicQuotes =
    "date,symbol,open,close,low,high,volume\n"
    "2021-01-04,AAA,10,11,9,12,1000\n"
    "2021-01-05,AAA,11,12,10,13,1100\n"
    "2021-01-06,AAA,12,10,9,12,900\n"
    "2021-01-04,BBB,20,21,19,22,2000\n"
    "2021-01-05,BBB,21,20,19,22,2100\n"
    "2021-01-06,BBB,20,22,19,23,2200\n";

}  // namespace

TEST_CASE("load_quotes parses any column order") {
  TempFile f(
      "volume,close,symbol,high,date,open,low\n"
      "500,11,AAA,12,2021-01-04,10,9\n");
  auto records = load_quotes(f.str());
  REQUIRE(records.size() == 1);
  CHECK(records[0].symbol == "AAA");
  CHECK(records[0].date == "2021-01-04");
  CHECK(records[0].open == 10);
  CHECK(records[0].close == 11);
  CHECK(records[0].low == 9);
  CHECK(records[0].high == 12);
  CHECK(records[0].volume == 500);
}

TEST_CASE("load_quotes skips comments and blank lines") {
  TempFile f(
      "# provenance comment\n"
      "date,symbol,open,close,low,high,volume\n"
      "\n"
      "2021-01-04,AAA,10,11,9,12,1000\n");
  CHECK(load_quotes(f.str()).size() == 1);
}

TEST_CASE("load_quotes rejects malformed rows with the offending row named") {
  SUBCASE("missing column") {
    TempFile f("date,symbol,open,close,low,volume\n2021-01-04,AAA,10,11,9,1000\n");
    CHECK_THROWS(load_quotes(f.str()));
  }
  SUBCASE("non-numeric field") {
    TempFile f(
        "date,symbol,open,close,low,high,volume\n"
        "2021-01-04,AAA,ten,11,9,12,1000\n");
    CHECK_THROWS_WITH_AS(load_quotes(f.str()), doctest::Contains("row 1"),
                         std::runtime_error);
  }
  SUBCASE("negative volume") {
    TempFile f(
        "date,symbol,open,close,low,high,volume\n"
        "2021-01-04,AAA,10,11,9,12,-5\n");
    CHECK_THROWS(load_quotes(f.str()));
  }
  SUBCASE("low above high") {
    TempFile f(
        "date,symbol,open,close,low,high,volume\n"
        "2021-01-04,AAA,10,11,13,12,1000\n");
    CHECK_THROWS(load_quotes(f.str()));
  }
}

TEST_CASE("build_panel intersects dates and sorts symbols") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  // BBB first in the request; the panel still comes out sorted
  AlignedPanel panel = build_panel(records, {"BBB", "AAA"}, "0000-00-00", "9999-99-99");
  CHECK(panel.symbols == std::vector<std::string>{"AAA", "BBB"});
  CHECK(panel.num_dates() == 3);
  CHECK(panel.features ==
        std::vector<std::string>{"open", "close", "low", "high", "volume"});
  CHECK(panel.at(0, 1, 0) == 11);  // AAA close on the first day
  CHECK(panel.at(1, 4, 2) == 2200);
}

TEST_CASE("build_panel drops symbols without records and reports them") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  PanelBuildReport report;
  AlignedPanel panel =
      build_panel(records, {"AAA", "ZZZ", "BBB"}, "0000-00-00", "9999-99-99", &report);
  CHECK(panel.num_symbols() == 2);
  CHECK(report.dropped_symbols == std::vector<std::string>{"ZZZ"});
}

TEST_CASE("build_panel date range filter applies") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "2021-01-05", "2021-01-06");
  CHECK(panel.num_dates() == 2);
  CHECK(panel.dates.front() == "2021-01-05");
}

TEST_CASE("build_panel keeps only common dates") {
  TempFile f(
      "date,symbol,open,close,low,high,volume\n"
      "2021-01-04,AAA,10,11,9,12,1000\n"
      "2021-01-05,AAA,11,12,10,13,1100\n"
      "2021-01-05,BBB,21,20,19,22,2100\n"
      "2021-01-06,BBB,20,22,19,23,2200\n"
      "2021-01-04,BBB,20,21,19,22,2000\n"
      "2021-01-07,AAA,12,10,9,12,900\n"
      "2021-01-06,AAA,12,10,9,13,900\n");
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "0000-00-00", "9999-99-99");
  CHECK(panel.dates ==
        std::vector<std::string>{"2021-01-04", "2021-01-05", "2021-01-06"});
}

TEST_CASE("minmax_normalize maps rows to [0,1] and constants to zero") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "0000-00-00", "9999-99-99");
  // force one constant row
  for (std::size_t t = 0; t < panel.num_dates(); ++t) panel.at(0, 0, t) = 7.0;
  AlignedPanel norm = minmax_normalize(panel);
  for (std::size_t s = 0; s < norm.num_symbols(); ++s)
    for (std::size_t ft = 0; ft < norm.num_features(); ++ft) {
      double lo = 1e9, hi = -1e9;
      for (std::size_t t = 0; t < norm.num_dates(); ++t) {
        lo = std::min(lo, norm.at(s, ft, t));
        hi = std::max(hi, norm.at(s, ft, t));
      }
      CHECK(lo >= 0.0);
      CHECK(hi <= 1.0);
    }
  for (std::size_t t = 0; t < norm.num_dates(); ++t) CHECK(norm.at(0, 0, t) == 0.0);
  // AAA close: (11,12,10) -> (0.5, 1, 0)
  CHECK(norm.at(0, 1, 0) == doctest::Approx(0.5));
  CHECK(norm.at(0, 1, 1) == 1.0);
  CHECK(norm.at(0, 1, 2) == 0.0);
}

TEST_CASE("observation_matrix stacks selected features in canonical pair order") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "0000-00-00", "9999-99-99");
  // request in reversed order; canonical pair comes out (AAA, BBB)
  ObservationMatrix obs = observation_matrix(panel, "BBB", "AAA", {"close", "volume"});
  CHECK(obs.pair == std::make_pair(std::string("AAA"), std::string("BBB")));
  CHECK(obs.features_per_stock == 2);
  REQUIRE(obs.rows.shape() == std::vector<std::size_t>{4, 3});
  CHECK(obs.rows.at(0, 0) == 11);    // AAA close
  CHECK(obs.rows.at(1, 0) == 1000);  // AAA volume
  CHECK(obs.rows.at(2, 0) == 21);    // BBB close
  CHECK(obs.rows.at(3, 2) == 2200);  // BBB volume
}

TEST_CASE("observation_matrix rejects unknown symbol or feature") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "0000-00-00", "9999-99-99");
  CHECK_THROWS(observation_matrix(panel, "AAA", "CCC", {"close"}));
  CHECK_THROWS(observation_matrix(panel, "AAA", "BBB", {"vwap"}));
}

TEST_CASE("rise_fall_targets marks rises, flats count as falls") {
  TargetSeries t = rise_fall_targets({10.0, 11.0, 11.0, 9.0, 12.0}, "IDX");
  CHECK(t.values == std::vector<int>{1, 0, 0, 1});
  CHECK(t.source_symbol == "IDX");
}

TEST_CASE("panel series accessor returns one row") {
  TempFile f(kBasicQuotes);
  auto records = load_quotes(f.str());
  AlignedPanel panel = build_panel(records, {"AAA", "BBB"}, "0000-00-00", "9999-99-99");
  CHECK(panel.series("BBB", "close") == std::vector<double>{21, 20, 22});
}
