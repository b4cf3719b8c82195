#ifndef DEEPCNL_TOOLS_RUN_CONFIG_HPP
#define DEEPCNL_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "deepcnl/model.hpp"

namespace deepcnl::cli {

/// Flat key-value run configuration; unknown keys are rejected.
struct RunConfig {
  // data
  std::string quotes;
  std::string index_quotes;  // defaults to quotes
  std::string index_symbol = "SPY";
  std::vector<std::string> symbols;  // empty = every non-index ticker in quotes
  std::size_t symbol_cap = 0;        // 0 = no cap; otherwise first N sorted
  std::string start = "0000-00-00";
  std::string end = "9999-99-99";
  bool yearly_split = false;
  std::size_t trials = 1;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  std::size_t jobs = 1;

  // model
  ModelConfig model;
  std::string preset;  // "", "desk", "paper"

  // network + baselines
  double gamma = 0.02;
  double p_threshold = 0.01;
  std::string baseline_feature = "close";
  std::size_t wl_iterations = 3;

  /// FNV-1a hash of the canonical key=value rendering.
  std::string hash() const;
  std::string render() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig default_config();

}  // namespace deepcnl::cli

#endif  // DEEPCNL_TOOLS_RUN_CONFIG_HPP
