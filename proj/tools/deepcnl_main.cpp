// deepcnl command line: train / extract / baseline / analyze / simulate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "deepcnl/analysis.hpp"
#include "deepcnl/baselines.hpp"
#include "deepcnl/checkpoint.hpp"
#include "deepcnl/csvio.hpp"
#include "deepcnl/data.hpp"
#include "deepcnl/model.hpp"
#include "deepcnl/network.hpp"
#include "deepcnl/synthmarket.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace deepcnl;
using deepcnl::cli::RunConfig;

namespace {

struct Slice {
  std::string label;  // year or "all"
  AlignedPanel panel;
  std::vector<double> index_close;
};

AlignedPanel select_dates(const AlignedPanel& panel, const std::vector<std::size_t>& idx) {
  AlignedPanel out;
  out.symbols = panel.symbols;
  out.features = panel.features;
  for (std::size_t t : idx) out.dates.push_back(panel.dates[t]);
  out.values = NdArray({panel.num_symbols(), panel.num_features(), idx.size()});
  for (std::size_t s = 0; s < panel.num_symbols(); ++s)
    for (std::size_t f = 0; f < panel.num_features(); ++f)
      for (std::size_t k = 0; k < idx.size(); ++k) out.at(s, f, k) = panel.at(s, f, idx[k]);
  return out;
}

std::vector<Slice> build_slices(const RunConfig& cfg) {
  if (cfg.quotes.empty()) throw std::runtime_error("config: quotes path is required");
  auto records = load_quotes(cfg.quotes);
  std::string index_path = cfg.index_quotes.empty() ? cfg.quotes : cfg.index_quotes;
  auto index_records = load_quotes(index_path);

  std::map<std::string, double> index_close_by_date;
  for (const auto& r : index_records)
    if (r.symbol == cfg.index_symbol) index_close_by_date[r.date] = r.close;
  if (index_close_by_date.empty())
    throw std::runtime_error("no index records for ticker " + cfg.index_symbol + " in " +
                             index_path);

  std::vector<std::string> symbols = cfg.symbols;
  if (symbols.empty()) {
    std::set<std::string> all;
    for (const auto& r : records)
      if (r.symbol != cfg.index_symbol) all.insert(r.symbol);
    symbols.assign(all.begin(), all.end());
  }
  std::sort(symbols.begin(), symbols.end());
  if (cfg.symbol_cap > 0 && symbols.size() > cfg.symbol_cap) symbols.resize(cfg.symbol_cap);

  PanelBuildReport report;
  AlignedPanel panel = build_panel(records, symbols, cfg.start, cfg.end, &report);
  for (const auto& d : report.dropped_symbols)
    std::cerr << "note: dropped symbol with no records in range: " << d << "\n";

  // keep only dates the index also covers
  std::vector<std::size_t> covered;
  for (std::size_t t = 0; t < panel.num_dates(); ++t)
    if (index_close_by_date.count(panel.dates[t])) covered.push_back(t);
  if (covered.size() < panel.num_dates()) panel = select_dates(panel, covered);

  std::vector<Slice> slices;
  if (cfg.yearly_split) {
    std::map<std::string, std::vector<std::size_t>> by_year;
    for (std::size_t t = 0; t < panel.num_dates(); ++t)
      by_year[panel.dates[t].substr(0, 4)].push_back(t);
    for (const auto& [year, idx] : by_year) {
      Slice s;
      s.label = year;
      s.panel = select_dates(panel, idx);
      for (std::size_t t : idx) s.index_close.push_back(index_close_by_date[panel.dates[t]]);
      slices.push_back(std::move(s));
    }
  } else {
    Slice s;
    s.label = "all";
    s.panel = panel;
    for (const auto& d : panel.dates) s.index_close.push_back(index_close_by_date[d]);
    slices.push_back(std::move(s));
  }
  return slices;
}

void parallel_for(std::size_t jobs, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::mutex err_mutex;
  std::vector<std::string> errors;
  std::size_t stride = jobs;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += stride) {
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          errors.push_back(e.what());
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (!errors.empty()) throw std::runtime_error(errors.front());
}

std::string provenance_line(const RunConfig& cfg, std::uint64_t seed) {
  return "config=" + cfg.hash() + " seed=" + std::to_string(seed);
}

std::uint64_t job_seed(const RunConfig& cfg, std::size_t slice_idx, std::size_t trial) {
  return cfg.seed + 104729ULL * slice_idx + 10007ULL * trial;
}

int cmd_train(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  auto slices = build_slices(cfg);
  std::size_t n = slices.size() * cfg.trials;
  parallel_for(cfg.jobs, n, [&](std::size_t job) {
    std::size_t si = job / cfg.trials, trial = job % cfg.trials;
    const Slice& slice = slices[si];
    ModelConfig mc = cfg.model;
    mc.seed = job_seed(cfg, si, trial);
    TrainResult result = train(slice.panel, slice.index_close, mc);
    if (result.degenerate_targets)
      std::cerr << "warning: all rise-fall labels identical in slice " << slice.label << "\n";

    std::string stem = "checkpoint_" + slice.label + "_t" + std::to_string(trial);
    Checkpoint cp = make_checkpoint(result, cfg.hash());
    save_checkpoint(cp, (fs::path(cfg.out_dir) / (stem + ".json")).string());
    save_history_csv(result.loss_history, result.acc_history,
                     (fs::path(cfg.out_dir) / ("history_" + slice.label + "_t" +
                                               std::to_string(trial) + ".csv"))
                         .string(),
                     provenance_line(cfg, mc.seed));
    std::cout << "trained " << slice.label << " trial " << trial
              << ": final loss=" << (result.loss_history.empty()
                                         ? 0.0
                                         : result.loss_history.back())
              << " acc=" << result.final_accuracy << "\n";
  });
  return 0;
}

int cmd_extract(const RunConfig& cfg, const std::vector<std::string>& checkpoints,
                bool absolute) {
  if (checkpoints.empty()) throw std::runtime_error("extract: no checkpoint files given");
  fs::create_directories(cfg.out_dir);
  for (const auto& path : checkpoints) {
    Checkpoint cp = load_checkpoint(path);
    GateSelection gates = GateSelection::parse(cfg.model.gates);
    PairWeights weights = extract_weights(cp.model, gates, absolute);
    std::set<std::string> node_set;
    for (const auto& [a, b] : cp.model.pair_order) {
      node_set.insert(a);
      node_set.insert(b);
    }
    CoInvestNetwork net = generate_network(
        weights, cfg.gamma, std::vector<std::string>(node_set.begin(), node_set.end()));
    net.meta.gates = gates.str();
    net.meta.config_hash = cfg.hash();
    net.meta.seed = cp.model.config.seed;
    net.meta.date_range = cfg.start + ".." + cfg.end;
    std::string stem = fs::path(path).stem().string();
    std::string out = (fs::path(cfg.out_dir) / ("network_" + stem + ".csv")).string();
    save_network(net, out);
    std::cout << "wrote " << out << " (" << net.edges.size() << " edges)\n";
  }
  return 0;
}

int cmd_baseline(const RunConfig& cfg, const std::string& method) {
  fs::create_directories(cfg.out_dir);
  auto slices = build_slices(cfg);
  for (const Slice& slice : slices) {
    PairWeights weights;
    if (method == "pcc")
      weights = pcc_weights(slice.panel, cfg.baseline_feature, cfg.p_threshold);
    else if (method == "dtw")
      weights = dtw_weights(slice.panel, cfg.baseline_feature);
    else if (method == "vwl")
      weights = vwl_weights(slice.panel, cfg.baseline_feature, cfg.wl_iterations);
    else
      throw std::runtime_error("unknown baseline method: " + method);

    CoInvestNetwork net = generate_network(weights, cfg.gamma, slice.panel.symbols);
    net.meta.gates = method;
    net.meta.config_hash = cfg.hash();
    net.meta.seed = cfg.seed;
    net.meta.date_range = slice.panel.dates.front() + ".." + slice.panel.dates.back();
    std::string out =
        (fs::path(cfg.out_dir) / ("baseline_" + method + "_" + slice.label + ".csv")).string();
    save_network(net, out);
    std::cout << "wrote " << out << " (" << net.edges.size() << " edges)\n";
  }
  return 0;
}

std::vector<std::string> read_ticker_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ticker list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

int cmd_analyze(const RunConfig& cfg, const std::string& task,
                const std::vector<std::string>& network_files,
                const std::vector<std::string>& subset_files, const std::string& caps_file,
                const std::string& pairs_file, const std::string& watchlist_file,
                std::size_t top_k) {
  if (network_files.empty()) throw std::runtime_error("analyze: no network files given");
  fs::create_directories(cfg.out_dir);
  std::vector<CoInvestNetwork> nets;
  for (const auto& f : network_files) nets.push_back(load_network(f));

  std::string out_path = (fs::path(cfg.out_dir) / ("analysis_" + task + ".csv")).string();
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write report: " + out_path);
  out << "# " << provenance_line(cfg, cfg.seed) << "\n";

  if (task == "density") {
    if (subset_files.empty()) throw std::runtime_error("analyze density: --subsets required");
    out << "network,subset,density\n";
    for (std::size_t n = 0; n < nets.size(); ++n)
      for (const auto& sf : subset_files) {
        auto tickers = read_ticker_lines(sf);
        std::set<std::string> subset(tickers.begin(), tickers.end());
        out << network_files[n] << "," << sf << ","
            << format_double(edge_density(nets[n], subset)) << "\n";
      }
  } else if (task == "top-degree") {
    out << "network,rank,ticker,mean_cap,std_cap\n";
    MarketCapTable caps;
    if (!caps_file.empty()) caps = load_market_caps(caps_file);
    for (std::size_t n = 0; n < nets.size(); ++n) {
      auto top = top_degree(nets[n], top_k);
      std::string mean = "", std = "";
      if (!caps.empty()) {
        std::vector<std::string> missing;
        MeanStd ms = influence(top, caps, &missing);
        for (const auto& m : missing)
          std::cerr << "note: no market cap for " << m << "\n";
        mean = format_double(ms.mean);
        std = format_double(ms.std);
      }
      for (std::size_t r = 0; r < top.size(); ++r)
        out << network_files[n] << "," << (r + 1) << "," << top[r] << "," << mean << ","
            << std << "\n";
    }
  } else if (task == "components") {
    out << "network,component_size,nodes\n";
    for (std::size_t n = 0; n < nets.size(); ++n) {
      CoInvestNetwork comp = largest_component(nets[n]);
      out << network_files[n] << "," << comp.nodes.size() << ",";
      for (std::size_t i = 0; i < comp.nodes.size(); ++i)
        out << (i ? ";" : "") << comp.nodes[i];
      out << "\n";
    }
  } else if (task == "distances") {
    if (pairs_file.empty()) throw std::runtime_error("analyze distances: --pairs required");
    CsvTable pairs = read_csv(pairs_file);
    int ca = pairs.column("a"), cb = pairs.column("b");
    if (ca < 0 || cb < 0) throw std::runtime_error("pairs file needs columns a,b");
    out << "a,b,mean,std,observed,skipped\n";
    for (const auto& row : pairs.rows) {
      try {
        DistanceStats ds = avg_distance(nets, row[ca], row[cb]);
        out << row[ca] << "," << row[cb] << "," << format_double(ds.stats.mean) << ","
            << format_double(ds.stats.std) << "," << ds.observed << "," << ds.skipped << "\n";
      } catch (const std::runtime_error&) {
        out << row[ca] << "," << row[cb] << ",,,0," << nets.size() << "\n";
      }
    }
  } else if (task == "coverage") {
    if (watchlist_file.empty())
      throw std::runtime_error("analyze coverage: --watchlist required");
    auto watchlist = read_ticker_lines(watchlist_file);
    out << "network,coverage\n";
    for (std::size_t n = 0; n < nets.size(); ++n)
      out << network_files[n] << "," << format_double(coverage(nets[n], watchlist)) << "\n";
  } else {
    throw std::runtime_error("unknown analyze task: " + task);
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& spec_path, bool demo, bool nested,
                 std::size_t days) {
  fs::create_directories(cfg.out_dir);
  MarketSpec spec;
  std::vector<std::set<std::string>> subsets;
  if (!spec_path.empty())
    spec = load_spec(spec_path);
  else if (nested)
    spec = nested_spec(&subsets);
  else if (demo)
    spec = demo_spec();
  else
    throw std::runtime_error("simulate: give --spec FILE or --demo or --nested");

  GeneratedMarket market = generate(spec, days, cfg.seed);
  std::string prov = provenance_line(cfg, cfg.seed);
  fs::path out(cfg.out_dir);
  write_quotes_csv(market.panel, (out / "market.csv").string(), prov);
  write_index_csv(market.index_close, market.panel.dates, "INDEX",
                  (out / "index.csv").string(), prov);
  write_truth_csv(market.truth, (out / "truth.csv").string());
  save_spec(spec, (out / "spec.json").string());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::ofstream sf(out / ("subset" + std::to_string(i + 1) + ".txt"));
    for (const auto& s : subsets[i]) sf << s << "\n";
  }
  std::cout << "wrote market.csv, index.csv, truth.csv, spec.json to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepcnl: co-investment network learning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may appear after the subcommand

  std::string config_path, out_override, gates_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  double gamma_override = 0.0;
  bool gamma_set = false;

  app.add_option("--config", config_path, "run configuration file (key = value)");
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--gates", gates_override, "gate selection override (subset of igof)");
  app.add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--gamma", gamma_override, "rare ratio override")
      ->each([&](const std::string&) { gamma_set = true; });

  auto* train_cmd = app.add_subcommand("train", "train one model per slice per trial");

  auto* extract_cmd = app.add_subcommand("extract", "extract networks from checkpoints");
  std::vector<std::string> checkpoints;
  bool extract_absolute = false;
  extract_cmd->add_option("checkpoints", checkpoints, "checkpoint JSON files");
  extract_cmd->add_flag("--absolute", extract_absolute,
                        "sum gate-weight magnitudes instead of signed values");

  auto* baseline_cmd = app.add_subcommand("baseline", "baseline network construction");
  std::string method;
  baseline_cmd->add_option("method", method, "pcc | dtw | vwl")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "graph metrics over network files");
  std::string task, caps_file, pairs_file, watchlist_file;
  std::vector<std::string> network_files, subset_files;
  std::size_t top_k = 10;
  analyze_cmd
      ->add_option("task", task, "density | top-degree | components | distances | coverage")
      ->required();
  analyze_cmd->add_option("--networks", network_files, "edge list CSV files")->required();
  analyze_cmd->add_option("--subsets", subset_files, "ticker list files (density)");
  analyze_cmd->add_option("--caps", caps_file, "market cap CSV (top-degree)");
  analyze_cmd->add_option("--pairs", pairs_file, "pair CSV with columns a,b (distances)");
  analyze_cmd->add_option("--watchlist", watchlist_file, "ticker list file (coverage)");
  analyze_cmd->add_option("-k", top_k, "top-degree node count");

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a planted synthetic market");
  std::string spec_path;
  bool demo = false, nested = false;
  std::size_t days = 250;
  simulate_cmd->add_option("--spec", spec_path, "market spec JSON");
  simulate_cmd->add_flag("--demo", demo, "bundled 20-stock demo spec");
  simulate_cmd->add_flag("--nested", nested, "nested-subset spec for density ordering");
  simulate_cmd->add_option("--days", days, "number of trading days");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg =
        config_path.empty() ? deepcnl::cli::default_config()
                            : deepcnl::cli::parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (!gates_override.empty()) cfg.model.gates = gates_override;
    if (seed_set) cfg.seed = seed_override;
    if (gamma_set) cfg.gamma = gamma_override;
    cfg.model.validate();

    if (train_cmd->parsed()) return cmd_train(cfg);
    if (extract_cmd->parsed()) return cmd_extract(cfg, checkpoints, extract_absolute);
    if (baseline_cmd->parsed()) return cmd_baseline(cfg, method);
    if (analyze_cmd->parsed())
      return cmd_analyze(cfg, task, network_files, subset_files, caps_file, pairs_file,
                         watchlist_file, top_k);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg, spec_path, demo, nested, days);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
