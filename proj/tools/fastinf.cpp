// fastinf: command-line front end for the influence benchmark.

#include "fastinf/centrality.hpp"
#include "fastinf/epidemic.hpp"
#include "fastinf/evaluation.hpp"
#include "fastinf/graph.hpp"
#include "fastinf/io.hpp"
#include "fastinf/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fastinf;

namespace {

struct Common {
  std::string dataset;
  std::string out;
  std::string lambda_ratios = "1,2,5,10";
  std::string times = "1..30,inf";
  std::uint32_t runs = 1000;
  std::uint64_t seed = 1;
  double top_fraction = 0.005;
  unsigned workers = 0;
  bool allow_large = false;
  bool string_ids = false;
};

constexpr std::size_t kLargeNodes = 50000;

ParseOptions parse_options(const Common& c) {
  ParseOptions p;
  p.numeric_ids = !c.string_ids;
  return p;
}

Graph load(const Common& c) {
  auto result = load_edge_list_file(c.dataset, parse_options(c));
  std::cerr << c.dataset << ": N=" << result.graph.node_count() << " L=" << result.graph.edge_count()
            << ", dropped " << result.report.duplicates_dropped << " duplicate and "
            << result.report.self_loops_dropped << " self-loop lines\n";
  return std::move(result.graph);
}

void check_size(const Graph& g, const Common& c) {
  const double cost = static_cast<double>(c.runs) * static_cast<double>(g.node_count());
  std::cerr << "estimated cost: " << cost << " SIR runs per lambda value\n";
  if (g.node_count() > kLargeNodes && !c.allow_large)
    throw std::runtime_error("graph has " + std::to_string(g.node_count()) + " nodes; pass --allow-large to proceed");
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_file_atomic(path, contents);
    std::cerr << "wrote " << path << "\n";
  }
}

std::vector<CentralityScores> all_scores(const Graph& g, const std::vector<Metric>& metrics, unsigned workers) {
  CentralityOptions opt;
  opt.workers = workers;
  std::vector<CentralityScores> out;
  for (auto m : metrics) out.push_back(compute_metric(g, m, opt));
  return out;
}

std::vector<Metric> parse_metrics(const std::string& list) {
  std::vector<Metric> out;
  if (list.empty() || list == "all") {
    out.assign(kRankingMetrics.begin(), kRankingMetrics.end());
    out.push_back(Metric::clustering);
    return out;
  }
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_metric(item));
  return out;
}

InfluenceSet simulate(const Graph& g, double ratio, const Common& c, std::uint32_t horizon, const fs::path& cache_dir) {
  const auto stats = degree_stats(g);
  if (!stats.epidemic_threshold) throw DegenerateThresholdError("epidemic threshold undefined for this graph");
  auto config = SimulationConfig::from_lambda_ratio(ratio, *stats.epidemic_threshold);
  config.runs = c.runs;
  config.horizon = horizon;
  config.master_seed = c.seed;
  InfluenceCache cache(cache_dir);
  bool hit = false;
  auto set = cached_influence_curves(g, config, &cache, c.workers, &hit);
  std::cerr << "lambda/lambda_c=" << format_number(ratio) << " beta=" << format_number(config.beta)
            << (hit ? " (cache hit)" : " (simulated)") << "\n";
  return set;
}

std::uint32_t horizon_of(const std::vector<std::uint32_t>& times) {
  std::uint32_t h = 1;
  for (auto t : times)
    if (t != kLateTime) h = std::max(h, t);
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastinf - fast and late-time influencer benchmark"};
  app.require_subcommand(1);
  Common c;
  std::string metrics_list, url, lockfile, sha, config_path, cache_dir;
  std::vector<std::string> inputs;

  auto add_dataset = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--dataset", c.dataset, "edge-list file");
    if (required) opt->required();
    sub->add_flag("--string-ids", c.string_ids, "treat node ids as opaque strings");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--lambda-ratios", c.lambda_ratios, "comma list of lambda/lambda_c");
    sub->add_option("--runs", c.runs, "Monte Carlo runs per seed node");
    sub->add_option("--seed", c.seed, "master RNG seed");
    sub->add_option("--workers", c.workers, "worker threads (0 = all cores)");
    sub->add_option("--cache", cache_dir, "influence cache directory");
    sub->add_flag("--allow-large", c.allow_large, "permit graphs above 50000 nodes");
  };

  auto* fetch = app.add_subcommand("fetch", "download a dataset and pin its sha256");
  fetch->add_option("--dataset", url, "dataset URL")->required();
  fetch->add_option("--out", c.out, "destination file")->required();
  fetch->add_option("--lockfile", lockfile, "lockfile (default: datasets.lock.json next to --out)");
  fetch->add_option("--sha256", sha, "expected sha256");

  auto* stats = app.add_subcommand("stats", "dataset summary row");
  add_dataset(stats);
  std::string name;
  stats->add_option("--name", name, "dataset name for the row");
  stats->add_option("--out", c.out, "output CSV (default stdout)");

  auto* centrality = app.add_subcommand("centrality", "compute centrality scores");
  add_dataset(centrality);
  centrality->add_option("--metrics", metrics_list, "comma list or 'all'");
  centrality->add_option("--workers", c.workers);
  centrality->add_option("--out", c.out, "output CSV (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo influence curves");
  add_dataset(sim);
  add_sim(sim);
  sim->add_option("--times", c.times, "recorded times, e.g. 1..30,inf");
  sim->add_option("--out", c.out, "output directory")->required();

  auto* eval = app.add_subcommand("evaluate", "correlation and precision grid");
  add_dataset(eval);
  add_sim(eval);
  eval->add_option("--times", c.times);
  eval->add_option("--top-fraction", c.top_fraction);
  eval->add_option("--metrics", metrics_list);
  eval->add_option("--out", c.out, "output CSV (default stdout)");

  auto* agg = app.add_subcommand("aggregate", "average normalized performance across datasets");
  agg->add_option("--input", inputs, "evaluation CSV files")->required();
  agg->add_option("--out", c.out, "output CSV (default stdout)");

  auto* report = app.add_subcommand("report", "SVG heatmaps from an evaluation CSV");
  report->add_option("--input", inputs, "evaluation CSV")->required();
  report->add_option("--out", c.out, "output directory")->required();

  auto* run = app.add_subcommand("run", "full chain from an experiment file");
  run->add_option("--config", config_path, "experiment JSON");
  add_dataset(run, false);
  add_sim(run);
  run->add_option("--times", c.times);
  run->add_option("--top-fraction", c.top_fraction);
  run->add_option("--out", c.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fetch) {
      fs::path dest = c.out;
      fs::path lock = lockfile.empty() ? dest.parent_path() / "datasets.lock.json" : fs::path(lockfile);
      auto r = fetch_dataset(url, dest, lock, sha.empty() ? std::nullopt : std::optional<std::string>(sha));
      std::cout << r.path.string() << " sha256=" << r.sha256 << (r.downloaded ? " (downloaded)" : " (up to date)")
                << "\n";
    } else if (*stats) {
      const auto g = load(c);
      emit(c.out, stats_csv_header() + "\n" + stats_csv_row(name.empty() ? fs::path(c.dataset).stem().string() : name,
                                                           degree_stats(g)) + "\n");
    } else if (*centrality) {
      const auto g = load(c);
      std::ostringstream out;
      write_scores_csv(g, all_scores(g, parse_metrics(metrics_list), c.workers), out);
      emit(c.out, out.str());
    } else if (*sim) {
      const auto g = load(c);
      check_size(g, c);
      const auto horizon = horizon_of(parse_time_list(c.times));
      const fs::path out = c.out;
      for (double ratio : parse_number_list(c.lambda_ratios)) {
        auto set = simulate(g, ratio, c, horizon, cache_dir.empty() ? out / "cache" : fs::path(cache_dir));
        std::ostringstream csv;
        write_influence_csv(g, set, csv);
        emit((out / ("influence_lambda" + format_number(ratio) + ".csv")).string(), csv.str());
      }
    } else if (*eval) {
      const auto g = load(c);
      check_size(g, c);
      const auto times = parse_time_list(c.times);
      const auto scores = all_scores(g, parse_metrics(metrics_list), c.workers);
      const fs::path cache = cache_dir.empty() ? fs::path("fastinf-cache") : fs::path(cache_dir);
      EvaluationGrid grid;
      const std::string ds = fs::path(c.dataset).stem().string();
      for (double ratio : parse_number_list(c.lambda_ratios)) {
        auto set = simulate(g, ratio, c, horizon_of(times), cache);
        auto cells = evaluate_metrics(scores, set, ratio, times, c.top_fraction, ds);
        grid.insert(grid.end(), cells.begin(), cells.end());
      }
      std::ostringstream out;
      write_evaluation_csv(grid, out);
      emit(c.out, out.str());
    } else if (*agg) {
      std::vector<EvaluationGrid> grids;
      for (const auto& in : inputs) {
        std::ifstream f(in);
        if (!f) throw std::runtime_error("cannot open " + in);
        grids.push_back(read_evaluation_csv(f));
      }
      std::ostringstream out;
      write_aggregate_csv(aggregate_datasets(grids), out);
      emit(c.out, out.str());
    } else if (*report) {
      const fs::path out = c.out;
      for (const auto& in : inputs) {
        std::ifstream f(in);
        if (!f) throw std::runtime_error("cannot open " + in);
        const auto grid = read_evaluation_csv(f);
        const std::string stem = fs::path(in).stem().string();
        emit((out / (stem + "_r.svg")).string(), emit_heatmap(grid, Channel::correlation, stem));
        emit((out / (stem + "_precision.svg")).string(), emit_heatmap(grid, Channel::precision, stem));
      }
    } else if (*run) {
      ExperimentSpec spec;
      if (!config_path.empty()) spec = load_experiment_spec(config_path);
      if (!c.dataset.empty()) {
        DatasetSpec ds;
        ds.name = fs::path(c.dataset).stem().string();
        ds.path = c.dataset;
        ds.parse = parse_options(c);
        spec.datasets.push_back(ds);
      }
      // Flags given on the command line override the file.
      if (run->count("--lambda-ratios")) spec.lambda_ratios = parse_number_list(c.lambda_ratios);
      if (run->count("--times")) spec.times = parse_time_list(c.times);
      if (run->count("--runs")) spec.runs = c.runs;
      if (run->count("--seed")) spec.master_seed = c.seed;
      if (run->count("--top-fraction")) spec.top_fraction = c.top_fraction;
      if (run->count("--workers")) spec.workers = c.workers;
      if (run->count("--out")) spec.output_dir = c.out;
      if (run->count("--cache")) spec.cache_dir = fs::path(cache_dir);
      if (c.allow_large) spec.allow_large = true;
      const auto summary = run_experiment(spec, &std::cerr);
      bool all_ok = true;
      for (const auto& d : summary.datasets) {
        std::cout << d.name << ": " << (d.ok ? "ok" : "FAILED - " + d.error) << "\n";
        all_ok = all_ok && d.ok;
      }
      std::cout << "manifest: " << summary.manifest.string() << "\n";
      return all_ok ? 0 : 2;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
