#include "fastinf/io.hpp"
#include "fastinf/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <sstream>

namespace fastinf {

namespace {

using json = nlohmann::json;

std::string trim_copy(std::string s) {
  const auto blank = " \t\r\n";
  const auto b = s.find_first_not_of(blank);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(blank) - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim_copy(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::uint32_t parse_step(const std::string& s) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
    throw std::invalid_argument("bad time step '" + s + "'");
  return v;
}

}  // namespace

std::vector<std::uint32_t> parse_time_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  for (const auto& part : split(text, ',')) {
    if (part == "inf") {
      out.push_back(kLateTime);
    } else if (auto dots = part.find(".."); dots != std::string::npos) {
      const auto lo = parse_step(part.substr(0, dots));
      const auto hi = parse_step(part.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty time range '" + part + "'");
      for (auto t = lo; t <= hi; ++t) out.push_back(t);
    } else {
      out.push_back(parse_step(part));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    std::size_t used = 0;
    const double v = std::stod(part, &used);
    if (used != part.size()) throw std::invalid_argument("bad number '" + part + "'");
    out.push_back(v);
  }
  return out;
}

void ExperimentSpec::finalize() {
  if (datasets.empty()) throw std::invalid_argument("experiment: no datasets");
  for (const auto& d : datasets) {
    if (d.name.empty()) throw std::invalid_argument("experiment: dataset without a name");
    if (d.path.empty() && d.url.empty())
      throw std::invalid_argument("experiment: dataset '" + d.name + "' has neither path nor url");
  }
  if (lambda_ratios.empty()) throw std::invalid_argument("experiment: no lambda ratios");
  for (double r : lambda_ratios)
    if (!(r > 0.0)) throw std::invalid_argument("experiment: lambda ratios must be positive");
  if (times.empty()) {
    for (std::uint32_t t = 1; t <= 30; ++t) times.push_back(t);
    times.push_back(kLateTime);
  }
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("experiment: times must be ascending");
  if (metrics.empty()) {
    metrics.assign(kRankingMetrics.begin(), kRankingMetrics.end());
    metrics.push_back(Metric::clustering);
  }
  if (runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw std::invalid_argument("experiment: top fraction outside (0, 1]");
  if (!(hub_fraction > 0.0 && hub_fraction <= 1.0)) throw std::invalid_argument("experiment: hub fraction outside (0, 1]");
  if (!cache_dir) cache_dir = output_dir / "cache";
}

std::uint32_t ExperimentSpec::horizon() const {
  std::uint32_t h = 1;
  for (auto t : times)
    if (t != kLateTime) h = std::max(h, t);
  for (auto t : hub_times)
    if (t != kLateTime) h = std::max(h, t);
  return h;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  const json j = json::parse(read_file(path));
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  ExperimentSpec spec;
  for (const auto& d : j.at("datasets")) {
    DatasetSpec ds;
    ds.name = d.at("name").get<std::string>();
    if (d.contains("path")) {
      std::filesystem::path p = d["path"].get<std::string>();
      ds.path = p.is_absolute() ? p : base / p;
    }
    ds.url = d.value("url", "");
    if (d.contains("sha256")) ds.sha256 = d["sha256"].get<std::string>();
    if (d.contains("numeric_ids")) ds.parse.numeric_ids = d["numeric_ids"].get<bool>();
    if (d.contains("comment_prefixes")) ds.parse.comment_prefixes = d["comment_prefixes"].get<std::string>();
    spec.datasets.push_back(std::move(ds));
  }
  if (j.contains("lambda_ratios")) {
    const auto& v = j["lambda_ratios"];
    spec.lambda_ratios = v.is_string() ? parse_number_list(v.get<std::string>()) : v.get<std::vector<double>>();
  }
  if (j.contains("times")) {
    const auto& v = j["times"];
    if (v.is_string()) {
      spec.times = parse_time_list(v.get<std::string>());
    } else {
      std::string joined;
      for (const auto& t : v) joined += (t.is_string() ? t.get<std::string>() : std::to_string(t.get<std::uint32_t>())) + ",";
      spec.times = parse_time_list(joined);
    }
  }
  if (j.contains("metrics"))
    for (const auto& m : j["metrics"]) spec.metrics.push_back(parse_metric(m.get<std::string>()));
  spec.runs = j.value("runs", spec.runs);
  spec.master_seed = j.value("seed", spec.master_seed);
  spec.top_fraction = j.value("top_fraction", spec.top_fraction);
  spec.hub_fraction = j.value("hub_fraction", spec.hub_fraction);
  spec.dsc_steps = j.value("dsc_steps", spec.dsc_steps);
  spec.workers = j.value("workers", spec.workers);
  spec.allow_large = j.value("allow_large", spec.allow_large);
  if (j.contains("out")) {
    std::filesystem::path out = j["out"].get<std::string>();
    spec.output_dir = out.is_absolute() ? out : base / out;
  }
  if (j.contains("cache_dir")) {
    std::filesystem::path c = j["cache_dir"].get<std::string>();
    spec.cache_dir = c.is_absolute() ? c : base / c;
  }
  return spec;
}

namespace {

class BundleWriter {
public:
  explicit BundleWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::filesystem::path& relative, const std::string& contents) {
    write_file_atomic(root_ / relative, contents);
    artifacts_[relative.generic_string()] = sha256_hex(contents);
  }
  const std::map<std::string, std::string>& artifacts() const { return artifacts_; }
  const std::filesystem::path& root() const { return root_; }

private:
  std::filesystem::path root_;
  std::map<std::string, std::string> artifacts_;
};

std::string lambda_tag(double ratio) { return "lambda" + format_number(ratio); }

void process_dataset(const ExperimentSpec& spec, const DatasetSpec& ds, BundleWriter& bundle,
                     const InfluenceCache& cache, RunSummary& summary, std::vector<EvaluationGrid>& grids,
                     std::string& stats_rows, std::ostream* log) {
  std::filesystem::path source = ds.path;
  if (source.empty()) {
    const auto data_dir = spec.output_dir / "data";
    auto fetched = fetch_dataset(ds.url, data_dir / ds.name, data_dir / "datasets.lock.json", ds.sha256);
    source = fetched.path;
  } else if (ds.sha256 && sha256_file(source) != *ds.sha256) {
    throw IntegrityError("dataset '" + ds.name + "': sha256 mismatch for " + source.string());
  }

  auto loaded = load_edge_list_file(source.string(), ds.parse);
  const Graph& g = loaded.graph;
  const std::size_t n = g.node_count();
  if (log)
    *log << ds.name << ": N=" << n << " L=" << g.edge_count() << " (dropped " << loaded.report.duplicates_dropped
         << " duplicates, " << loaded.report.self_loops_dropped << " self-loops); estimated cost "
         << static_cast<double>(spec.runs) * static_cast<double>(n) << " runs per lambda\n";
  if (n > spec.large_node_threshold && !spec.allow_large)
    throw std::runtime_error("dataset '" + ds.name + "' has " + std::to_string(n) +
                             " nodes; rerun with --allow-large");

  const auto stats = degree_stats(g);
  if (!stats.epidemic_threshold)
    throw DegenerateThresholdError("dataset '" + ds.name + "': epidemic threshold undefined");
  const double lambda_c = *stats.epidemic_threshold;
  // Validate every lambda before any expensive work.
  for (double ratio : spec.lambda_ratios) SimulationConfig::from_lambda_ratio(ratio, lambda_c);

  const std::filesystem::path dir = ds.name;
  const std::string stats_row = stats_csv_row(ds.name, stats);
  bundle.write(dir / "stats.csv", stats_csv_header() + "\n" + stats_row + "\n");

  CentralityOptions copt;
  copt.dsc_beta = lambda_c;
  copt.dsc_steps = spec.dsc_steps;
  copt.workers = spec.workers;
  std::vector<CentralityScores> scores;
  for (Metric m : spec.metrics) scores.push_back(compute_metric(g, m, copt));
  {
    std::ostringstream out;
    write_scores_csv(g, scores, out);
    bundle.write(dir / "scores.csv", out.str());
  }
  auto find_or_compute = [&](Metric m) {
    for (const auto& s : scores)
      if (s.metric == m) return s;
    return compute_metric(g, m, copt);
  };
  const auto deg = find_or_compute(Metric::degree);
  const auto sc = find_or_compute(Metric::social_capital);
  const auto cc = find_or_compute(Metric::clustering);

  EvaluationGrid grid;
  std::ostringstream dynamics;
  dynamics << "lambda_ratio,t,r_q_late,r_degree,relative_gain\n";
  for (double ratio : spec.lambda_ratios) {
    auto config = SimulationConfig::from_lambda_ratio(ratio, lambda_c);
    config.runs = spec.runs;
    config.horizon = spec.horizon();
    config.master_seed = spec.master_seed;
    bool hit = false;
    auto influence = cached_influence_curves(g, config, &cache, spec.workers, &hit);
    ++(hit ? summary.cache_hits : summary.cache_misses);
    if (log) *log << ds.name << ": lambda/lambda_c=" << format_number(ratio) << (hit ? " (cached)" : "") << "\n";

    std::ostringstream inf_csv;
    write_influence_csv(g, influence, inf_csv);
    bundle.write(dir / ("influence_" + lambda_tag(ratio) + ".csv"), inf_csv.str());

    auto cells = evaluate_metrics(scores, influence, ratio, spec.times, spec.top_fraction, ds.name);
    grid.insert(grid.end(), cells.begin(), cells.end());

    for (const auto& row : dynamics_summary(g, influence, spec.top_fraction)) {
      auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
      dynamics << format_number(ratio) << ',' << time_label(row.t) << ',' << opt(row.r_late) << ','
               << opt(row.r_degree) << ',' << format_number(row.relative_gain) << '\n';
    }
    for (auto t : spec.hub_times) {
      bundle.write(dir / ("hub_scatter_" + lambda_tag(ratio) + "_t" + time_label(t) + ".csv"),
                   emit_hub_scatter(g, deg, sc, cc, influence, t, spec.hub_fraction));
    }
  }
  bundle.write(dir / "dynamics.csv", dynamics.str());
  {
    std::ostringstream out;
    write_evaluation_csv(grid, out);
    bundle.write(dir / "evaluation.csv", out.str());
  }
  bundle.write(dir / "heatmap_r.svg", emit_heatmap(grid, Channel::correlation, ds.name));
  bundle.write(dir / "heatmap_precision.svg", emit_heatmap(grid, Channel::precision, ds.name));

  stats_rows += stats_row + "\n";
  grids.push_back(std::move(grid));
}

}  // namespace

RunSummary run_experiment(ExperimentSpec spec, std::ostream* log) {
  spec.finalize();
  std::filesystem::create_directories(spec.output_dir);
  BundleWriter bundle(spec.output_dir);
  InfluenceCache cache(*spec.cache_dir);
  RunSummary summary;
  std::vector<EvaluationGrid> grids;
  std::string stats_rows;

  for (const auto& ds : spec.datasets) {
    DatasetOutcome outcome;
    outcome.name = ds.name;
    try {
      process_dataset(spec, ds, bundle, cache, summary, grids, stats_rows, log);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
      if (log) *log << ds.name << ": FAILED: " << e.what() << "\n";
    }
    summary.datasets.push_back(std::move(outcome));
  }

  bundle.write("datasets.csv", stats_csv_header() + "\n" + stats_rows);
  if (!grids.empty()) {
    const auto aggregate = aggregate_datasets(grids);
    std::ostringstream out;
    write_aggregate_csv(aggregate, out);
    bundle.write("aggregate.csv", out.str());
    const auto agg_grid = aggregate_as_grid(aggregate);
    bundle.write("aggregate_r.svg", emit_heatmap(agg_grid, Channel::correlation, "aggregate"));
    bundle.write("aggregate_precision.svg", emit_heatmap(agg_grid, Channel::precision, "aggregate"));
  }

  json manifest;
  manifest["engine"] = std::string(kEngineVersion);
  manifest["rng"] = std::string(kRngName);
  manifest["runs"] = spec.runs;
  manifest["seed"] = spec.master_seed;
  manifest["lambda_ratios"] = spec.lambda_ratios;
  std::vector<std::string> times;
  for (auto t : spec.times) times.push_back(time_label(t));
  manifest["times"] = times;
  manifest["top_fraction"] = spec.top_fraction;
  json datasets = json::array();
  for (const auto& d : summary.datasets) {
    json entry{{"name", d.name}, {"ok", d.ok}};
    if (!d.ok) entry["error"] = d.error;
    datasets.push_back(entry);
  }
  manifest["datasets"] = datasets;
  manifest["artifacts"] = bundle.artifacts();
  summary.manifest = spec.output_dir / "manifest.json";
  write_file_atomic(summary.manifest, manifest.dump(2) + "\n");
  if (log)
    *log << "cache: " << summary.cache_hits << " hits, " << summary.cache_misses << " misses\n";
  return summary;
}

}  // namespace fastinf
