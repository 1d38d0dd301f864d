#include "fastinf/generators.hpp"
#include "fastinf/io.hpp"
#include "fastinf/pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

using namespace fastinf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fastinf-pipeline-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

EvaluationCell cell(Metric m, double ratio, std::uint32_t t, std::optional<double> r, std::optional<double> p) {
  EvaluationCell c;
  c.dataset = "d";
  c.metric = m;
  c.lambda_ratio = ratio;
  c.t = t;
  c.r = r;
  c.precision = p;
  return c;
}

/// Fill colors of the cell rectangles keyed by (metric row, column index).
std::map<std::string, std::vector<std::string>> fills_by_row(const std::string& svg) {
  std::map<std::string, std::vector<std::string>> out;
  std::regex rect(R"re(<rect x="\d+" y="\d+" width="\d+" height="\d+" fill="(#[0-9a-f]{6})"><title>(\w+) t=)re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it)
    out[(*it)[2]].push_back((*it)[1]);
  return out;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  return files;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec;
  DatasetSpec ds;
  ds.name = "karate";
  ds.path = FASTINF_TEST_DATA "/karate.edges";
  spec.datasets.push_back(ds);
  spec.lambda_ratios = {1.0, 2.0};
  spec.times = parse_time_list("1..6,inf");
  spec.runs = 100;
  spec.output_dir = out;
  spec.workers = 2;
  return spec;
}

}  // namespace

TEST(HeatmapColor, Scale) {
  EXPECT_EQ(heatmap_color(0.5), "#ffffff");
  EXPECT_EQ(heatmap_color(0.0), "#67001f");
  EXPECT_EQ(heatmap_color(1.0), "#053061");
  EXPECT_EQ(heatmap_color(2.0), heatmap_color(1.0));
  EXPECT_EQ(heatmap_color(-1.0), heatmap_color(0.0));
}

TEST(Heatmap, BestRowBlueAndBlackPrecisionColumn) {
  EvaluationGrid grid;
  for (std::uint32_t t : {1u, 2u, kLateTime}) {
    // precision never exceeds 0.1 at t = 2
    const double p_best = t == 2 ? 0.1 : 0.8;
    grid.push_back(cell(Metric::social_capital, 1.0, t, 0.9, p_best));
    grid.push_back(cell(Metric::degree, 1.0, t, 0.45, p_best / 2));
  }
  grid.push_back(cell(Metric::closeness, 1.0, 1, std::nullopt, std::nullopt));
  normalize_grid(grid);

  auto r = fills_by_row(emit_heatmap(grid, Channel::correlation));
  EXPECT_EQ(r["social_capital"], (std::vector<std::string>(3, "#053061")));
  EXPECT_EQ(r["degree"], (std::vector<std::string>(3, "#ffffff")));
  EXPECT_EQ(r["closeness"], (std::vector<std::string>{"#bdbdbd", "#bdbdbd", "#bdbdbd"}));

  auto p = fills_by_row(emit_heatmap(grid, Channel::precision));
  // columns are ordered t = 1, 2, inf
  for (const auto& row : {"social_capital", "degree", "closeness"}) EXPECT_EQ(p[row][1], "#000000") << row;
  EXPECT_EQ(p["social_capital"][0], "#053061");
  EXPECT_EQ(p["degree"][2], "#ffffff");
}

TEST(Heatmap, EmptyGridRejected) { EXPECT_THROW(emit_heatmap({}, Channel::correlation), std::invalid_argument); }

TEST(HubScatter, RowsAndRanks) {
  auto g = barabasi_albert(100, 2, 3);
  SimulationConfig c;
  c.beta = 0.2;
  c.runs = 50;
  c.horizon = 5;
  auto influence = influence_curves(g, c, {}, 1);
  auto csv = emit_hub_scatter(g, degree(g), social_capital(g), clustering_coefficient(g), influence, 2);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "node_label,degree,social_capital,clustering,q,influence_rank,top_spreader");
  std::vector<int> ranks;
  std::vector<double> degrees;
  while (std::getline(in, line)) {
    auto f = split_csv_record(line);
    ASSERT_EQ(f.size(), 7u);
    degrees.push_back(std::stod(f[1]));
    ranks.push_back(std::stoi(f[5]));
    EXPECT_TRUE(f[6] == "0" || f[6] == "1");
  }
  ASSERT_EQ(ranks.size(), 5u);
  std::sort(ranks.begin(), ranks.end());
  EXPECT_EQ(ranks, (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_TRUE(std::is_sorted(degrees.rbegin(), degrees.rend()));
}

TEST(Dynamics, SummaryRows) {
  auto g = barabasi_albert(80, 2, 5);
  SimulationConfig c;
  c.beta = 0.3;
  c.runs = 40;
  c.horizon = 4;
  auto rows = dynamics_summary(g, influence_curves(g, c, {}, 1), 0.05);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows.back().t, kLateTime);
  EXPECT_NEAR(*rows.back().r_late, 1.0, 1e-12);
  for (const auto& row : rows) EXPECT_GE(row.relative_gain, 0.0);
}

TEST(Fetch, FileUrlPinsAndReuses) {
  auto dir = scratch("fetch");
  const std::string url = "file://" + fs::absolute(FASTINF_TEST_DATA "/karate.edges").string();
  const auto lock = dir / "lock.json";
  auto first = fetch_dataset(url, dir / "karate.edges", lock);
  EXPECT_TRUE(first.downloaded);
  EXPECT_EQ(first.sha256, sha256_file(FASTINF_TEST_DATA "/karate.edges"));
  EXPECT_EQ(load_edge_list_file(first.path).graph.node_count(), 34u);

  auto again = fetch_dataset(url, dir / "karate.edges", lock);
  EXPECT_FALSE(again.downloaded);
  EXPECT_EQ(again.sha256, first.sha256);

  // pinned hash disagrees with the content
  EXPECT_THROW(fetch_dataset(url, dir / "other.edges", lock, std::string(64, '0')), IntegrityError);
  EXPECT_FALSE(fs::exists(dir / "other.edges"));
  EXPECT_FALSE(fs::exists(dir / "other.edges.part"));
  fs::remove_all(dir);
}

TEST(Fetch, UnreachableHost) {
  auto dir = scratch("unreachable");
  EXPECT_THROW(fetch_dataset("http://fastinf.invalid/none.txt", dir / "x", dir / "lock.json"), FetchError);
  EXPECT_THROW(fetch_dataset("file:///nonexistent/fastinf/none.txt", dir / "y", dir / "lock.json"), FetchError);
  fs::remove_all(dir);
}

TEST(Parsing, TimeAndNumberLists) {
  auto t = parse_time_list("1..3,5,inf");
  EXPECT_EQ(t, (std::vector<std::uint32_t>{1, 2, 3, 5, kLateTime}));
  EXPECT_EQ(parse_number_list("1, 2.5,10"), (std::vector<double>{1.0, 2.5, 10.0}));
  EXPECT_THROW(parse_time_list("3..1"), std::invalid_argument);
  EXPECT_THROW(parse_number_list("1,,x"), std::invalid_argument);
}

TEST(Experiment, JsonSpec) {
  auto dir = scratch("json");
  fs::copy_file(FASTINF_TEST_DATA "/lesmis.edges", dir / "lesmis.edges");
  std::ofstream(dir / "exp.json") << R"({
    "datasets": [{"name": "lesmis", "path": "lesmis.edges", "numeric_ids": false}],
    "lambda_ratios": [1, 5],
    "times": "1..4,inf",
    "runs": 20,
    "seed": 3,
    "metrics": ["degree", "k_core"],
    "out": "out"
  })";
  auto spec = load_experiment_spec(dir / "exp.json");
  ASSERT_EQ(spec.datasets.size(), 1u);
  EXPECT_EQ(spec.datasets[0].path, dir / "lesmis.edges");
  EXPECT_FALSE(spec.datasets[0].parse.numeric_ids);
  EXPECT_EQ(spec.lambda_ratios, (std::vector<double>{1.0, 5.0}));
  EXPECT_EQ(spec.times.back(), kLateTime);
  EXPECT_EQ(spec.runs, 20u);
  EXPECT_EQ(spec.master_seed, 3u);
  EXPECT_EQ(spec.metrics, (std::vector<Metric>{Metric::degree, Metric::k_core}));
  EXPECT_EQ(spec.output_dir, dir / "out");
  fs::remove_all(dir);
}

TEST(Experiment, SmokeBundleAndByteIdenticalRerun) {
  auto dir = scratch("smoke");
  auto summary = run_experiment(small_spec(dir / "out"));
  ASSERT_EQ(summary.datasets.size(), 1u);
  ASSERT_TRUE(summary.datasets[0].ok) << summary.datasets[0].error;
  EXPECT_EQ(summary.cache_misses, 2u);
  for (const char* f : {"manifest.json", "datasets.csv", "aggregate.csv", "aggregate_r.svg", "aggregate_precision.svg",
                        "karate/stats.csv", "karate/scores.csv", "karate/influence_lambda1.csv",
                        "karate/influence_lambda2.csv", "karate/evaluation.csv", "karate/dynamics.csv",
                        "karate/heatmap_r.svg", "karate/heatmap_precision.svg", "karate/hub_scatter_lambda1_tinf.csv"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;

  const auto before = read_tree(dir / "out");
  auto rerun = run_experiment(small_spec(dir / "out"));
  EXPECT_EQ(rerun.cache_hits, 2u);
  EXPECT_EQ(rerun.cache_misses, 0u);
  EXPECT_EQ(read_tree(dir / "out"), before);

  // a fresh directory (no cache) reproduces the same bundle
  auto fresh = small_spec(dir / "fresh");
  fresh.workers = 1;
  run_experiment(fresh);
  auto a = before, b = read_tree(dir / "fresh");
  std::erase_if(a, [](const auto& kv) { return kv.first.starts_with("cache"); });
  std::erase_if(b, [](const auto& kv) { return kv.first.starts_with("cache"); });
  EXPECT_EQ(a, b);
  fs::remove_all(dir);
}

TEST(Experiment, OversizedBetaRecordedPerDataset) {
  auto dir = scratch("beta");
  auto spec = small_spec(dir / "out");
  DatasetSpec lesmis;
  lesmis.name = "lesmis";
  lesmis.path = FASTINF_TEST_DATA "/lesmis.edges";
  lesmis.parse.numeric_ids = false;
  spec.datasets.push_back(lesmis);
  // karate has lambda_c ~ 0.148, so ratio 10 gives beta > 1; lesmis has ~ 0.090
  spec.lambda_ratios = {1.0, 10.0};
  auto summary = run_experiment(spec);
  ASSERT_EQ(summary.datasets.size(), 2u);
  EXPECT_FALSE(summary.datasets[0].ok);
  EXPECT_NE(summary.datasets[0].error.find("beta"), std::string::npos);
  EXPECT_TRUE(summary.datasets[1].ok) << summary.datasets[1].error;
  EXPECT_FALSE(fs::exists(dir / "out" / "karate" / "stats.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "lesmis" / "evaluation.csv"));
  fs::remove_all(dir);
}
