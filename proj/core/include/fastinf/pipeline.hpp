#pragma once

#include "fastinf/centrality.hpp"
#include "fastinf/epidemic.hpp"
#include "fastinf/evaluation.hpp"
#include "fastinf/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastinf {

// ---------------------------------------------------------------- fetching

class FetchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct FetchResult {
  std::filesystem::path path;
  std::string sha256;
  bool downloaded = false;  ///< false when the local copy already matched
};

/// Downloads `url` (http, https or file) to `destination`.
///
/// The lockfile (JSON, created on first use) pins a sha256 per destination
/// file name. A matching local copy is a no-op; a download whose hash
/// disagrees with the pinned or `expected_sha256` value raises
/// IntegrityError and leaves nothing behind.
FetchResult fetch_dataset(const std::string& url, const std::filesystem::path& destination,
                          const std::filesystem::path& lockfile,
                          const std::optional<std::string>& expected_sha256 = std::nullopt);

// ---------------------------------------------------------------- reports

enum class Channel { correlation, precision };

/// Diverging red -> white -> blue color for a normalized value in [0, 1];
/// 0.5 maps to pure white. Values outside the range are clamped.
std::string heatmap_color(double normalized);

inline constexpr double kPrecisionFloor = 0.1;

/// SVG heatmap with one row per metric and one column per (lambda, t).
/// Precision columns in which no metric exceeds kPrecisionFloor are black;
/// missing cells are grey.
std::string emit_heatmap(const EvaluationGrid& grid, Channel channel, const std::string& title = {});

/// Hub scatter data: the top `top_fraction` nodes by degree with their
/// social capital, clustering, q(t) and rank by q(t) within the shown set.
/// `top_spreader` flags nodes among the `top_spreaders` best of the whole
/// network by q(t).
std::string emit_hub_scatter(const Graph& g, const CentralityScores& degree_scores,
                             const CentralityScores& social_capital_scores,
                             const CentralityScores& clustering_scores, const InfluenceSet& influence,
                             std::uint32_t t, double top_fraction = 0.05, std::size_t top_spreaders = 50);

/// Per-time dynamics summary: r(q(t), q(inf)), r(k, q(t)) and RG(t).
struct DynamicsRow {
  std::uint32_t t = 1;
  std::optional<double> r_late;
  std::optional<double> r_degree;
  double relative_gain = 0.0;
};

std::vector<DynamicsRow> dynamics_summary(const Graph& g, const InfluenceSet& influence, double fraction);

// ---------------------------------------------------------------- experiments

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::string url;
  std::optional<std::string> sha256;
  ParseOptions parse;
};

struct ExperimentSpec {
  std::vector<DatasetSpec> datasets;
  std::vector<double> lambda_ratios{1.0, 2.0, 5.0, 10.0};
  std::vector<std::uint32_t> times;  ///< ascending; kLateTime last. Empty = 1..30 + inf.
  std::vector<Metric> metrics;       ///< empty = all ten
  std::uint32_t runs = 1000;
  std::uint64_t master_seed = 1;
  double top_fraction = 0.005;
  double hub_fraction = 0.05;
  std::vector<std::uint32_t> hub_times{2, 5, kLateTime};
  int dsc_steps = 5;
  std::filesystem::path output_dir = "fastinf-out";
  std::optional<std::filesystem::path> cache_dir;  ///< default <output_dir>/cache
  unsigned workers = 0;
  bool allow_large = false;
  std::size_t large_node_threshold = 50000;

  /// Fills defaults and throws std::invalid_argument on inconsistent fields.
  void finalize();
  std::uint32_t horizon() const;
};

/// Reads a JSON experiment file. Relative dataset paths resolve against the
/// file's directory.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// "1..30,inf" style list.
std::vector<std::uint32_t> parse_time_list(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

struct DatasetOutcome {
  std::string name;
  bool ok = false;
  std::string error;
};

struct RunSummary {
  std::vector<DatasetOutcome> datasets;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::filesystem::path manifest;
};

/// Full chain per dataset: stats, scores, influence per lambda, evaluation,
/// dynamics, heatmaps, hub scatter; then the cross-dataset aggregate and a
/// manifest with content hashes. Progress goes to `log` when given.
RunSummary run_experiment(ExperimentSpec spec, std::ostream* log = nullptr);

}  // namespace fastinf
