#pragma once

#include "fastinf/centrality.hpp"
#include "fastinf/epidemic.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fastinf {

/// Pearson product-moment correlation. Empty when either vector is constant
/// (the correlation is undefined; callers report a missing cell). Throws
/// std::invalid_argument on length mismatch or fewer than two points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// max(1, round(fraction * n)).
std::size_t top_count(std::size_t n, double fraction);

/// Indices of the k largest scores; ties broken by ascending index.
std::vector<NodeId> top_k(std::span<const double> scores, std::size_t k);

/// |top_k(scores) ∩ top_k(truth)| / k with k = top_count(N, fraction).
double precision_at(std::span<const double> scores, std::span<const double> truth, double fraction);

/// RG(t) = (Q(t|t) - Q(t|inf)) / Q(t|inf), where Q(t|x) is the mean q(t)
/// over the top-`fraction` nodes ranked by q(x).
double relative_gain(std::span<const double> q_t, std::span<const double> q_inf, double fraction = 0.005);
double relative_gain(const InfluenceSet& set, std::uint32_t t, double fraction = 0.005);

struct EvaluationCell {
  std::string dataset;
  Metric metric = Metric::degree;
  double lambda_ratio = 1.0;
  std::uint32_t t = 1;  ///< kLateTime for t = infinity
  std::optional<double> r;
  std::optional<double> precision;
  std::optional<double> normalized_r;
  std::optional<double> normalized_precision;
};

using EvaluationGrid = std::vector<EvaluationCell>;

/// Scores every metric against q(t) for each requested time, then divides
/// each cell by the best metric's value within the same (lambda, t) slice.
/// Undefined correlations stay empty and are skipped when picking the best.
EvaluationGrid evaluate_metrics(const std::vector<CentralityScores>& score_sets, const InfluenceSet& influence,
                                double lambda_ratio, std::span<const std::uint32_t> times,
                                double fraction = 0.005, const std::string& dataset = {});

/// Divides r and precision by the per-(dataset, lambda, t) best value.
void normalize_grid(EvaluationGrid& grid);

/// Mean normalized r / precision per (metric, lambda, t) across datasets.
/// Datasets lacking a value for a cell are left out of that cell's mean.
struct AggregateCell {
  Metric metric = Metric::degree;
  double lambda_ratio = 1.0;
  std::uint32_t t = 1;
  std::optional<double> mean_normalized_r;
  std::optional<double> mean_normalized_precision;
  std::size_t datasets_r = 0;
  std::size_t datasets_precision = 0;
};

std::vector<AggregateCell> aggregate_datasets(std::span<const EvaluationGrid> grids);

std::string time_label(std::uint32_t t);
std::uint32_t parse_time_label(const std::string& label);

/// dataset,metric,lambda_ratio,t,r,precision,normalized_r,normalized_precision
void write_evaluation_csv(const EvaluationGrid& grid, std::ostream& out);
EvaluationGrid read_evaluation_csv(std::istream& in);

/// metric,lambda_ratio,t,mean_normalized_r,mean_normalized_precision,datasets_r,datasets_precision
void write_aggregate_csv(const std::vector<AggregateCell>& cells, std::ostream& out);

/// Aggregate cells re-expressed as a grid (dataset "aggregate") for heatmaps.
EvaluationGrid aggregate_as_grid(const std::vector<AggregateCell>& cells);

}  // namespace fastinf
