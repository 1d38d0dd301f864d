#pragma once

#include "fastinf/graph.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fastinf {

enum class Metric {
  degree,
  social_capital,
  h_index,
  local_rank,
  dynamics_sensitive,
  k_core,
  eigenvector,
  betweenness,
  closeness,
  clustering,
};

/// The nine ranking metrics. Clustering is computed for the hub report only.
inline constexpr std::array<Metric, 9> kRankingMetrics = {
    Metric::degree,     Metric::social_capital, Metric::h_index,
    Metric::local_rank, Metric::dynamics_sensitive, Metric::k_core,
    Metric::eigenvector, Metric::betweenness,   Metric::closeness,
};

std::string_view metric_name(Metric m);
/// Inverse of metric_name; throws std::invalid_argument on unknown names.
Metric parse_metric(std::string_view name);

class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct DscParams {
  double beta = 0.0;
  double mu = 1.0;
  int steps = 5;
};

struct EigenvectorParams {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

struct CentralityScores {
  Metric metric = Metric::degree;
  std::optional<DscParams> dsc;
  std::optional<EigenvectorParams> eigen;
  /// Power-iteration diagnostics; always true for non-iterative metrics.
  bool converged = true;
  int iterations = 0;
  std::vector<double> scores;

  /// "beta=...;mu=...;t=..." style description for CSV export.
  std::string parameter_string() const;
};

CentralityScores degree(const Graph& g);

/// k_i plus the sum of the neighbors' degrees.
CentralityScores social_capital(const Graph& g);

CentralityScores h_index(const Graph& g);

/// L_i = sum_{j in N(i)} sum_{l in N(j)} n_l, with n_l the number of nodes
/// at distance 1 or 2 from l (l itself excluded).
CentralityScores local_rank(const Graph& g, unsigned workers = 0);

/// Dynamics-sensitive centrality: s = sum_{m=0..t} beta A H^m e with
/// H = beta A + (1 - mu) I, evaluated by repeated sparse products.
CentralityScores dynamics_sensitive(const Graph& g, const DscParams& params);

/// Coreness by iterative pruning (bucket algorithm, O(L)).
CentralityScores k_core(const Graph& g);

/// Leading eigenvector of A, unit Euclidean norm, non-negative.
///
/// Iterates x <- (A + I) x from the uniform vector. The shift leaves the
/// eigenvectors unchanged and makes the Perron root strictly dominant in
/// modulus, so bipartite graphs (trees, stars) converge instead of
/// oscillating. On disconnected graphs mass concentrates on the component
/// with the largest eigenvalue. Throws if the graph has no edges.
CentralityScores eigenvector(const Graph& g, const EigenvectorParams& params = {});

/// Brandes accumulation; each unordered (s, t) pair counted once.
CentralityScores betweenness(const Graph& g, unsigned workers = 0);

/// Component-aware closeness: (|G_i|-1)/(N-1) / d_i with d_i the mean
/// distance to the other nodes of i's component; isolated nodes score 0.
CentralityScores closeness(const Graph& g, unsigned workers = 0);

/// Local clustering coefficient; 0 for degree < 2.
CentralityScores clustering_coefficient(const Graph& g);

struct CentralityOptions {
  /// DSC beta; defaults to the graph's epidemic threshold.
  std::optional<double> dsc_beta;
  double dsc_mu = 1.0;
  int dsc_steps = 5;
  EigenvectorParams eigen;
  unsigned workers = 0;
};

CentralityScores compute_metric(const Graph& g, Metric m, const CentralityOptions& options = {});

/// CSV with columns node_label,metric,score,parameters.
void write_scores_csv(const Graph& g, const std::vector<CentralityScores>& sets, std::ostream& out);

}  // namespace fastinf
