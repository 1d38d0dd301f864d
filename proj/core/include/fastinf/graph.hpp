#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fastinf {

using NodeId = std::uint32_t;

/// Raised by the edge-list reader. `line()` is 1-based; 0 means the error is
/// not tied to a particular line (e.g. empty input).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DegenerateThresholdError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Immutable undirected simple graph in compressed adjacency form.
///
/// Neighbor lists are sorted and duplicate free; there are no self-loops.
/// Node ids are dense (0..N-1); the label table maps them back to the ids
/// used in the source file.
class Graph {
public:
  Graph() = default;

  /// Builds a graph from an arbitrary edge list. Self-loops and duplicate
  /// (including reversed) edges are discarded. Empty `labels` means the
  /// decimal node index is used as label.
  static Graph from_edges(std::size_t node_count,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          std::vector<std::string> labels = {});

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const noexcept;

  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool operator==(const Graph&) const = default;

private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<std::string> labels_;
};

enum class Delimiter { whitespace_or_comma, whitespace, comma, tab };

struct ParseOptions {
  Delimiter delimiter = Delimiter::whitespace_or_comma;
  /// Any line whose first non-blank character is one of these is skipped.
  std::string comment_prefixes = "#%";
  /// Require integer node tokens. Otherwise tokens are opaque strings.
  bool numeric_ids = true;
  /// Ignore columns after the first two (weights, timestamps). When false a
  /// third column is a parse error.
  bool drop_extra_columns = true;
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t edges_read = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t self_loops_dropped = 0;
};

struct LoadResult {
  Graph graph;
  LoadReport report;
};

/// Reads an undirected edge list. Direction and extra columns are ignored;
/// duplicate edges are collapsed and self-loops removed.
///
/// Node ids are remapped to 0..N-1 in ascending order of the original id
/// (numeric order for numeric ids, lexicographic otherwise), so writing the
/// graph back with `write_edge_list` and reloading reproduces it exactly.
LoadResult load_edge_list(std::istream& in, const ParseOptions& options = {});
LoadResult load_edge_list_file(const std::string& path, const ParseOptions& options = {});

/// Writes "label_u label_v" per edge, one line each.
void write_edge_list(const Graph& g, std::ostream& out);

struct Components {
  std::vector<std::uint32_t> component_of;
  std::vector<std::size_t> sizes;
  std::size_t count() const noexcept { return sizes.size(); }
};

/// Component ids are assigned in order of each component's smallest node.
Components connected_components(const Graph& g);

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double mean_degree = 0.0;
  double mean_square_degree = 0.0;
  std::size_t component_count = 0;
  std::size_t giant_component_size = 0;
  /// Empty when the mean-field threshold is undefined (<k^2> <= <k>).
  std::optional<double> epidemic_threshold;
};

GraphStats degree_stats(const Graph& g);

/// Degree-based mean-field SIR threshold <k> / (<k^2> - <k>).
double epidemic_threshold(double mean_degree, double mean_square_degree);
double epidemic_threshold(const GraphStats& stats);

/// CSV header and row in the dataset-table layout:
/// dataset,N,L,mean_degree,mean_square_degree,lambda_c,components,giant_component
std::string stats_csv_header();
std::string stats_csv_row(const std::string& dataset, const GraphStats& stats);

}  // namespace fastinf
