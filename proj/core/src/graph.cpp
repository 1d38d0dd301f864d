#include "fastinf/graph.hpp"

#include "fastinf/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace fastinf {

Graph Graph::from_edges(std::size_t node_count,
                        std::span<const std::pair<NodeId, NodeId>> edges,
                        std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != node_count)
    throw std::invalid_argument("Graph::from_edges: label count does not match node count");

  std::vector<std::pair<NodeId, NodeId>> canonical;
  canonical.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count)
      throw std::out_of_range("Graph::from_edges: node id out of range");
    if (u == v) continue;
    canonical.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

  Graph g;
  g.offsets_.assign(node_count + 1, 0);
  for (auto [u, v] : canonical) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(2 * canonical.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : canonical) g.neighbors_[cursor[u]++] = v;
  for (auto [u, v] : canonical) g.neighbors_[cursor[v]++] = u;
  for (std::size_t i = 0; i < node_count; ++i)
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));

  if (labels.empty()) {
    labels.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) labels.push_back(std::to_string(i));
  }
  g.labels_ = std::move(labels);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

namespace {

bool is_separator(char c, Delimiter d) {
  switch (d) {
    case Delimiter::whitespace: return c == ' ' || c == '\t' || c == '\r';
    case Delimiter::comma: return c == ',';
    case Delimiter::tab: return c == '\t';
    case Delimiter::whitespace_or_comma: return c == ' ' || c == '\t' || c == '\r' || c == ',';
  }
  return false;
}

std::string_view trim(std::string_view s) {
  const auto blank = " \t\r";
  auto b = s.find_first_not_of(blank);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(blank);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> tokenize(std::string_view line, Delimiter d) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  const bool collapse = d == Delimiter::whitespace || d == Delimiter::whitespace_or_comma;
  while (i <= line.size()) {
    if (collapse) {
      while (i < line.size() && is_separator(line[i], d)) ++i;
      if (i == line.size()) break;
    }
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j], d)) ++j;
    tokens.push_back(trim(line.substr(i, j - i)));
    if (j == line.size()) break;
    i = j + 1;
  }
  return tokens;
}

template <class Key>
std::vector<NodeId> remap(std::vector<Key>& keys_in_order, std::vector<Key>& unique_keys) {
  unique_keys = keys_in_order;
  std::sort(unique_keys.begin(), unique_keys.end());
  unique_keys.erase(std::unique(unique_keys.begin(), unique_keys.end()), unique_keys.end());
  std::vector<NodeId> ids;
  ids.reserve(keys_in_order.size());
  for (const auto& k : keys_in_order) {
    auto it = std::lower_bound(unique_keys.begin(), unique_keys.end(), k);
    ids.push_back(static_cast<NodeId>(it - unique_keys.begin()));
  }
  return ids;
}

}  // namespace

LoadResult load_edge_list(std::istream& in, const ParseOptions& options) {
  LoadResult result;
  LoadReport& report = result.report;

  std::vector<std::int64_t> numeric_endpoints;
  std::vector<std::string> string_endpoints;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (options.comment_prefixes.find(line.front()) != std::string::npos) continue;
    ++report.lines_read;

    auto tokens = tokenize(line, options.delimiter);
    if (tokens.size() < 2 || tokens[0].empty() || tokens[1].empty())
      throw ParseError("line " + std::to_string(line_no) + ": expected two node ids", line_no);
    if (tokens.size() > 2 && !options.drop_extra_columns)
      throw ParseError("line " + std::to_string(line_no) + ": unexpected extra columns", line_no);

    for (int k = 0; k < 2; ++k) {
      auto tok = tokens[static_cast<std::size_t>(k)];
      if (options.numeric_ids) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
          throw ParseError("line " + std::to_string(line_no) + ": non-numeric node id '" +
                               std::string(tok) + "'",
                           line_no);
        numeric_endpoints.push_back(value);
      } else {
        string_endpoints.emplace_back(tok);
      }
    }
    ++report.edges_read;
  }
  if (report.edges_read == 0) throw ParseError("empty edge list", 0);

  std::vector<NodeId> ids;
  std::vector<std::string> labels;
  if (options.numeric_ids) {
    std::vector<std::int64_t> unique_ids;
    ids = remap(numeric_endpoints, unique_ids);
    labels.reserve(unique_ids.size());
    for (auto v : unique_ids) labels.push_back(std::to_string(v));
  } else {
    ids = remap(string_endpoints, labels);
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(ids.size() / 2);
  for (std::size_t e = 0; e + 1 < ids.size(); e += 2) {
    NodeId u = ids[e], v = ids[e + 1];
    if (u == v) {
      ++report.self_loops_dropped;
      continue;
    }
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  const std::size_t node_count = labels.size();
  const std::size_t kept = edges.size();
  result.graph = Graph::from_edges(node_count, edges, std::move(labels));
  report.duplicates_dropped = kept - result.graph.edge_count();
  return result;
}

LoadResult load_edge_list_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path);
  return load_edge_list(in, options);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

Components connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  constexpr auto unassigned = static_cast<std::uint32_t>(-1);
  Components c;
  c.component_of.assign(n, unassigned);
  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (c.component_of[root] != unassigned) continue;
    const auto id = static_cast<std::uint32_t>(c.sizes.size());
    std::size_t size = 0;
    c.component_of[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId w : g.neighbors(v)) {
        if (c.component_of[w] == unassigned) {
          c.component_of[w] = id;
          stack.push_back(w);
        }
      }
    }
    c.sizes.push_back(size);
  }
  return c;
}

double epidemic_threshold(double mean_degree, double mean_square_degree) {
  const double denom = mean_square_degree - mean_degree;
  if (!(denom > 0.0))
    throw DegenerateThresholdError("epidemic threshold undefined: <k^2> <= <k>");
  return mean_degree / denom;
}

double epidemic_threshold(const GraphStats& stats) {
  if (!stats.epidemic_threshold) throw DegenerateThresholdError("epidemic threshold undefined: <k^2> <= <k>");
  return *stats.epidemic_threshold;
}

GraphStats degree_stats(const Graph& g) {
  GraphStats s;
  s.node_count = g.node_count();
  s.edge_count = g.edge_count();
  if (s.node_count == 0) return s;
  // Integer accumulation keeps <k> and <k^2> exact up to the final division.
  std::uint64_t sum_sq = 0;
  for (NodeId v = 0; v < s.node_count; ++v) {
    const std::uint64_t k = g.degree(v);
    sum_sq += k * k;
  }
  const auto n = static_cast<double>(s.node_count);
  s.mean_degree = 2.0 * static_cast<double>(s.edge_count) / n;
  s.mean_square_degree = static_cast<double>(sum_sq) / n;
  auto comps = connected_components(g);
  s.component_count = comps.count();
  s.giant_component_size = *std::max_element(comps.sizes.begin(), comps.sizes.end());
  // The 1/N factors cancel, so the ratio comes from exact integer sums.
  const std::uint64_t sum_k = 2 * static_cast<std::uint64_t>(s.edge_count);
  if (sum_sq > sum_k)
    s.epidemic_threshold = static_cast<double>(sum_k) / static_cast<double>(sum_sq - sum_k);
  return s;
}

std::string stats_csv_header() {
  return "dataset,N,L,mean_degree,mean_square_degree,lambda_c,components,giant_component";
}

std::string stats_csv_row(const std::string& dataset, const GraphStats& s) {
  std::string row = csv_field(dataset);
  row += ',' + std::to_string(s.node_count);
  row += ',' + std::to_string(s.edge_count);
  row += ',' + format_number(s.mean_degree);
  row += ',' + format_number(s.mean_square_degree);
  row += ',' + (s.epidemic_threshold ? format_number(*s.epidemic_threshold) : std::string());
  row += ',' + std::to_string(s.component_count);
  row += ',' + std::to_string(s.giant_component_size);
  return row;
}

}  // namespace fastinf
