#include "fastinf/evaluation.hpp"

#include "fastinf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <tuple>

namespace fastinf {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) return std::nullopt;

  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t top_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("top fraction must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

std::vector<NodeId> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<NodeId> idx(scores.size());
  std::iota(idx.begin(), idx.end(), NodeId{0});
  k = std::min(k, idx.size());
  auto better = [&](NodeId a, NodeId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

double precision_at(std::span<const double> scores, std::span<const double> truth, double fraction) {
  if (scores.size() != truth.size()) throw std::invalid_argument("precision_at: length mismatch");
  if (scores.empty()) throw std::invalid_argument("precision_at: empty input");
  const std::size_t k = top_count(scores.size(), fraction);
  auto a = top_k(scores, k);
  auto b = top_k(truth, k);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<NodeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

double relative_gain(std::span<const double> q_t, std::span<const double> q_inf, double fraction) {
  if (q_t.size() != q_inf.size()) throw std::invalid_argument("relative_gain: length mismatch");
  if (q_t.empty()) throw std::invalid_argument("relative_gain: empty input");
  const std::size_t k = top_count(q_t.size(), fraction);
  // Summing each selection in descending order makes the floating-point sum
  // monotone in the selected values, so RG >= 0 holds exactly.
  auto selected_mean = [&](const std::vector<NodeId>& nodes) {
    std::vector<double> v;
    v.reserve(nodes.size());
    for (NodeId i : nodes) v.push_back(q_t[i]);
    std::sort(v.begin(), v.end(), std::greater<>());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double best = selected_mean(top_k(q_t, k));
  const double late = selected_mean(top_k(q_inf, k));
  if (!(late > 0.0)) throw std::domain_error("relative_gain: Q(t|inf) is zero");
  return (best - late) / late;
}

double relative_gain(const InfluenceSet& set, std::uint32_t t, double fraction) {
  const auto qt = set.q_at(t);
  const auto qi = set.q_at(kLateTime);
  return relative_gain(qt, qi, fraction);
}

void normalize_grid(EvaluationGrid& grid) {
  using Key = std::tuple<std::string, double, std::uint32_t>;
  std::map<Key, double> best_r, best_p;
  for (const auto& c : grid) {
    Key key{c.dataset, c.lambda_ratio, c.t};
    if (c.r) {
      auto [it, fresh] = best_r.try_emplace(key, *c.r);
      if (!fresh) it->second = std::max(it->second, *c.r);
    }
    if (c.precision) {
      auto [it, fresh] = best_p.try_emplace(key, *c.precision);
      if (!fresh) it->second = std::max(it->second, *c.precision);
    }
  }
  for (auto& c : grid) {
    Key key{c.dataset, c.lambda_ratio, c.t};
    c.normalized_r.reset();
    c.normalized_precision.reset();
    if (c.r) {
      const double best = best_r.at(key);
      if (best > 0.0) c.normalized_r = *c.r == best ? 1.0 : *c.r / best;
    }
    if (c.precision) {
      const double best = best_p.at(key);
      if (best > 0.0) c.normalized_precision = *c.precision == best ? 1.0 : *c.precision / best;
    }
  }
}

EvaluationGrid evaluate_metrics(const std::vector<CentralityScores>& score_sets, const InfluenceSet& influence,
                                double lambda_ratio, std::span<const std::uint32_t> times, double fraction,
                                const std::string& dataset) {
  EvaluationGrid grid;
  for (std::uint32_t t : times) {
    const auto truth = influence.q_at(t);
    for (const auto& set : score_sets) {
      if (set.scores.size() != truth.size())
        throw std::invalid_argument("evaluate_metrics: score vector length differs from influence");
      EvaluationCell cell;
      cell.dataset = dataset;
      cell.metric = set.metric;
      cell.lambda_ratio = lambda_ratio;
      cell.t = t;
      cell.r = pearson(set.scores, truth);
      cell.precision = precision_at(set.scores, truth, fraction);
      grid.push_back(std::move(cell));
    }
  }
  normalize_grid(grid);
  return grid;
}

std::vector<AggregateCell> aggregate_datasets(std::span<const EvaluationGrid> grids) {
  using Key = std::tuple<double, std::uint32_t, Metric>;
  struct Sum {
    double r = 0.0, p = 0.0;
    std::size_t nr = 0, np = 0;
  };
  std::map<Key, Sum> sums;
  std::vector<Key> order;
  for (const auto& grid : grids) {
    for (const auto& c : grid) {
      Key key{c.lambda_ratio, c.t, c.metric};
      auto [it, fresh] = sums.try_emplace(key);
      if (fresh) order.push_back(key);
      if (c.normalized_r) {
        it->second.r += *c.normalized_r;
        ++it->second.nr;
      }
      if (c.normalized_precision) {
        it->second.p += *c.normalized_precision;
        ++it->second.np;
      }
    }
  }
  std::vector<AggregateCell> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const Sum& s = sums.at(key);
    AggregateCell a;
    a.lambda_ratio = std::get<0>(key);
    a.t = std::get<1>(key);
    a.metric = std::get<2>(key);
    a.datasets_r = s.nr;
    a.datasets_precision = s.np;
    if (s.nr) a.mean_normalized_r = s.r / static_cast<double>(s.nr);
    if (s.np) a.mean_normalized_precision = s.p / static_cast<double>(s.np);
    out.push_back(a);
  }
  return out;
}

std::string time_label(std::uint32_t t) { return t == kLateTime ? "inf" : std::to_string(t); }

std::uint32_t parse_time_label(const std::string& label) {
  if (label == "inf") return kLateTime;
  std::uint32_t t = 0;
  auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), t);
  if (ec != std::errc{} || ptr != label.data() + label.size() || t == 0)
    throw std::invalid_argument("bad time label '" + label + "'");
  return t;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

void write_evaluation_csv(const EvaluationGrid& grid, std::ostream& out) {
  out << "dataset,metric,lambda_ratio,t,r,precision,normalized_r,normalized_precision\n";
  for (const auto& c : grid) {
    out << csv_field(c.dataset) << ',' << metric_name(c.metric) << ',' << format_number(c.lambda_ratio) << ','
        << time_label(c.t) << ',' << opt(c.r) << ',' << opt(c.precision) << ',' << opt(c.normalized_r) << ','
        << opt(c.normalized_precision) << '\n';
  }
}

EvaluationGrid read_evaluation_csv(std::istream& in) {
  EvaluationGrid grid;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("evaluation csv: empty input");
  if (line.rfind("dataset,metric,lambda_ratio,t", 0) != 0)
    throw std::runtime_error("evaluation csv: unexpected header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_record(line);
    if (f.size() != 8) throw std::runtime_error("evaluation csv: line " + std::to_string(line_no) + " has " +
                                                std::to_string(f.size()) + " fields");
    EvaluationCell c;
    c.dataset = f[0];
    c.metric = parse_metric(f[1]);
    c.lambda_ratio = std::stod(f[2]);
    c.t = parse_time_label(f[3]);
    c.r = parse_opt(f[4]);
    c.precision = parse_opt(f[5]);
    c.normalized_r = parse_opt(f[6]);
    c.normalized_precision = parse_opt(f[7]);
    grid.push_back(std::move(c));
  }
  return grid;
}

void write_aggregate_csv(const std::vector<AggregateCell>& cells, std::ostream& out) {
  out << "metric,lambda_ratio,t,mean_normalized_r,mean_normalized_precision,datasets_r,datasets_precision\n";
  for (const auto& c : cells) {
    out << metric_name(c.metric) << ',' << format_number(c.lambda_ratio) << ',' << time_label(c.t) << ','
        << opt(c.mean_normalized_r) << ',' << opt(c.mean_normalized_precision) << ',' << c.datasets_r << ','
        << c.datasets_precision << '\n';
  }
}

EvaluationGrid aggregate_as_grid(const std::vector<AggregateCell>& cells) {
  EvaluationGrid grid;
  grid.reserve(cells.size());
  for (const auto& a : cells) {
    EvaluationCell c;
    c.dataset = "aggregate";
    c.metric = a.metric;
    c.lambda_ratio = a.lambda_ratio;
    c.t = a.t;
    c.normalized_r = a.mean_normalized_r;
    c.normalized_precision = a.mean_normalized_precision;
    grid.push_back(std::move(c));
  }
  return grid;
}

}  // namespace fastinf
