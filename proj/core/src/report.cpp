#include "fastinf/io.hpp"
#include "fastinf/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace fastinf {

namespace {

struct Rgb {
  double r, g, b;
};

constexpr Rgb kDarkRed{103, 0, 31};
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kDarkBlue{5, 48, 97};

Rgb lerp(Rgb a, Rgb b, double f) {
  return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f};
}

std::string hex(Rgb c) {
  auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0))); };
  std::array<char, 8> buf{};
  std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
  return buf.data();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string heatmap_color(double normalized) {
  const double v = std::isnan(normalized) ? 0.0 : std::clamp(normalized, 0.0, 1.0);
  if (v <= 0.5) return hex(lerp(kDarkRed, kWhite, v / 0.5));
  return hex(lerp(kWhite, kDarkBlue, (v - 0.5) / 0.5));
}

std::string emit_heatmap(const EvaluationGrid& grid, Channel channel, const std::string& title) {
  if (grid.empty()) throw std::invalid_argument("emit_heatmap: empty grid");

  std::vector<Metric> rows;
  std::set<std::pair<double, std::uint32_t>> column_set;
  std::map<std::tuple<Metric, double, std::uint32_t>, const EvaluationCell*> cells;
  std::map<std::pair<double, std::uint32_t>, double> best_precision;
  for (const auto& c : grid) {
    if (std::find(rows.begin(), rows.end(), c.metric) == rows.end()) rows.push_back(c.metric);
    column_set.emplace(c.lambda_ratio, c.t);
    cells[{c.metric, c.lambda_ratio, c.t}] = &c;
    if (c.precision) {
      auto& best = best_precision.try_emplace({c.lambda_ratio, c.t}, 0.0).first->second;
      best = std::max(best, *c.precision);
    }
  }
  const std::vector<std::pair<double, std::uint32_t>> columns(column_set.begin(), column_set.end());

  constexpr int cell = 14, left = 120, top = 48, bottom = 36;
  const int width = left + cell * static_cast<int>(columns.size()) + 20;
  const int height = top + cell * static_cast<int>(rows.size()) + bottom;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"9\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  const std::string heading =
      (title.empty() ? std::string() : title + " - ") +
      (channel == Channel::correlation ? "normalized correlation" : "normalized precision");
  svg << "<text x=\"4\" y=\"14\" font-size=\"12\">" << xml_escape(heading) << "</text>\n";

  double current_lambda = std::nan("");
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const int x = left + cell * static_cast<int>(j);
    if (columns[j].first != current_lambda) {
      current_lambda = columns[j].first;
      svg << "<text x=\"" << x << "\" y=\"" << top - 18 << "\">lambda/lambda_c=" << format_number(current_lambda)
          << "</text>\n";
      svg << "<line x1=\"" << x << "\" y1=\"" << top - 14 << "\" x2=\"" << x << "\" y2=\""
          << top + cell * static_cast<int>(rows.size()) << "\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
    }
    svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << top + cell * static_cast<int>(rows.size()) + 12
        << "\" text-anchor=\"middle\" font-size=\"7\">" << time_label(columns[j].second) << "</text>\n";
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int y = top + cell * static_cast<int>(i);
    svg << "<text x=\"" << left - 4 << "\" y=\"" << y + cell - 3 << "\" text-anchor=\"end\">"
        << metric_name(rows[i]) << "</text>\n";
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const int x = left + cell * static_cast<int>(j);
      std::string fill = "#bdbdbd";
      std::string label = "missing";
      auto it = cells.find({rows[i], columns[j].first, columns[j].second});
      auto bp = best_precision.find(columns[j]);
      if (channel == Channel::precision && bp != best_precision.end() && bp->second <= kPrecisionFloor) {
        fill = "#000000";
        label = "no metric above precision " + format_number(kPrecisionFloor);
      } else if (it != cells.end()) {
        const auto& value = channel == Channel::correlation ? it->second->normalized_r : it->second->normalized_precision;
        if (value) {
          fill = heatmap_color(*value);
          label = format_number(*value);
        }
      }
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << fill << "\"><title>" << metric_name(rows[i]) << " t=" << time_label(columns[j].second)
          << ": " << label << "</title></rect>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string emit_hub_scatter(const Graph& g, const CentralityScores& degree_scores,
                             const CentralityScores& social_capital_scores,
                             const CentralityScores& clustering_scores, const InfluenceSet& influence,
                             std::uint32_t t, double top_fraction, std::size_t top_spreaders) {
  const std::size_t n = g.node_count();
  if (degree_scores.scores.size() != n || social_capital_scores.scores.size() != n ||
      clustering_scores.scores.size() != n || influence.curves.size() != n)
    throw std::invalid_argument("emit_hub_scatter: inputs must cover every node");

  const auto q = influence.q_at(t);
  const auto hubs = top_k(degree_scores.scores, top_count(n, top_fraction));
  const auto spreaders = top_k(q, std::min(top_spreaders, n));
  std::vector<bool> is_spreader(n, false);
  for (NodeId v : spreaders) is_spreader[v] = true;

  std::vector<double> hub_q;
  hub_q.reserve(hubs.size());
  for (NodeId v : hubs) hub_q.push_back(q[v]);
  const auto order = top_k(hub_q, hub_q.size());
  std::vector<std::size_t> rank(hubs.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  std::ostringstream out;
  out << "node_label,degree,social_capital,clustering,q,influence_rank,top_spreader\n";
  for (std::size_t i = 0; i < hubs.size(); ++i) {
    const NodeId v = hubs[i];
    out << csv_field(g.label(v)) << ',' << format_number(degree_scores.scores[v]) << ','
        << format_number(social_capital_scores.scores[v]) << ',' << format_number(clustering_scores.scores[v])
        << ',' << format_number(q[v]) << ',' << rank[i] << ',' << (is_spreader[v] ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<DynamicsRow> dynamics_summary(const Graph& g, const InfluenceSet& influence, double fraction) {
  std::vector<double> k(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) k[v] = static_cast<double>(g.degree(v));
  const auto late = influence.q_at(kLateTime);
  std::vector<DynamicsRow> rows;
  for (std::uint32_t t = 1; t <= influence.config.horizon; ++t) {
    const auto q = influence.q_at(t);
    DynamicsRow row;
    row.t = t;
    row.r_late = pearson(q, late);
    row.r_degree = pearson(k, q);
    row.relative_gain = relative_gain(q, late, fraction);
    rows.push_back(row);
  }
  DynamicsRow row;
  row.t = kLateTime;
  row.r_late = pearson(late, late);
  row.r_degree = pearson(k, late);
  row.relative_gain = 0.0;
  rows.push_back(row);
  return rows;
}

}  // namespace fastinf
