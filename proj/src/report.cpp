#include "nudgesim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "nudgesim/text_io.hpp"

namespace nudgesim {
namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr double kWidth = 640, kHeight = 280;
constexpr double kLeft = 60, kRight = 20, kTop = 36, kBottom = 44;

void chart_body(std::ostringstream& svg, const ChartSpec& spec, std::span<const Series> series, double y_offset) {
  std::size_t n = 1;
  for (const auto& s : series) n = std::max(n, s.values.size());
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const double span = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;
  auto px = [&](std::size_t i) { return kLeft + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };
  auto py = [&](double v) {
    v = std::clamp(v, spec.y_min, spec.y_max);
    return y_offset + kTop + ph * (1.0 - (v - spec.y_min) / span);
  };

  svg << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"" << fixed(y_offset + 22)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(spec.title) << "</text>\n";
  svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(y_offset + kTop) << "\" width=\"" << fixed(pw)
      << "\" height=\"" << fixed(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = spec.y_min + span * k / 4.0;
    svg << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(v) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fixed(v) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kLeft) << "\" y=\"" << fixed(y_offset + kHeight - 24)
      << "\" font-size=\"10\">0</text>\n";
  svg << "<text x=\"" << fixed(kLeft + pw) << "\" y=\"" << fixed(y_offset + kHeight - 24)
      << "\" text-anchor=\"end\" font-size=\"10\">" << (n - 1) << "</text>\n";
  svg << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(y_offset + kHeight - 8)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << fixed(y_offset + kTop + ph / 2) << "\" font-size=\"11\" transform=\"rotate(-90 14 "
      << fixed(y_offset + kTop + ph / 2) << ")\" text-anchor=\"middle\">" << escape_xml(spec.y_label) << "</text>\n";

  double legend_y = y_offset + kTop + 12;
  for (const auto& s : series) {
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << points
            << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (!s.values[i]) {
        flush();
        continue;
      }
      if (!points.empty()) points.push_back(' ');
      points += fixed(px(i)) + "," + fixed(py(*s.values[i]));
    }
    flush();
    svg << "<text x=\"" << fixed(kLeft + pw - 4) << "\" y=\"" << fixed(legend_y)
        << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << s.color << "\">" << escape_xml(s.name)
        << "</text>\n";
    legend_y += 12;
  }
}

std::string svg_document(double height, const std::string& body) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth) << "\" height=\"" << fixed(height)
      << "\" viewBox=\"0 0 " << fixed(kWidth) << ' ' << fixed(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body << "</svg>\n";
  return svg.str();
}

std::vector<std::optional<double>> trust_costs(const Trajectory& traj) {
  std::vector<std::optional<double>> v;
  for (const auto& r : traj.steps) v.push_back(r.trust_cost);
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,recommended,trust_cost,accept_prob,accepted,dropped,q_u,l_u\n";
  for (const auto& r : traj.steps) {
    out << r.t << ',' << csv_field(r.recommended.value_or("")) << ',' << opt(r.trust_cost) << ','
        << opt(r.accept_probability) << ',' << (r.accepted ? 1 : 0) << ',' << csv_field(r.dropped.value_or(""))
        << ',' << format_double(r.quality) << ',' << format_double(r.leaning) << '\n';
  }
}

void write_trust_cost_comparison_csv(std::ostream& out, const Trajectory& constrained,
                                     const Trajectory& unconstrained, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,constrained_trust_cost,unconstrained_trust_cost\n";
  const std::size_t n = std::max(constrained.steps.size(), unconstrained.steps.size());
  for (std::size_t t = 0; t < n; ++t) {
    std::optional<double> a, b;
    if (t < constrained.steps.size()) a = constrained.steps[t].trust_cost;
    if (t < unconstrained.steps.size()) b = unconstrained.steps[t].trust_cost;
    out << t << ',' << opt(a) << ',' << opt(b) << '\n';
  }
}

std::string line_chart_svg(const ChartSpec& spec, std::span<const Series> series) {
  std::ostringstream body;
  chart_body(body, spec, series, 0.0);
  return svg_document(kHeight, body.str());
}

std::string trajectory_svg(const Trajectory& traj) {
  Series quality{"q_u", "#1f77b4", {}};
  Series leaning{"l_u", "#d62728", {}};
  quality.values.push_back(traj.initial.quality);
  leaning.values.push_back(traj.initial.leaning);
  for (const auto& r : traj.steps) {
    quality.values.push_back(r.quality);
    leaning.values.push_back(r.leaning);
  }
  std::string mode(to_string(traj.config.mode));
  std::ostringstream body;
  chart_body(body, {traj.user_id + " quality (" + mode + ")", "t", "quality", 0.0, 1.0},
             std::span<const Series>(&quality, 1), 0.0);
  chart_body(body, {traj.user_id + " leaning (" + mode + ")", "t", "leaning", -1.0, 1.0},
             std::span<const Series>(&leaning, 1), kHeight);
  return svg_document(2 * kHeight, body.str());
}

std::string trust_cost_svg(const Trajectory& constrained, const Trajectory& unconstrained) {
  std::vector<Series> series{{"constrained", "#1f77b4", trust_costs(constrained)},
                             {"unconstrained", "#ff7f0e", trust_costs(unconstrained)}};
  double y_max = 0.0;
  for (const auto& s : series) {
    for (const auto& v : s.values) {
      if (v) y_max = std::max(y_max, *v);
    }
  }
  y_max = std::max(0.1, y_max);
  return line_chart_svg({constrained.user_id + " trust cost", "t", "trust cost", 0.0, y_max}, series);
}

}  // namespace nudgesim
