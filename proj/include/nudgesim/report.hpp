#pragma once
// Trajectory tables and minimal SVG line charts.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nudgesim/nudge.hpp"

namespace nudgesim {

// `t,recommended,trust_cost,accept_prob,accepted,dropped,q_u,l_u`
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::string_view comment = {});

// `t,constrained_trust_cost,unconstrained_trust_cost`; empty where no
// recommendation was made.
void write_trust_cost_comparison_csv(std::ostream& out, const Trajectory& constrained,
                                     const Trajectory& unconstrained, std::string_view comment = {});

struct Series {
  std::string name;
  std::string color;
  std::vector<std::optional<double>> values;  // x = index; gaps break the line
};

struct ChartSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
};

std::string line_chart_svg(const ChartSpec& spec, std::span<const Series> series);

// Quality (top) and leaning (bottom) panels for one trajectory.
std::string trajectory_svg(const Trajectory& traj);
std::string trust_cost_svg(const Trajectory& constrained, const Trajectory& unconstrained);

}  // namespace nudgesim
