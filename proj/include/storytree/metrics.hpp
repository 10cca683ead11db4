#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "storytree/crossmin.hpp"
#include "storytree/error.hpp"
#include "storytree/layout.hpp"
#include "storytree/model.hpp"

namespace storytree {

inline constexpr double kWiggleEpsilon = 1e-9;

/// Branches that die while their actor lives on.
inline std::size_t continuity_violations(const Forest& trees) {
  std::size_t dead = 0;
  for (const auto& tree : trees)
    for (int h = tree.first; h < tree.last; ++h)
      for (int n : tree.at(h))
        if (tree.child_count(n) == 0) ++dead;
  return dead;
}

/// Sum over transitions of how far the busiest branch exceeds ceil(m' / m).
inline std::size_t branch_degree_excess(const Forest& trees) {
  std::size_t excess = 0;
  for (const auto& tree : trees)
    for (int h = tree.first + 1; h <= tree.last; ++h) {
      const auto& previous = tree.at(h - 1);
      const auto m = previous.size();
      const auto m_next = tree.at(h).size();
      const std::size_t ideal = (m_next + m - 1) / m;
      std::size_t busiest = 0;
      for (int p : previous) busiest = std::max(busiest, static_cast<std::size_t>(tree.child_count(p)));
      if (busiest > ideal) excess += busiest - ideal;
    }
  return excess;
}

/// Vertical slack beyond the tightest packing of each column's block structure.
inline double white_space(const Layout& layout, const Forest& trees, const LayoutParams& params) {
  double slack = 0.0;
  for (const auto& column : layout.columns) {
    if (column.size() < 2) continue;
    double minimal = 0.0;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) minimal += required_gap(trees, column[i], column[i + 1], params);
    const double extent = layout.y_of(column.back()) - layout.y_of(column.front());
    slack += std::max(0.0, extent - minimal);
  }
  return slack;
}

namespace detail {

inline void check_consistency(const Layout& layout, const Forest& trees, const StorylineInstance& instance) {
  if (layout.y.size() != trees.size()) throw Error(ErrorKind::InconsistentInput, "layout and forest differ in tree count");
  std::size_t placed = 0, total = 0;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (layout.y[t].size() != trees[t].nodes.size())
      throw Error(ErrorKind::InconsistentInput, "layout and tree '" + trees[t].actor_id + "' differ in node count");
    if (!instance.actor_index(trees[t].actor_id))
      throw Error(ErrorKind::InconsistentInput, "tree of unknown actor '" + trees[t].actor_id + "'");
    if (trees[t].last >= static_cast<int>(layout.columns.size()))
      throw Error(ErrorKind::InconsistentInput, "tree '" + trees[t].actor_id + "' outlives the layout");
    total += trees[t].nodes.size();
  }
  for (std::size_t h = 0; h < layout.columns.size(); ++h)
    for (auto ref : layout.columns[h]) {
      if (ref.tree < 0 || static_cast<std::size_t>(ref.tree) >= trees.size() || ref.node < 0 ||
          static_cast<std::size_t>(ref.node) >= trees[static_cast<std::size_t>(ref.tree)].nodes.size() ||
          trees[static_cast<std::size_t>(ref.tree)].nodes[static_cast<std::size_t>(ref.node)].time != static_cast<int>(h))
        throw Error(ErrorKind::InconsistentInput, "column " + std::to_string(h) + " holds a foreign node");
      ++placed;
    }
  if (placed != total) throw Error(ErrorKind::InconsistentInput, "columns do not hold every node exactly once");
}

}  // namespace detail

/// All quality metrics of a finished layout.
///
/// Crossings are counted per gap between consecutive columns, treating every
/// drawn edge as a line: its order on the left is by parent y (then child y,
/// so edges fanning out of one node do not count against each other), its
/// order on the right is by child y.
inline MetricsReport evaluate(const Layout& layout, const Forest& trees, const StorylineInstance& instance) {
  detail::check_consistency(layout, trees, instance);
  MetricsReport report;

  const std::size_t T = layout.columns.size();
  std::vector<std::vector<std::size_t>> gap_edges(T);
  for (std::size_t e = 0; e < layout.edges.size(); ++e) {
    const auto parent = layout.edges[e].first;
    const int h = trees[static_cast<std::size_t>(parent.tree)].nodes[static_cast<std::size_t>(parent.node)].time;
    gap_edges[static_cast<std::size_t>(h)].push_back(e);

    const double dy = std::abs(layout.y_of(layout.edges[e].second) - layout.y_of(parent));
    if (dy > kWiggleEpsilon) ++report.wiggle_count;
    report.wiggle_magnitude += dy;
  }

  for (const auto& edges : gap_edges) {
    if (edges.size() < 2) continue;
    auto left = edges;
    auto right = edges;
    std::sort(left.begin(), left.end(), [&](std::size_t a, std::size_t b) {
      const double pa = layout.y_of(layout.edges[a].first), pb = layout.y_of(layout.edges[b].first);
      if (pa != pb) return pa < pb;
      return layout.y_of(layout.edges[a].second) < layout.y_of(layout.edges[b].second);
    });
    std::sort(right.begin(), right.end(), [&](std::size_t a, std::size_t b) {
      return layout.y_of(layout.edges[a].second) < layout.y_of(layout.edges[b].second);
    });
    report.line_crossings += count_line_crossings(left, right);
    const auto blocks = count_block_crossings(left, right);
    report.block_crossings += blocks.count;
    report.block_crossings_exact = report.block_crossings_exact && blocks.exact;
  }

  for (std::size_t t = 0; t < trees.size(); ++t)
    report.planarity_violations +=
        self_crossing_pairs(trees[t], [&](int node) { return layout.y[t][static_cast<std::size_t>(node)]; });

  report.white_space = white_space(layout, trees, layout.params);
  report.continuity_violations = continuity_violations(trees);
  report.branch_degree_excess = branch_degree_excess(trees);
  return report;
}

}  // namespace storytree
