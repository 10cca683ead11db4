#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "storytree/crossmin.hpp"
#include "storytree/error.hpp"
#include "storytree/layout.hpp"
#include "storytree/metrics.hpp"
#include "storytree/model.hpp"

namespace storytree {

namespace detail {

// Position of every node of tree `tree_index` within its column.
inline std::vector<int> node_positions(const ActorTree& tree, int tree_index, const ColumnOrders& columns) {
  std::vector<int> pos(tree.nodes.size(), -1);
  for (int h = tree.first; h <= tree.last; ++h) {
    if (static_cast<std::size_t>(h) >= columns.size())
      throw Error(ErrorKind::InconsistentInput, "schedule is shorter than the life-time of '" + tree.actor_id + "'");
    std::vector<int> taken;
    const auto& column = columns[static_cast<std::size_t>(h)];
    for (std::size_t i = 0; i < column.size(); ++i)
      if (column[i].tree == tree_index) pos[static_cast<std::size_t>(column[i].node)] = static_cast<int>(i);
  }
  for (std::size_t n = 0; n < pos.size(); ++n)
    if (pos[n] < 0)
      throw Error(ErrorKind::InconsistentInput, "node of '" + tree.actor_id + "' missing from the schedule");
  return pos;
}

inline void sort_children(ActorTree& tree, const std::vector<int>& pos) {
  for (auto& node : tree.nodes)
    std::sort(node.children.begin(), node.children.end(),
              [&](int a, int b) { return pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)]; });
}

}  // namespace detail

struct UntangleStats {
  std::size_t initial_crossings = 0;
  std::size_t swaps = 0;
};

/// Removes the self-intersections of one tree under a fixed schedule by
/// exchanging the children of crossing edges in the same gap: (p, q), (r, s)
/// become (p, s), (r, q). Child counts never change, each exchange strictly
/// lowers the number of crossing pairs, and the result is planar.
///
/// Gaps are handled left to right; within a gap the crossing pair whose
/// endpoint positions are lexicographically smallest goes first.
inline ActorTree untangle_tree(ActorTree tree, int tree_index, const ColumnOrders& columns, UntangleStats* stats = nullptr) {
  const auto pos = detail::node_positions(tree, tree_index, columns);
  auto at = [&](int n) { return pos[static_cast<std::size_t>(n)]; };
  if (stats) stats->initial_crossings += self_crossing_pairs(tree, at);

  for (int h = tree.first + 1; h <= tree.last; ++h) {
    const auto& layer = tree.at(h);
    while (true) {
      std::optional<std::tuple<int, int, int, int>> best_key;
      int upper_child = -1, lower_child = -1;
      for (int c1 : layer)
        for (int c2 : layer) {
          if (c1 == c2) continue;
          const int p1 = tree.nodes[static_cast<std::size_t>(c1)].parent;
          const int p2 = tree.nodes[static_cast<std::size_t>(c2)].parent;
          if (at(p1) == at(p2) && p1 != p2) throw Error(ErrorKind::DependentCrossing, "two nodes share a position");
          // c1 hangs off the upper parent but lands below c2.
          if (!(at(p1) < at(p2) && at(c1) > at(c2))) continue;
          auto key = std::make_tuple(at(p1), at(c1), at(p2), at(c2));
          if (!best_key || key < *best_key) best_key = key, upper_child = c1, lower_child = c2;
        }
      if (!best_key) break;

      auto& q = tree.nodes[static_cast<std::size_t>(upper_child)];
      auto& s = tree.nodes[static_cast<std::size_t>(lower_child)];
      const int p = q.parent, r = s.parent;
      auto& p_children = tree.nodes[static_cast<std::size_t>(p)].children;
      auto& r_children = tree.nodes[static_cast<std::size_t>(r)].children;
      *std::find(p_children.begin(), p_children.end(), upper_child) = lower_child;
      *std::find(r_children.begin(), r_children.end(), lower_child) = upper_child;
      q.parent = r;
      s.parent = p;
      if (stats) ++stats->swaps;
    }
  }
  detail::sort_children(tree, pos);
  return tree;
}

/// Untangles each tree on its own; crossings between different actors stay.
inline Forest untangle_forest(Forest trees, const ColumnOrders& columns, UntangleStats* stats = nullptr) {
  for (std::size_t t = 0; t < trees.size(); ++t) trees[t] = untangle_tree(std::move(trees[t]), static_cast<int>(t), columns, stats);
  return trees;
}

namespace detail {

inline double total_wiggle(const Layout& layout) {
  double sum = 0.0;
  for (const auto& [parent, child] : layout.edges) sum += std::abs(layout.y_of(child) - layout.y_of(parent));
  return sum;
}

// Shift of column h minimizing the summed |dy| of the edges touching it,
// i.e. the median offset between its nodes and their tree neighbors.
inline std::optional<double> best_column_shift(const Layout& layout, const Forest& trees, std::size_t h) {
  std::vector<double> offsets;
  for (auto ref : layout.columns[h]) {
    const auto& tree = trees[static_cast<std::size_t>(ref.tree)];
    const auto& node = tree.nodes[static_cast<std::size_t>(ref.node)];
    const double y = layout.y_of(ref);
    if (node.parent != kRoot) offsets.push_back(layout.y_of({ref.tree, node.parent}) - y);
    for (int c : node.children) offsets.push_back(layout.y_of({ref.tree, c}) - y);
  }
  if (offsets.empty()) return std::nullopt;
  std::sort(offsets.begin(), offsets.end());
  const std::size_t mid = offsets.size() / 2;
  return offsets.size() % 2 ? offsets[mid] : 0.5 * (offsets[mid - 1] + offsets[mid]);
}

}  // namespace detail

/// Places every node at the tightest slots its column's block structure
/// allows, then smooths: each round moves each column as a whole towards its
/// tree neighbors, by the offset that minimizes the wiggle of the edges
/// touching it. Columns stay packed, so schedule order and gaps are kept and
/// no white space is introduced. Finally y is shifted so its minimum is 0.
inline Layout assign_coordinates(const Forest& trees, const ColumnOrders& columns, const LayoutParams& params = {}) {
  check_params(params);
  Layout layout;
  layout.params = params;
  layout.columns = columns;
  layout.y.resize(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) layout.y[t].assign(trees[t].nodes.size(), 0.0);
  layout.x.resize(columns.size());
  for (std::size_t h = 0; h < columns.size(); ++h) layout.x[h] = static_cast<double>(h) * params.column_width;

  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t n = 0; n < trees[t].nodes.size(); ++n)
      if (trees[t].nodes[n].parent != kRoot)
        layout.edges.push_back({NodeRef{static_cast<int>(t), trees[t].nodes[n].parent}, NodeRef{static_cast<int>(t), static_cast<int>(n)}});

  for (const auto& column : columns) {
    double y = 0.0;
    for (std::size_t i = 0; i < column.size(); ++i) {
      if (i > 0) y += required_gap(trees, column[i - 1], column[i], params);
      layout.y[static_cast<std::size_t>(column[i].tree)][static_cast<std::size_t>(column[i].node)] = y;
    }
  }

  for (int round = 0; round < params.smoothing_rounds; ++round) {
    const double before = detail::total_wiggle(layout);
    bool moved = false;
    for (std::size_t h = 0; h < columns.size(); ++h) {
      auto shift = detail::best_column_shift(layout, trees, h);
      if (!shift || std::abs(*shift) <= kWiggleEpsilon) continue;
      for (auto ref : columns[h]) layout.y[static_cast<std::size_t>(ref.tree)][static_cast<std::size_t>(ref.node)] += *shift;
      moved = true;
    }
    // Each column move is optimal given the rest, so the total cannot grow.
    if (detail::total_wiggle(layout) > before + 1e-9 * (1.0 + before))
      throw Error(ErrorKind::InconsistentInput, "smoothing increased wiggle");
    if (!moved) break;
  }

  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& ys : layout.y)
    for (double y : ys) lowest = std::min(lowest, y);
  if (std::isfinite(lowest))
    for (auto& ys : layout.y)
      for (double& y : ys) y -= lowest;
  return layout;
}

struct PipelineOptions {
  LayoutParams layout;
  SearchBudget search;
};

struct PipelineResult {
  Forest initial_trees;  // as built, before any untangling
  std::vector<PathLine> paths;
  PermutationSchedule schedule;
  Forest trees;  // final trees, matching layout
  UntangleStats untangle;
  Layout layout;
  MetricsReport metrics;
};

/// Trees, paths, column orders, recombination, untangling, coordinates, metrics.
inline PipelineResult run_pipeline(const StorylineInstance& instance, const PipelineOptions& options = {}) {
  const auto valid = validate_instance(instance);
  check_params(options.layout);
  PipelineResult result;
  result.initial_trees = build_actor_trees(valid);
  result.paths = decompose_to_paths(result.initial_trees);
  result.schedule = optimize_permutations(result.paths, result.initial_trees, valid, options.search);
  auto merged = recombine_paths(result.paths, result.schedule, result.initial_trees);
  result.trees = untangle_forest(std::move(merged.trees), merged.columns, &result.untangle);
  result.layout = assign_coordinates(result.trees, merged.columns, options.layout);
  result.metrics = evaluate(result.layout, result.trees, valid);
  return result;
}

}  // namespace storytree
