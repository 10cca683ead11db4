#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "storytree/error.hpp"
#include "storytree/model.hpp"

namespace storytree {

// Vertical spacing is expressed in multiples of `unit`: members of one group
// sit gap_in units apart, everything else gap_out units apart.
struct LayoutParams {
  double unit = 1.0;
  double gap_in = 1.0;
  double gap_out = 3.0;
  int smoothing_rounds = 10;
  double column_width = 1.0;
};

inline void check_params(const LayoutParams& params) {
  if (!(params.unit > 0) || !(params.gap_in > 0) || !(params.gap_out > 0) || !(params.column_width > 0))
    throw Error(ErrorKind::BadParams, "spacings and column width must be positive");
  if (params.smoothing_rounds < 0) throw Error(ErrorKind::BadParams, "smoothing rounds must be non-negative");
}

struct Layout {
  LayoutParams params;
  ColumnOrders columns;                // node order per time index, top to bottom
  std::vector<std::vector<double>> y;  // y[tree][node], grows downwards
  std::vector<double> x;               // x[time index]
  std::vector<std::pair<NodeRef, NodeRef>> edges;  // (parent, child), root edges excluded

  double y_of(NodeRef ref) const {
    return y[static_cast<std::size_t>(ref.tree)][static_cast<std::size_t>(ref.node)];
  }
};

struct MetricsReport {
  std::size_t line_crossings = 0;
  std::size_t block_crossings = 0;
  bool block_crossings_exact = true;  // false: block_crossings is an upper bound
  std::size_t wiggle_count = 0;
  double wiggle_magnitude = 0.0;
  double white_space = 0.0;
  std::size_t planarity_violations = 0;
  std::size_t continuity_violations = 0;
  std::size_t branch_degree_excess = 0;

  bool operator==(const MetricsReport&) const = default;
};

// Smallest allowed distance between two vertically adjacent nodes of a column.
inline double required_gap(const ActorTree& upper_tree, int upper, const ActorTree& lower_tree, int lower,
                           const LayoutParams& params) {
  const int a = upper_tree.nodes[static_cast<std::size_t>(upper)].group;
  const int b = lower_tree.nodes[static_cast<std::size_t>(lower)].group;
  return params.unit * (a != kNoGroup && a == b ? params.gap_in : params.gap_out);
}

inline double required_gap(const Forest& trees, NodeRef upper, NodeRef lower, const LayoutParams& params) {
  return required_gap(trees[static_cast<std::size_t>(upper.tree)], upper.node, trees[static_cast<std::size_t>(lower.tree)],
                      lower.node, params);
}

/// Pairs of edges of one tree that span the same gap and properly cross when
/// nodes are placed at `pos(node)`. Edges sharing an endpoint never cross.
template <typename Position>
std::size_t self_crossing_pairs(const ActorTree& tree, Position&& pos) {
  std::size_t crossings = 0;
  for (int h = tree.first + 1; h <= tree.last; ++h) {
    const auto& layer = tree.at(h);
    for (std::size_t i = 0; i < layer.size(); ++i)
      for (std::size_t j = i + 1; j < layer.size(); ++j) {
        const int c1 = layer[i], c2 = layer[j];
        const int p1 = tree.nodes[static_cast<std::size_t>(c1)].parent;
        const int p2 = tree.nodes[static_cast<std::size_t>(c2)].parent;
        if (p1 == p2) continue;
        if ((pos(p1) - pos(p2)) * (pos(c1) - pos(c2)) < 0) ++crossings;
      }
  }
  return crossings;
}

}  // namespace storytree
