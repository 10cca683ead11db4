#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "storytree/pipeline.hpp"
#include "support.hpp"

namespace storytree {
namespace {

StorylineInstance lone_actors(int T, std::vector<std::string> ids) {
  StorylineInstance instance;
  for (int h = 0; h < T; ++h) instance.time_axis.labels.push_back(std::to_string(h));
  for (const auto& id : ids) {
    instance.actors.push_back({id, id, std::nullopt});
    instance.groups.push_back({"G" + id, {id}, 0, T - 1});
  }
  return instance;
}

Layout packed(const Forest& trees, const ColumnOrders& columns) {
  LayoutParams params;
  params.smoothing_rounds = 0;
  return assign_coordinates(trees, columns, params);
}

// Tree with one actor "x": parents[h][i] is the index within layer h-1.
ActorTree tree_with(const std::vector<std::vector<int>>& parents) {
  ActorTree tree;
  tree.actor_id = "x";
  tree.first = 0;
  tree.last = static_cast<int>(parents.size()) - 1;
  for (std::size_t h = 0; h < parents.size(); ++h) {
    std::vector<int> layer;
    for (int p : parents[h]) {
      TreeNode node;
      node.time = static_cast<int>(h);
      if (h > 0) {
        node.parent = tree.layers[h - 1][static_cast<std::size_t>(p)];
        tree.nodes[static_cast<std::size_t>(node.parent)].children.push_back(static_cast<int>(tree.nodes.size()));
      }
      layer.push_back(static_cast<int>(tree.nodes.size()));
      tree.nodes.push_back(node);
    }
    tree.layers.push_back(layer);
  }
  return tree;
}

TEST(Evaluate, StraightLineIsPerfect) {
  const auto instance = lone_actors(4, {"a"});
  const auto trees = build_actor_trees(instance);
  ColumnOrders columns;
  for (int h = 0; h < 4; ++h) columns.push_back({{0, trees[0].at(h).front()}});
  EXPECT_EQ(evaluate(packed(trees, columns), trees, instance), MetricsReport{});
}

TEST(Evaluate, TwoLinesSwapping) {
  const auto instance = lone_actors(2, {"a", "b"});
  const auto trees = build_actor_trees(instance);
  const ColumnOrders columns{{{0, 0}, {1, 0}}, {{1, 1}, {0, 1}}};
  const auto report = evaluate(packed(trees, columns), trees, instance);
  EXPECT_EQ(report.line_crossings, 1u);
  EXPECT_EQ(report.block_crossings, 1u);
  EXPECT_TRUE(report.block_crossings_exact);
  EXPECT_EQ(report.wiggle_count, 2u);
  EXPECT_DOUBLE_EQ(report.wiggle_magnitude, 6.0);
  EXPECT_EQ(report.planarity_violations, 0u);
}

TEST(Evaluate, GeometricCrossingsMatchTheInversionCount) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("a" + std::to_string(i));
    const auto instance = lone_actors(2, ids);
    const auto trees = build_actor_trees(instance);
    std::vector<int> left(static_cast<std::size_t>(n)), right;
    std::iota(left.begin(), left.end(), 0);
    std::shuffle(left.begin(), left.end(), rng);
    right = left;
    std::shuffle(right.begin(), right.end(), rng);
    ColumnOrders columns(2);
    for (int t : left) columns[0].push_back({t, 0});
    for (int t : right) columns[1].push_back({t, 1});
    const auto report = evaluate(packed(trees, columns), trees, instance);
    EXPECT_EQ(report.line_crossings, testing::pair_scan_crossings(left, right));
    EXPECT_EQ(report.block_crossings, testing::bfs_block_distance(left, right));
  }
}

TEST(ContinuityViolations, Examples) {
  EXPECT_EQ(continuity_violations({tree_with({{-1}, {0}, {0}})}), 0u);
  EXPECT_EQ(continuity_violations({tree_with({{-1, -1}, {0}})}), 1u);
  // Three branches funnel into one: two of them die.
  EXPECT_EQ(continuity_violations({tree_with({{-1}, {0, 0, 0}, {1}, {0}})}), 2u);
}

// Round robin gives every previous branch a child whenever there are enough
// children, so built trees only lose the branches a shrinking count forces.
TEST(ContinuityViolations, BuiltTreesOnlyLoseForcedBranches) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto trees = build_actor_trees(testing::random_instance(rng));
    std::size_t forced = 0;
    for (const auto& tree : trees)
      for (int h = tree.first + 1; h <= tree.last; ++h)
        if (tree.at(h - 1).size() > tree.at(h).size()) forced += tree.at(h - 1).size() - tree.at(h).size();
    EXPECT_EQ(continuity_violations(trees), forced);
  }
}

TEST(BranchDegreeExcess, Examples) {
  EXPECT_EQ(branch_degree_excess({tree_with({{-1, -1}, {0, 0, 1, 1}})}), 0u);
  EXPECT_EQ(branch_degree_excess({tree_with({{-1, -1}, {0, 0, 0, 1}})}), 1u);
  EXPECT_EQ(branch_degree_excess({tree_with({{-1}, {0, 0, 0}})}), 0u);
}

TEST(BranchDegreeExcess, BuiltTreesHaveNone) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 300; ++trial)
    EXPECT_EQ(branch_degree_excess(build_actor_trees(testing::random_instance(rng, 6, 8, 4))), 0u);
}

TEST(WhiteSpace, PackedIsZeroStretchedIsMeasured) {
  const auto instance = lone_actors(2, {"a", "b"});
  const auto trees = build_actor_trees(instance);
  const ColumnOrders columns{{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}};
  auto layout = packed(trees, columns);
  EXPECT_EQ(white_space(layout, trees, layout.params), 0.0);
  layout.y[1][1] += 2.0;
  EXPECT_DOUBLE_EQ(white_space(layout, trees, layout.params), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(layout, trees, instance).white_space, 2.0);
}

TEST(Evaluate, RejectsMismatchedLayout) {
  const auto instance = lone_actors(2, {"a", "b"});
  const auto trees = build_actor_trees(instance);
  auto layout = packed(trees, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}});
  layout.columns[1].pop_back();
  EXPECT_THROW(evaluate(layout, trees, instance), Error);
  EXPECT_THROW(evaluate(layout, Forest{trees[0]}, instance), Error);
}

// Everything recomputed from node coordinates and parent links alone.
MetricsReport oracle_report(const Layout& layout, const Forest& trees) {
  MetricsReport report;
  struct Edge {
    double parent_y, child_y;
    int tree, parent;
  };
  std::map<int, std::vector<Edge>> gaps;
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t n = 0; n < trees[t].nodes.size(); ++n) {
      const auto& node = trees[t].nodes[n];
      if (node.parent == kRoot) continue;
      const double py = layout.y[t][static_cast<std::size_t>(node.parent)], cy = layout.y[t][n];
      gaps[node.time - 1].push_back({py, cy, static_cast<int>(t), node.parent});
      if (std::abs(cy - py) > 1e-9) ++report.wiggle_count;
      report.wiggle_magnitude += std::abs(cy - py);
    }
  testing::BlockDistanceOracle distance;
  for (auto& [gap, edges] : gaps) {
    for (std::size_t i = 0; i < edges.size(); ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const auto& a = edges[i];
        const auto& b = edges[j];
        if (a.tree == b.tree && a.parent == b.parent) continue;
        if ((a.parent_y - b.parent_y) * (a.child_y - b.child_y) < 0) ++report.line_crossings;
      }
    std::vector<int> left(edges.size()), right;
    std::iota(left.begin(), left.end(), 0);
    right = left;
    std::sort(left.begin(), left.end(), [&](int a, int b) {
      return std::pair(edges[static_cast<std::size_t>(a)].parent_y, edges[static_cast<std::size_t>(a)].child_y) <
             std::pair(edges[static_cast<std::size_t>(b)].parent_y, edges[static_cast<std::size_t>(b)].child_y);
    });
    std::sort(right.begin(), right.end(),
              [&](int a, int b) { return edges[static_cast<std::size_t>(a)].child_y < edges[static_cast<std::size_t>(b)].child_y; });
    if (edges.size() <= 8)
      report.block_crossings += distance(left, right);
    else
      report.block_crossings_exact = false;
  }
  for (const auto& tree : trees) {
    report.planarity_violations += testing::segment_self_crossings(tree, layout.y[static_cast<std::size_t>(&tree - trees.data())]);
    for (const auto& node : tree.nodes)
      if (node.time < tree.last && node.children.empty()) ++report.continuity_violations;
    for (int h = tree.first + 1; h <= tree.last; ++h) {
      int busiest = 0;
      for (int p : tree.at(h - 1)) busiest = std::max(busiest, static_cast<int>(tree.nodes[static_cast<std::size_t>(p)].children.size()));
      const int m = static_cast<int>(tree.at(h - 1).size()), next = static_cast<int>(tree.at(h).size());
      report.branch_degree_excess += static_cast<std::size_t>(std::max(0, busiest - (next + m - 1) / m));
    }
  }
  for (const auto& column : layout.columns) {
    if (column.size() < 2) continue;
    double lo = 1e300, hi = -1e300, minimal = 0;
    for (std::size_t i = 0; i < column.size(); ++i) {
      lo = std::min(lo, layout.y_of(column[i]));
      hi = std::max(hi, layout.y_of(column[i]));
      if (i) minimal += required_gap(trees, column[i - 1], column[i], layout.params);
    }
    report.white_space += std::max(0.0, hi - lo - minimal);
  }
  return report;
}

TEST(Evaluate, SecondCaseStudyMatchesTheOracle) {
  const auto instance = testing::load_derived("case_study_2_publications.json");
  const auto result = run_pipeline(instance);
  const auto expected = oracle_report(result.layout, result.trees);
  const auto& got = result.metrics;
  EXPECT_EQ(got.line_crossings, expected.line_crossings);
  EXPECT_EQ(got.wiggle_count, expected.wiggle_count);
  EXPECT_NEAR(got.wiggle_magnitude, expected.wiggle_magnitude, 1e-9);
  EXPECT_NEAR(got.white_space, expected.white_space, 1e-9);
  EXPECT_EQ(got.planarity_violations, expected.planarity_violations);
  EXPECT_EQ(got.continuity_violations, expected.continuity_violations);
  EXPECT_EQ(got.branch_degree_excess, expected.branch_degree_excess);
  if (expected.block_crossings_exact) {
    EXPECT_TRUE(got.block_crossings_exact);
    EXPECT_EQ(got.block_crossings, expected.block_crossings);
  }
  EXPECT_LE(got.block_crossings, got.line_crossings);
}

TEST(Evaluate, RandomLayoutsMatchTheOracle) {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 80; ++trial) {
    const auto result = run_pipeline(testing::random_instance(rng, 5, 6, 2));
    const auto expected = oracle_report(result.layout, result.trees);
    EXPECT_EQ(result.metrics.line_crossings, expected.line_crossings);
    EXPECT_EQ(result.metrics.planarity_violations, expected.planarity_violations);
    EXPECT_EQ(result.metrics.wiggle_count, expected.wiggle_count);
    if (expected.block_crossings_exact) {
      EXPECT_EQ(result.metrics.block_crossings, expected.block_crossings);
    }
  }
}

TEST(Evaluate, IsPure) {
  const auto instance = testing::load_instance("five_actors.json");
  const auto result = run_pipeline(instance);
  const auto layout_copy = result.layout.y;
  EXPECT_EQ(evaluate(result.layout, result.trees, instance), evaluate(result.layout, result.trees, instance));
  EXPECT_EQ(result.layout.y, layout_copy);
}

}  // namespace
}  // namespace storytree
