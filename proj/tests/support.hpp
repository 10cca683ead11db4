#pragma once

// Test-only generators and brute-force oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "storytree/storytree.hpp"

namespace storytree::testing {

inline std::string data_path(const std::string& name) { return std::string(STORYTREE_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline StorylineInstance load_instance(const std::string& name) { return parse_instance(read_text(data_path(name))); }

inline StorylineInstance load_derived(const std::string& name) {
  return derive_groups(parse_publications(read_text(data_path(name))));
}

// Random SUA instance: at most `max_actors` actors, `max_time` instants and
// `max_concurrent` simultaneous groups per actor.
inline StorylineInstance random_instance(std::mt19937& rng, int max_actors = 6, int max_time = 8, int max_concurrent = 3) {
  std::uniform_int_distribution<int> actor_count(1, max_actors), time_count(1, max_time), group_count(1, 9);
  StorylineInstance instance;
  const int n = actor_count(rng), T = time_count(rng);
  for (int h = 0; h < T; ++h) instance.time_axis.labels.push_back("t" + std::to_string(h));
  for (int a = 0; a < n; ++a) instance.actors.push_back({"a" + std::to_string(a), "a" + std::to_string(a), std::nullopt});

  std::vector<std::vector<int>> load(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(T), 0));
  const int groups = group_count(rng);
  for (int g = 0; g < groups; ++g) {
    std::uniform_int_distribution<int> instant(0, T - 1);
    int b = instant(rng), e = instant(rng);
    if (b > e) std::swap(b, e);
    Group group{"G" + std::to_string(g), {}, b, e};
    for (int a = 0; a < n; ++a) {
      if (std::bernoulli_distribution(0.45)(rng) == false) continue;
      bool fits = true;
      for (int h = b; h <= e; ++h) fits = fits && load[static_cast<std::size_t>(a)][static_cast<std::size_t>(h)] < max_concurrent;
      if (!fits) continue;
      for (int h = b; h <= e; ++h) ++load[static_cast<std::size_t>(a)][static_cast<std::size_t>(h)];
      group.members.push_back("a" + std::to_string(a));
    }
    if (!group.members.empty()) instance.groups.push_back(std::move(group));
  }
  if (instance.groups.empty()) instance.groups.push_back({"G0", {"a0"}, 0, T - 1});
  return instance;
}

// Inversions by looking at every pair.
template <typename T>
std::size_t pair_scan_crossings(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t count = 0;
  auto pos_b = [&](const T& x) { return std::find(b.begin(), b.end(), x) - b.begin(); };
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (pos_b(a[i]) > pos_b(a[j])) ++count;
  return count;
}

// Breadth-first search from `a` to `b` over adjacent-block swaps.
template <typename T>
std::size_t bfs_block_distance(const std::vector<T>& a, const std::vector<T>& b) {
  std::map<std::vector<T>, std::size_t> dist{{a, 0}};
  std::deque<std::vector<T>> queue{a};
  while (!queue.empty()) {
    auto current = queue.front();
    queue.pop_front();
    const auto d = dist[current];
    if (current == b) return d;
    const std::size_t n = current.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = j + 1; k <= n; ++k) {
          std::vector<T> next(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(i));
          next.insert(next.end(), current.begin() + static_cast<std::ptrdiff_t>(j), current.begin() + static_cast<std::ptrdiff_t>(k));
          next.insert(next.end(), current.begin() + static_cast<std::ptrdiff_t>(i), current.begin() + static_cast<std::ptrdiff_t>(j));
          next.insert(next.end(), current.begin() + static_cast<std::ptrdiff_t>(k), current.end());
          if (dist.emplace(next, d + 1).second) queue.push_back(std::move(next));
        }
  }
  return std::numeric_limits<std::size_t>::max();
}

// Block distance of a relabelled pair, memoized on the relabelled permutation.
class BlockDistanceOracle {
 public:
  std::size_t operator()(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> relabelled;
    for (int x : b) relabelled.push_back(static_cast<int>(std::find(a.begin(), a.end(), x) - a.begin()));
    auto it = cache_.find(relabelled);
    if (it != cache_.end()) return it->second;
    std::vector<int> identity(a.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
    return cache_[relabelled] = bfs_block_distance(identity, relabelled);
  }

 private:
  std::map<std::vector<int>, std::size_t> cache_;
};

inline std::vector<int> keep_only(const std::vector<int>& order, const std::set<int>& keep) {
  std::vector<int> out;
  for (int x : order)
    if (keep.contains(x)) out.push_back(x);
  return out;
}

inline bool blocks_contiguous(const std::vector<int>& order, const std::vector<std::vector<int>>& blocks) {
  for (const auto& block : blocks) {
    std::vector<std::size_t> where;
    for (int line : block) where.push_back(static_cast<std::size_t>(std::find(order.begin(), order.end(), line) - order.begin()));
    std::sort(where.begin(), where.end());
    if (where.back() - where.front() + 1 != where.size()) return false;
  }
  return true;
}

// Every feasible order of every column, combined column by column keeping the
// cheapest way to reach each order. Equivalent to trying all schedules.
inline std::size_t brute_force_min_block_crossings(const LineSystem& system) {
  BlockDistanceOracle distance;
  std::vector<std::vector<std::vector<int>>> feasible;
  for (const auto& column : system.columns) {
    auto order = column.lines;
    std::sort(order.begin(), order.end());
    std::vector<std::vector<int>> all;
    do {
      if (blocks_contiguous(order, column.blocks)) all.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    feasible.push_back(std::move(all));
  }
  std::vector<std::size_t> best(feasible.front().size(), 0);
  for (std::size_t h = 1; h < feasible.size(); ++h) {
    std::set<int> previous(system.columns[h - 1].lines.begin(), system.columns[h - 1].lines.end()), common;
    for (int line : system.columns[h].lines)
      if (previous.contains(line)) common.insert(line);
    std::vector<std::size_t> next(feasible[h].size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t j = 0; j < feasible[h].size(); ++j)
      for (std::size_t i = 0; i < feasible[h - 1].size(); ++i)
        next[j] = std::min(next[j], best[i] + distance(keep_only(feasible[h - 1][i], common), keep_only(feasible[h][j], common)));
    best = std::move(next);
  }
  return *std::min_element(best.begin(), best.end());
}

// Random classical line system: lines alive on random intervals, random
// disjoint blocks per column.
inline LineSystem random_line_system(std::mt19937& rng, int max_lines = 5, int max_columns = 4) {
  LineSystem system;
  std::uniform_int_distribution<int> lines(1, max_lines), columns(1, max_columns);
  system.line_count = lines(rng);
  const int T = columns(rng);
  system.columns.resize(static_cast<std::size_t>(T));
  for (int l = 0; l < system.line_count; ++l) {
    std::uniform_int_distribution<int> instant(0, T - 1);
    int b = instant(rng), e = instant(rng);
    if (b > e) std::swap(b, e);
    for (int h = b; h <= e; ++h) system.columns[static_cast<std::size_t>(h)].lines.push_back(l);
  }
  for (auto& column : system.columns) {
    auto pool = column.lines;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::size_t i = 0;
    while (i < pool.size()) {
      const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      std::vector<int> block(pool.begin() + static_cast<std::ptrdiff_t>(i),
                             pool.begin() + static_cast<std::ptrdiff_t>(std::min(pool.size(), i + size)));
      if (block.size() > 1) column.blocks.push_back(block);
      i += size;
    }
  }
  system.anchor.assign(static_cast<std::size_t>(system.line_count), -1);
  return system;
}

// Random tree with 1..4 nodes per instant and random parents, plus a column
// order holding only this tree (tree index 0) in random vertical order.
struct RandomTree {
  ActorTree tree;
  ColumnOrders columns;
};

inline RandomTree random_tree(std::mt19937& rng, int instants) {
  RandomTree out;
  auto& tree = out.tree;
  tree.actor_id = "x";
  tree.first = 0;
  tree.last = instants - 1;
  out.columns.resize(static_cast<std::size_t>(instants));
  for (int h = 0; h < instants; ++h) {
    const int size = std::uniform_int_distribution<int>(1, 4)(rng);
    std::vector<int> layer;
    for (int i = 0; i < size; ++i) {
      TreeNode node;
      node.time = h;
      node.group = i;
      node.group_id = "g" + std::to_string(i);
      if (h > 0) {
        const auto& previous = tree.layers.back();
        node.parent = previous[std::uniform_int_distribution<std::size_t>(0, previous.size() - 1)(rng)];
        tree.nodes[static_cast<std::size_t>(node.parent)].children.push_back(static_cast<int>(tree.nodes.size()));
      }
      layer.push_back(static_cast<int>(tree.nodes.size()));
      tree.nodes.push_back(node);
    }
    std::vector<NodeRef> column;
    for (int n : layer) column.push_back({0, n});
    std::shuffle(column.begin(), column.end(), rng);
    out.columns[static_cast<std::size_t>(h)] = column;
    tree.layers.push_back(layer);
  }
  return out;
}

inline std::vector<int> position_in_columns(const ActorTree& tree, const ColumnOrders& columns, int tree_index) {
  std::vector<int> pos(tree.nodes.size(), -1);
  for (const auto& column : columns)
    for (std::size_t i = 0; i < column.size(); ++i)
      if (column[i].tree == tree_index) pos[static_cast<std::size_t>(column[i].node)] = static_cast<int>(i);
  return pos;
}

// Same-tree, same-gap segment pairs that intersect, by explicit segment geometry.
inline std::size_t segment_self_crossings(const ActorTree& tree, const std::vector<double>& y) {
  std::size_t count = 0;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t n = 0; n < tree.nodes.size(); ++n)
    if (tree.nodes[n].parent != kRoot) edges.push_back({tree.nodes[n].parent, static_cast<int>(n)});
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto [p1, c1] = edges[i];
      const auto [p2, c2] = edges[j];
      if (tree.nodes[static_cast<std::size_t>(p1)].time != tree.nodes[static_cast<std::size_t>(p2)].time) continue;
      if (p1 == p2) continue;
      const double top = y[static_cast<std::size_t>(p1)] - y[static_cast<std::size_t>(p2)];
      const double bottom = y[static_cast<std::size_t>(c1)] - y[static_cast<std::size_t>(c2)];
      if ((top < 0 && bottom > 0) || (top > 0 && bottom < 0)) ++count;
    }
  return count;
}

inline std::vector<int> degree_multiset(const ActorTree& tree) {
  std::vector<int> degrees;
  for (const auto& node : tree.nodes) degrees.push_back(static_cast<int>(node.children.size()));
  std::sort(degrees.begin(), degrees.end());
  return degrees;
}

inline std::vector<int> degree_per_node(const ActorTree& tree) {
  std::vector<int> degrees;
  for (const auto& node : tree.nodes) degrees.push_back(static_cast<int>(node.children.size()));
  return degrees;
}

}  // namespace storytree::testing
