#pragma once

// Branch permutation: path decomposition of actor trees, block-crossing
// minimizing column orders under group contiguity, and recombination of
// duplicated branching nodes.

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "storytree/error.hpp"
#include "storytree/model.hpp"

namespace storytree {

struct BlockCrossings {
  std::size_t count = 0;
  bool exact = true;  // false: greedy upper bound
  bool operator==(const BlockCrossings&) const = default;
};

namespace detail {

// Orders of this many elements or fewer get exact block-transposition distances.
inline constexpr int kExactBlockLimit = 8;

inline std::size_t factorial(int n) {
  std::size_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

inline std::size_t lehmer_rank(std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  std::size_t rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(i)]) ++smaller;
    rank = rank * static_cast<std::size_t>(n - i) + static_cast<std::size_t>(smaller);
  }
  return rank;
}

// Swap the adjacent runs [i, j) and [j, k).
template <typename T>
void swap_blocks(std::vector<T>& v, std::size_t i, std::size_t j, std::size_t k) {
  std::rotate(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(j),
              v.begin() + static_cast<std::ptrdiff_t>(k));
}

template <typename Visit>
void for_each_block_move(std::size_t n, Visit&& visit) {
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k <= n; ++k) visit(i, j, k);
}

// Distance from the identity to every permutation of n elements, indexed by Lehmer rank.
inline const std::vector<std::uint8_t>& block_distance_table(int n) {
  static std::array<std::vector<std::uint8_t>, kExactBlockLimit + 1> tables;
  static std::array<std::once_flag, kExactBlockLimit + 1> once;
  std::call_once(once[static_cast<std::size_t>(n)], [n] {
    auto& table = tables[static_cast<std::size_t>(n)];
    table.assign(factorial(n), std::numeric_limits<std::uint8_t>::max());
    std::vector<int> start(static_cast<std::size_t>(n));
    std::iota(start.begin(), start.end(), 0);
    table[lehmer_rank(start)] = 0;
    std::deque<std::vector<int>> queue{start};
    while (!queue.empty()) {
      auto current = std::move(queue.front());
      queue.pop_front();
      const auto d = table[lehmer_rank(current)];
      for_each_block_move(current.size(), [&](std::size_t i, std::size_t j, std::size_t k) {
        auto next = current;
        swap_blocks(next, i, j, k);
        auto& slot = table[lehmer_rank(next)];
        if (slot == std::numeric_limits<std::uint8_t>::max()) {
          slot = static_cast<std::uint8_t>(d + 1);
          queue.push_back(std::move(next));
        }
      });
    }
  });
  return tables[static_cast<std::size_t>(n)];
}

// Repeatedly moves the maximal run that starts with the first misplaced value
// into place. Each move is one block transposition, so this bounds the distance.
inline std::size_t greedy_block_sort(std::vector<int> perm) {
  std::size_t moves = 0;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] == static_cast<int>(k)) continue;
    std::size_t j = k + 1;
    while (perm[j] != static_cast<int>(k)) ++j;
    std::size_t end = j + 1;
    while (end < perm.size() && perm[end] == perm[end - 1] + 1) ++end;
    swap_blocks(perm, k, j, end);
    ++moves;
  }
  return moves;
}

inline BlockCrossings block_distance_to_identity(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  if (n <= kExactBlockLimit) return {block_distance_table(n)[lehmer_rank(perm)], true};
  const auto bound = greedy_block_sort(perm);
  // A greedy result of 0 or 1 is always optimal.
  return {bound, bound <= 1};
}

inline std::size_t count_inversions(std::vector<int> perm) {
  std::size_t inversions = 0;
  std::vector<int> buffer(perm.size());
  for (std::size_t width = 1; width < perm.size(); width *= 2) {
    for (std::size_t lo = 0; lo < perm.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, perm.size());
      const std::size_t hi = std::min(lo + 2 * width, perm.size());
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (perm[i] <= perm[j]) {
          buffer[out++] = perm[i++];
        } else {
          inversions += mid - i;
          buffer[out++] = perm[j++];
        }
      }
      while (i < mid) buffer[out++] = perm[i++];
      while (j < hi) buffer[out++] = perm[j++];
    }
    perm.swap(buffer);
  }
  return inversions;
}

// Expresses `b` in the labels of `a` (a[i] -> i).
template <std::totally_ordered T>
std::vector<int> relative_permutation(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::ElementMismatch, "orders have different lengths");
  std::map<T, int> index;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!index.emplace(a[i], static_cast<int>(i)).second)
      throw Error(ErrorKind::ElementMismatch, "duplicate element in first order");
  std::vector<int> perm;
  perm.reserve(b.size());
  std::vector<bool> used(a.size(), false);
  for (const auto& element : b) {
    auto it = index.find(element);
    if (it == index.end()) throw Error(ErrorKind::ElementMismatch, "element missing from first order");
    if (used[static_cast<std::size_t>(it->second)]) throw Error(ErrorKind::ElementMismatch, "duplicate element in second order");
    used[static_cast<std::size_t>(it->second)] = true;
    perm.push_back(it->second);
  }
  return perm;
}

}  // namespace detail

/// Number of element pairs that appear in opposite relative order.
template <std::totally_ordered T>
std::size_t count_line_crossings(std::span<const T> order_a, std::span<const T> order_b) {
  return detail::count_inversions(detail::relative_permutation(order_a, order_b));
}

template <std::totally_ordered T>
std::size_t count_line_crossings(const std::vector<T>& order_a, const std::vector<T>& order_b) {
  return count_line_crossings(std::span<const T>(order_a), std::span<const T>(order_b));
}

/// Minimum number of swaps of two adjacent contiguous runs turning `order_a`
/// into `order_b`. Exact up to eight elements; above that a greedy upper bound
/// flagged with exact = false.
template <std::totally_ordered T>
BlockCrossings count_block_crossings(std::span<const T> order_a, std::span<const T> order_b) {
  return detail::block_distance_to_identity(detail::relative_permutation(order_a, order_b));
}

template <std::totally_ordered T>
BlockCrossings count_block_crossings(const std::vector<T>& order_a, const std::vector<T>& order_b) {
  return count_block_crossings(std::span<const T>(order_a), std::span<const T>(order_b));
}

// ---------------------------------------------------------------------------
// Path decomposition

// One line of the classical storyline the optimizer sees. A path that starts
// at a branching node begins with a duplicate of that node (copy_head), which
// is merged back into the original by recombine_paths.
struct PathLine {
  int id = 0;
  int tree = 0;
  std::string actor_id;
  Interval span;
  std::vector<int> nodes;  // tree node per instant, nodes[h - span.first]
  bool copy_head = false;
  std::optional<int> inherited_group;  // group of the head duplicate, if it may keep it

  int node_at(int h) const { return nodes.at(static_cast<std::size_t>(h - span.first)); }
  bool alive_at(int h) const { return span.contains(h); }

  // Group the line belongs to at column h for contiguity purposes.
  int group_at(const Forest& trees, int h) const {
    if (copy_head && h == span.first) return inherited_group.value_or(kNoGroup);
    return trees[static_cast<std::size_t>(tree)].nodes[static_cast<std::size_t>(node_at(h))].group;
  }
};

namespace detail {

// The child that carries the path on: the one continuing the parent's group,
// else the one with the smallest group id.
inline int continuing_child(const ActorTree& tree, int node) {
  const auto& v = tree.nodes[static_cast<std::size_t>(node)];
  int best = -1;
  for (int c : v.children) {
    const auto& child = tree.nodes[static_cast<std::size_t>(c)];
    if (v.group != kNoGroup && child.group == v.group) return c;
    if (best < 0 || child.group_id < tree.nodes[static_cast<std::size_t>(best)].group_id) best = c;
  }
  return best;
}

// The duplicate head may join the branching node's group unless the path would
// then sit in a second group at a later instant while that group is still active
// for the actor.
inline std::optional<int> inheritable_group(const ActorTree& tree, const std::vector<int>& path_nodes) {
  const int head_group = tree.nodes[static_cast<std::size_t>(path_nodes.front())].group;
  if (head_group == kNoGroup) return std::nullopt;
  for (std::size_t i = 1; i < path_nodes.size(); ++i) {
    const auto& node = tree.nodes[static_cast<std::size_t>(path_nodes[i])];
    bool group_active = false;
    for (int n : tree.at(node.time))
      if (tree.nodes[static_cast<std::size_t>(n)].group == head_group) group_active = true;
    if (group_active && node.group != kNoGroup && node.group != head_group) return std::nullopt;
  }
  return head_group;
}

}  // namespace detail

/// Edge-disjoint path cover of every tree: at a node with k children one path
/// continues and k - 1 new paths start from duplicates of the node.
inline std::vector<PathLine> decompose_to_paths(const Forest& trees) {
  std::vector<PathLine> paths;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& tree = trees[t];
    struct Head {
      int start;
      int branch;  // duplicated branching node, or -1
    };
    std::deque<Head> pending;
    for (int n : tree.layers.front()) pending.push_back({n, -1});

    while (!pending.empty()) {
      auto head = pending.front();
      pending.pop_front();
      PathLine line;
      line.id = static_cast<int>(paths.size());
      line.tree = static_cast<int>(t);
      line.actor_id = tree.actor_id;
      if (head.branch >= 0) {
        line.copy_head = true;
        line.nodes.push_back(head.branch);
      }
      int current = head.start;
      while (true) {
        line.nodes.push_back(current);
        const int next = detail::continuing_child(tree, current);
        if (next < 0) break;
        std::vector<int> others;
        for (int c : tree.nodes[static_cast<std::size_t>(current)].children)
          if (c != next) others.push_back(c);
        std::sort(others.begin(), others.end(), [&](int a, int b) {
          return tree.nodes[static_cast<std::size_t>(a)].group_id < tree.nodes[static_cast<std::size_t>(b)].group_id;
        });
        for (int c : others) pending.push_back({c, current});
        current = next;
      }
      const auto& front = tree.nodes[static_cast<std::size_t>(line.nodes.front())];
      line.span = Interval{front.time, front.time + static_cast<int>(line.nodes.size()) - 1};
      if (line.copy_head) line.inherited_group = detail::inheritable_group(tree, line.nodes);
      paths.push_back(std::move(line));
    }
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Column-order optimization

// A classical storyline reduced to what the optimizer needs: which lines are
// alive per column and which of them must be contiguous.
struct LineColumn {
  std::vector<int> lines;
  std::vector<std::vector<int>> blocks;
};

struct LineSystem {
  int line_count = 0;
  std::vector<LineColumn> columns;
  std::vector<int> anchor;  // line whose position a fresh line should start near, or -1
};

struct PermutationSchedule {
  std::vector<std::vector<int>> columns;  // line ids, top to bottom
  std::size_t block_crossings = 0;
  bool exact = false;  // true when block_crossings is a proven minimum
};

struct SearchBudget {
  int max_lines = 8;     // most lines alive in one column
  int max_columns = 12;
  std::size_t max_expansions = 200000;
};

namespace detail {

inline std::vector<int> restrict_to(const std::vector<int>& order, const std::vector<char>& keep) {
  std::vector<int> out;
  for (int line : order)
    if (keep[static_cast<std::size_t>(line)]) out.push_back(line);
  return out;
}

inline bool is_contiguous(const std::vector<int>& order, const std::vector<std::vector<int>>& blocks, int line_count) {
  std::vector<int> position(static_cast<std::size_t>(line_count), -1);
  for (std::size_t i = 0; i < order.size(); ++i) position[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  for (const auto& block : blocks) {
    int lo = std::numeric_limits<int>::max(), hi = -1;
    for (int line : block) {
      lo = std::min(lo, position[static_cast<std::size_t>(line)]);
      hi = std::max(hi, position[static_cast<std::size_t>(line)]);
    }
    if (hi - lo + 1 != static_cast<int>(block.size())) return false;
  }
  return true;
}

inline void check_system(const LineSystem& system) {
  for (std::size_t h = 0; h < system.columns.size(); ++h) {
    const auto& column = system.columns[h];
    std::vector<int> membership(static_cast<std::size_t>(system.line_count), 0);
    std::vector<char> live(static_cast<std::size_t>(system.line_count), 0);
    for (int line : column.lines) {
      if (line < 0 || line >= system.line_count || live[static_cast<std::size_t>(line)])
        throw Error(ErrorKind::InconsistentInput, "bad line id in column " + std::to_string(h));
      live[static_cast<std::size_t>(line)] = 1;
    }
    for (const auto& block : column.blocks)
      for (int line : block) {
        if (line < 0 || line >= system.line_count || !live[static_cast<std::size_t>(line)])
          throw Error(ErrorKind::InconsistentInput, "block member not alive in column " + std::to_string(h));
        if (++membership[static_cast<std::size_t>(line)] > 1)
          throw Error(ErrorKind::InfeasibleContiguity,
                      "line " + std::to_string(line) + " must sit in two blocks at column " + std::to_string(h));
      }
  }
}

// Orders the column's units (blocks and free lines) by mean key, members by key.
inline std::vector<int> arrange(const LineColumn& column, const std::vector<double>& key, int line_count) {
  std::vector<int> unit_of(static_cast<std::size_t>(line_count), -1);
  std::vector<std::vector<int>> units;
  for (const auto& block : column.blocks) {
    for (int line : block) unit_of[static_cast<std::size_t>(line)] = static_cast<int>(units.size());
    units.push_back(block);
  }
  for (int line : column.lines)
    if (unit_of[static_cast<std::size_t>(line)] < 0) {
      unit_of[static_cast<std::size_t>(line)] = static_cast<int>(units.size());
      units.push_back({line});
    }
  auto by_key = [&](int a, int b) {
    const double ka = key[static_cast<std::size_t>(a)], kb = key[static_cast<std::size_t>(b)];
    return ka != kb ? ka < kb : a < b;
  };
  struct Unit {
    double key;
    int tie;
    std::vector<int> lines;
  };
  std::vector<Unit> ordered;
  for (auto& members : units) {
    std::sort(members.begin(), members.end(), by_key);
    double sum = 0;
    for (int line : members) sum += key[static_cast<std::size_t>(line)];
    ordered.push_back({sum / static_cast<double>(members.size()), *std::min_element(members.begin(), members.end()),
                       members});
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Unit& a, const Unit& b) { return a.key != b.key ? a.key < b.key : a.tie < b.tie; });
  std::vector<int> order;
  for (const auto& unit : ordered) order.insert(order.end(), unit.lines.begin(), unit.lines.end());
  return order;
}

inline std::vector<char> common_mask(const LineSystem& system, std::size_t a, std::size_t b) {
  std::vector<char> in_a(static_cast<std::size_t>(system.line_count), 0), both(static_cast<std::size_t>(system.line_count), 0);
  for (int line : system.columns[a].lines) in_a[static_cast<std::size_t>(line)] = 1;
  for (int line : system.columns[b].lines)
    if (in_a[static_cast<std::size_t>(line)]) both[static_cast<std::size_t>(line)] = 1;
  return both;
}

inline BlockCrossings transition_cost(const std::vector<int>& from, const std::vector<int>& to, const std::vector<char>& common) {
  const auto a = restrict_to(from, common);
  const auto b = restrict_to(to, common);
  return count_block_crossings(a, b);
}

}  // namespace detail

/// Total block crossings between consecutive columns, over the lines alive in both.
inline BlockCrossings schedule_block_crossings(const LineSystem& system, const std::vector<std::vector<int>>& columns) {
  BlockCrossings total;
  for (std::size_t h = 0; h + 1 < columns.size(); ++h) {
    const auto step = detail::transition_cost(columns[h], columns[h + 1], detail::common_mask(system, h, h + 1));
    total.count += step.count;
    total.exact = total.exact && step.exact;
  }
  return total;
}

/// Barycenter sweeps: left to right then right to left, four rounds, blocks
/// moved as units by the mean barycenter of their members. Keeps the best
/// schedule seen.
inline PermutationSchedule barycenter_schedule(const LineSystem& system) {
  detail::check_system(system);
  const auto n = static_cast<std::size_t>(system.line_count);
  const std::size_t T = system.columns.size();
  std::vector<double> key(n);
  std::iota(key.begin(), key.end(), 0.0);

  std::vector<std::vector<int>> columns(T);
  for (std::size_t h = 0; h < T; ++h) columns[h] = detail::arrange(system.columns[h], key, system.line_count);

  auto positions = [&](const std::vector<int>& order) {
    std::vector<double> pos(n, -1.0);
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<double>(i);
    return pos;
  };
  auto sweep_column = [&](std::size_t h, std::size_t reference) {
    const auto ref = positions(columns[reference]);
    const auto own = positions(columns[h]);
    for (int line : system.columns[h].lines) {
      const auto l = static_cast<std::size_t>(line);
      const int anchor = system.anchor.empty() ? -1 : system.anchor[l];
      if (ref[l] >= 0)
        key[l] = ref[l];
      else if (anchor >= 0 && ref[static_cast<std::size_t>(anchor)] >= 0)
        key[l] = ref[static_cast<std::size_t>(anchor)] + 0.5;
      else
        key[l] = own[l];
    }
    columns[h] = detail::arrange(system.columns[h], key, system.line_count);
  };

  auto best = columns;
  auto best_cost = schedule_block_crossings(system, columns);
  for (int round = 0; round < 4; ++round) {
    for (std::size_t h = 1; h < T; ++h) sweep_column(h, h - 1);
    auto cost = schedule_block_crossings(system, columns);
    if (cost.count < best_cost.count) best = columns, best_cost = cost;
    for (std::size_t h = T; h-- > 1;) sweep_column(h - 1, h);
    cost = schedule_block_crossings(system, columns);
    if (cost.count < best_cost.count) best = columns, best_cost = cost;
  }
  return {std::move(best), best_cost.count, false};
}

namespace detail {

// Iterative deepening over the total number of block crossings. The state
// after fixing column h is just its order restricted to the lines that carry
// on into h + 1, so failed (column, restriction) pairs are remembered together
// with the largest budget they failed under.
class ExactScheduleSearch {
 public:
  ExactScheduleSearch(const LineSystem& system, std::size_t max_expansions)
      : system_(system), max_expansions_(max_expansions) {
    const std::size_t T = system.columns.size();
    const auto n = static_cast<std::size_t>(system.line_count);
    carried_in_.assign(T, std::vector<char>(n, 0));
    carried_out_.assign(T, std::vector<char>(n, 0));
    fresh_.assign(T, {});
    for (std::size_t h = 0; h < T; ++h) {
      if (h > 0) carried_in_[h] = common_mask(system, h - 1, h);
      if (h + 1 < T) carried_out_[h] = common_mask(system, h, h + 1);
      for (int line : system.columns[h].lines)
        if (!carried_in_[h][static_cast<std::size_t>(line)]) fresh_[h].push_back(line);
      std::sort(fresh_[h].begin(), fresh_[h].end());
    }
    chosen_.assign(T, {});
  }

  // Smallest total below `upper_bound`, or nullopt if none exists.
  // Throws BudgetExhausted when the expansion limit is hit.
  std::optional<std::size_t> run(std::size_t upper_bound) {
    for (std::size_t bound = 0; bound < upper_bound; ++bound)
      if (visit(0, {}, bound)) return bound;
    return std::nullopt;
  }

  const std::vector<std::vector<int>>& schedule() const { return chosen_; }

  struct BudgetExhausted {};

 private:
  bool visit(std::size_t h, const std::vector<int>& previous, std::size_t remaining) {
    if (h == system_.columns.size()) return true;
    tick();

    std::set<std::vector<int>> tried;
    auto attempt = [&](const std::vector<int>& order, std::size_t left) {
      tick();
      if (!is_contiguous(order, system_.columns[h].blocks, system_.line_count)) return false;
      auto carried = restrict_to(order, carried_out_[h]);
      if (!tried.insert(carried).second) return false;
      auto memo_key = std::make_pair(h, carried);
      auto failed = failed_.find(memo_key);
      if (failed != failed_.end() && failed->second >= static_cast<long>(left)) return false;
      if (visit(h + 1, order, left)) {
        chosen_[h] = order;
        return true;
      }
      failed_[memo_key] = std::max(failed == failed_.end() ? -1L : failed->second, static_cast<long>(left));
      return false;
    };

    if (h == 0 || previous.empty()) {
      // No carried lines: every feasible arrangement is free of charge.
      auto order = system_.columns[h].lines;
      std::sort(order.begin(), order.end());
      do {
        if (attempt(order, remaining)) return true;
      } while (std::next_permutation(order.begin(), order.end()));
      return false;
    }

    // Orders of the carried lines within `remaining` block moves, by distance.
    const auto start = restrict_to(previous, carried_in_[h]);
    std::vector<std::vector<int>> layer{start};
    std::set<std::vector<int>> seen{start};
    for (std::size_t d = 0; d <= remaining; ++d) {
      for (const auto& carried : layer)
        if (extend(h, carried, [&](const std::vector<int>& order) { return attempt(order, remaining - d); })) return true;
      if (d == remaining) break;
      std::vector<std::vector<int>> next;
      for (const auto& order : layer)
        for_each_block_move(order.size(), [&](std::size_t i, std::size_t j, std::size_t k) {
          tick();
          auto moved = order;
          swap_blocks(moved, i, j, k);
          if (seen.insert(moved).second) next.push_back(std::move(moved));
        });
      if (next.empty()) break;
      layer = std::move(next);
    }
    return false;
  }

  void tick() {
    if (++expansions_ > max_expansions_) throw BudgetExhausted{};
  }

  // Every interleaving of the carried order with every order of fresh lines.
  template <typename Try>
  bool extend(std::size_t h, const std::vector<int>& carried, Try&& try_order) {
    auto fresh = fresh_[h];
    do {
      std::vector<int> order;
      if (interleave(carried, 0, fresh, 0, order, try_order)) return true;
    } while (std::next_permutation(fresh.begin(), fresh.end()));
    return false;
  }

  template <typename Try>
  bool interleave(const std::vector<int>& a, std::size_t i, const std::vector<int>& b, std::size_t j,
                  std::vector<int>& out, Try& try_order) {
    if (i == a.size() && j == b.size()) return try_order(out);
    if (i < a.size()) {
      out.push_back(a[i]);
      if (interleave(a, i + 1, b, j, out, try_order)) return true;
      out.pop_back();
    }
    if (j < b.size()) {
      out.push_back(b[j]);
      if (interleave(a, i, b, j + 1, out, try_order)) return true;
      out.pop_back();
    }
    return false;
  }

  const LineSystem& system_;
  std::size_t max_expansions_;
  std::size_t expansions_ = 0;
  std::vector<std::vector<char>> carried_in_, carried_out_;
  std::vector<std::vector<int>> fresh_;
  std::vector<std::vector<int>> chosen_;
  std::map<std::pair<std::size_t, std::vector<int>>, long> failed_;
};

}  // namespace detail

/// Column orders minimizing total block crossings under group contiguity.
/// Exact within the budget; otherwise (or when the search runs out of
/// expansions) the barycenter schedule, flagged non-exact.
inline PermutationSchedule optimize_line_system(const LineSystem& system, const SearchBudget& budget = {}) {
  auto heuristic = barycenter_schedule(system);
  std::size_t widest = 0;
  for (const auto& column : system.columns) widest = std::max(widest, column.lines.size());
  if (widest > static_cast<std::size_t>(budget.max_lines) ||
      system.columns.size() > static_cast<std::size_t>(budget.max_columns) ||
      widest > static_cast<std::size_t>(detail::kExactBlockLimit))
    return heuristic;

  if (heuristic.block_crossings == 0) {
    heuristic.exact = true;
    return heuristic;
  }
  detail::ExactScheduleSearch search(system, budget.max_expansions);
  try {
    if (auto total = search.run(heuristic.block_crossings))
      return {search.schedule(), *total, true};
  } catch (const detail::ExactScheduleSearch::BudgetExhausted&) {
    return heuristic;
  }
  heuristic.exact = true;
  return heuristic;
}

/// The classical instance handed to the optimizer: one line per path, blocks
/// per group and column.
inline LineSystem line_system_from_paths(const std::vector<PathLine>& paths, const Forest& trees, int column_count) {
  LineSystem system;
  system.line_count = static_cast<int>(paths.size());
  system.columns.resize(static_cast<std::size_t>(column_count));
  system.anchor.assign(paths.size(), -1);

  std::map<std::pair<int, int>, int> owner;  // (tree, node) -> path holding the real node
  for (const auto& path : paths)
    for (std::size_t i = path.copy_head ? 1 : 0; i < path.nodes.size(); ++i) owner[{path.tree, path.nodes[i]}] = path.id;
  for (const auto& path : paths)
    if (path.copy_head) system.anchor[static_cast<std::size_t>(path.id)] = owner.at({path.tree, path.nodes.front()});

  for (int h = 0; h < column_count; ++h) {
    std::map<int, std::vector<int>> by_group;
    auto& column = system.columns[static_cast<std::size_t>(h)];
    for (const auto& path : paths) {
      if (!path.alive_at(h)) continue;
      column.lines.push_back(path.id);
      const int group = path.group_at(trees, h);
      if (group != kNoGroup) by_group[group].push_back(path.id);
    }
    for (auto& [group, members] : by_group)
      if (members.size() > 1) column.blocks.push_back(std::move(members));
  }
  return system;
}

inline PermutationSchedule optimize_permutations(const std::vector<PathLine>& paths, const Forest& trees,
                                                 const StorylineInstance& instance, const SearchBudget& budget = {}) {
  for (const auto& path : paths) {
    if (path.tree < 0 || static_cast<std::size_t>(path.tree) >= trees.size() || path.span.first < 0 ||
        path.span.last >= instance.time_axis.size())
      throw Error(ErrorKind::InconsistentInput, "path " + std::to_string(path.id) + " does not fit the instance");
  }
  return optimize_line_system(line_system_from_paths(paths, trees, instance.time_axis.size()), budget);
}

// ---------------------------------------------------------------------------
// Recombination

struct Recombined {
  Forest trees;          // children of every node sorted by their position (port order)
  ColumnOrders columns;  // node order per time index
  std::size_t rewired_ports = 0;  // crossing pairs among edges of merged nodes that were removed
};

/// Collapses every duplicated node onto the position of its real occurrence
/// and reorders the edges leaving each merged node by the position of their
/// children, which uncrosses edges that share the merged endpoint.
inline Recombined recombine_paths(const std::vector<PathLine>& paths, const PermutationSchedule& schedule, Forest trees) {
  Recombined out;
  out.columns.resize(schedule.columns.size());
  std::map<NodeRef, int> position;
  for (std::size_t h = 0; h < schedule.columns.size(); ++h) {
    for (int line : schedule.columns[h]) {
      const auto& path = paths.at(static_cast<std::size_t>(line));
      if (path.copy_head && path.span.first == static_cast<int>(h)) continue;
      NodeRef ref{path.tree, path.node_at(static_cast<int>(h))};
      position[ref] = static_cast<int>(out.columns[h].size());
      out.columns[h].push_back(ref);
    }
  }

  // Ports of each branching node as the optimizer left them: the position of
  // the line leaving through each child edge.
  std::map<std::pair<int, int>, int> line_position;  // (column, line) -> position
  for (std::size_t h = 0; h < schedule.columns.size(); ++h)
    for (std::size_t i = 0; i < schedule.columns[h].size(); ++i)
      line_position[{static_cast<int>(h), schedule.columns[h][i]}] = static_cast<int>(i);
  std::map<NodeRef, std::vector<std::pair<int, int>>> ports;  // node -> (line position, child position)
  for (const auto& path : paths) {
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
      const int h = path.span.first + static_cast<int>(i);
      const int line_pos = line_position.at({h, path.id});
      NodeRef parent{path.tree, path.nodes[i]};
      NodeRef child{path.tree, path.nodes[i + 1]};
      ports[parent].push_back({line_pos, position.at(child)});
    }
  }
  for (auto& [node, edges] : ports) {
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = a + 1; b < edges.size(); ++b)
        if ((edges[a].first < edges[b].first) != (edges[a].second < edges[b].second)) ++out.rewired_ports;
  }

  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t n = 0; n < trees[t].nodes.size(); ++n) {
      auto& children = trees[t].nodes[n].children;
      std::sort(children.begin(), children.end(), [&](int a, int b) {
        return position.at({static_cast<int>(t), a}) < position.at({static_cast<int>(t), b});
      });
    }
  out.trees = std::move(trees);
  return out;
}

}  // namespace storytree
