#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "storytree/error.hpp"

namespace storytree {

inline constexpr int kNoGroup = -1;  // group index of the ungrouped node u_{h,0}
inline constexpr int kRoot = -1;     // parent index of nodes hanging off the virtual root

struct TimeAxis {
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(labels.size()); }
  bool contains(int h) const { return h >= 0 && h < size(); }
  bool operator==(const TimeAxis&) const = default;
};

struct Actor {
  std::string id;
  std::string display_name;
  std::optional<std::string> color;  // "#rrggbb"
  bool operator==(const Actor&) const = default;
};

// A set of actors associated over the closed interval [begin, end] of time indices.
struct Group {
  std::string id;
  std::vector<std::string> members;
  int begin = 0;
  int end = 0;

  bool active_at(int h) const { return begin <= h && h <= end; }
  bool has_member(const std::string& actor) const {
    return std::find(members.begin(), members.end(), actor) != members.end();
  }
  bool operator==(const Group&) const = default;
};

// Actors may sit in several groups at the same instant; that is the whole point
// of drawing them as trees, so exclusivity is not checked anywhere.
struct StorylineInstance {
  TimeAxis time_axis;
  std::vector<Actor> actors;
  std::vector<Group> groups;

  std::optional<int> actor_index(const std::string& id) const {
    for (std::size_t i = 0; i < actors.size(); ++i)
      if (actors[i].id == id) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> group_index(const std::string& id) const {
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i].id == id) return static_cast<int>(i);
    return std::nullopt;
  }
  bool operator==(const StorylineInstance&) const = default;
};

struct Interval {
  int first = 0;
  int last = 0;
  bool contains(int h) const { return first <= h && h <= last; }
  bool operator==(const Interval&) const = default;
};

struct TreeNode {
  int time = 0;
  int group = kNoGroup;
  std::string group_id;  // empty for the ungrouped node, so it sorts first
  int parent = kRoot;
  std::vector<int> children;
};

// The tree of one actor. The root is virtual: nodes at the first life-time
// instant have parent kRoot and no node object stands for the root itself.
struct ActorTree {
  std::string actor_id;
  int actor = 0;
  int first = 0;
  int last = 0;
  std::vector<TreeNode> nodes;
  std::vector<std::vector<int>> layers;  // layers[h - first], ascending group id

  bool alive_at(int h) const { return first <= h && h <= last; }
  const std::vector<int>& at(int h) const { return layers.at(static_cast<std::size_t>(h - first)); }
  std::size_t edge_count() const { return nodes.size() - layers.front().size(); }
  int child_count(int node) const { return static_cast<int>(nodes[static_cast<std::size_t>(node)].children.size()); }
};

using Forest = std::vector<ActorTree>;

struct NodeRef {
  int tree = 0;
  int node = 0;
  auto operator<=>(const NodeRef&) const = default;
};

// Per time index, the vertical order (top to bottom) of every tree node alive there.
using ColumnOrders = std::vector<std::vector<NodeRef>>;

/// Checks every instance invariant and reports all violations at once.
/// Returns the instance unchanged when it is valid.
inline StorylineInstance validate_instance(StorylineInstance raw) {
  std::vector<Issue> issues;
  const int T = raw.time_axis.size();
  if (T == 0) issues.push_back({ErrorKind::TimeOutOfRange, "time_labels", "time axis is empty"});
  if (raw.groups.empty()) issues.push_back({ErrorKind::EmptyInput, "groups", "instance has no groups"});

  std::set<std::string> actor_ids;
  for (const auto& actor : raw.actors) {
    if (actor.id.empty()) issues.push_back({ErrorKind::SchemaError, "actors", "actor with empty id"});
    if (!actor_ids.insert(actor.id).second)
      issues.push_back({ErrorKind::DuplicateId, actor.id, "actor id appears more than once"});
  }

  std::set<std::string> group_ids;
  for (const auto& group : raw.groups) {
    if (!group_ids.insert(group.id).second)
      issues.push_back({ErrorKind::DuplicateId, group.id, "group id appears more than once"});
    if (group.members.empty()) issues.push_back({ErrorKind::EmptyMembers, group.id, "group has no members"});
    if (group.begin > group.end)
      issues.push_back({ErrorKind::TimeOutOfRange, group.id,
                        "begin " + std::to_string(group.begin) + " is after end " + std::to_string(group.end)});
    if (group.begin < 0 || group.end >= T)
      issues.push_back({ErrorKind::TimeOutOfRange, group.id,
                        "interval [" + std::to_string(group.begin) + ", " + std::to_string(group.end) +
                            "] outside time axis of " + std::to_string(T) + " instants"});
    std::set<std::string> seen;
    for (const auto& member : group.members) {
      if (!actor_ids.contains(member))
        issues.push_back({ErrorKind::UnknownActor, group.id, "member '" + member + "' is not an actor"});
      if (!seen.insert(member).second)
        issues.push_back({ErrorKind::DuplicateId, group.id, "member '" + member + "' listed twice"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return raw;
}

namespace detail {

inline int require_actor(const StorylineInstance& instance, const std::string& actor_id) {
  auto index = instance.actor_index(actor_id);
  if (!index) throw Error(ErrorKind::UnknownActor, "no actor '" + actor_id + "'");
  return *index;
}

// Group indices active for the actor at h, ascending by group id.
inline std::vector<int> active_group_indices(const StorylineInstance& instance, const std::string& actor_id, int h) {
  std::vector<int> out;
  for (std::size_t i = 0; i < instance.groups.size(); ++i) {
    const auto& g = instance.groups[i];
    if (g.active_at(h) && g.has_member(actor_id)) out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end(),
            [&](int a, int b) { return instance.groups[static_cast<std::size_t>(a)].id < instance.groups[static_cast<std::size_t>(b)].id; });
  return out;
}

}  // namespace detail

/// First and last instant at which the actor belongs to some group.
inline std::optional<Interval> life_time(const StorylineInstance& instance, const std::string& actor_id) {
  detail::require_actor(instance, actor_id);
  std::optional<Interval> span;
  for (const auto& g : instance.groups) {
    if (!g.has_member(actor_id)) continue;
    if (!span)
      span = Interval{g.begin, g.end};
    else
      span = Interval{std::min(span->first, g.begin), std::max(span->last, g.end)};
  }
  return span;
}

inline std::set<std::string> active_groups_at(const StorylineInstance& instance, const std::string& actor_id, int h) {
  detail::require_actor(instance, actor_id);
  if (!instance.time_axis.contains(h))
    throw Error(ErrorKind::TimeOutOfRange, "time index " + std::to_string(h) + " outside the time axis");
  std::set<std::string> out;
  for (int g : detail::active_group_indices(instance, actor_id, h)) out.insert(instance.groups[static_cast<std::size_t>(g)].id);
  return out;
}

/// Builds one tree per actor that belongs to at least one group.
///
/// Each life-time instant gets one node per active group (or a single
/// ungrouped node). A node whose group was already active for the actor one
/// instant earlier hangs off that group's previous node; every other node is
/// dealt round robin to the previous layer so that child counts there differ
/// by at most one. Orphans are taken in ascending group-id order and go to the
/// least-loaded previous node, ties broken by ascending group id.
inline Forest build_actor_trees(const StorylineInstance& instance) {
  Forest forest;
  for (std::size_t a = 0; a < instance.actors.size(); ++a) {
    const auto& actor = instance.actors[a];
    auto span = life_time(instance, actor.id);
    if (!span) continue;

    ActorTree tree;
    tree.actor_id = actor.id;
    tree.actor = static_cast<int>(a);
    tree.first = span->first;
    tree.last = span->last;

    for (int h = span->first; h <= span->last; ++h) {
      std::vector<int> layer;
      auto groups = detail::active_group_indices(instance, actor.id, h);
      if (groups.empty()) groups.push_back(kNoGroup);
      for (int g : groups) {
        TreeNode node;
        node.time = h;
        node.group = g;
        if (g != kNoGroup) node.group_id = instance.groups[static_cast<std::size_t>(g)].id;
        layer.push_back(static_cast<int>(tree.nodes.size()));
        tree.nodes.push_back(std::move(node));
      }

      if (h > span->first) {
        const auto& previous = tree.layers.back();
        std::map<int, int> previous_by_group;
        for (int p : previous) previous_by_group[tree.nodes[static_cast<std::size_t>(p)].group] = p;

        std::vector<int> orphans;
        for (int n : layer) {
          auto& node = tree.nodes[static_cast<std::size_t>(n)];
          auto it = node.group == kNoGroup ? previous_by_group.end() : previous_by_group.find(node.group);
          if (it != previous_by_group.end()) {
            node.parent = it->second;
            tree.nodes[static_cast<std::size_t>(it->second)].children.push_back(n);
          } else {
            orphans.push_back(n);
          }
        }
        for (int n : orphans) {
          int target = previous.front();
          for (int p : previous)
            if (tree.child_count(p) < tree.child_count(target)) target = p;
          tree.nodes[static_cast<std::size_t>(n)].parent = target;
          tree.nodes[static_cast<std::size_t>(target)].children.push_back(n);
        }
      }
      tree.layers.push_back(std::move(layer));
    }
    forest.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace storytree
