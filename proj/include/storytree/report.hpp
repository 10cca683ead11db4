#pragma once

// JSON views of metrics and layouts as written by the command-line tool.

#include <cstddef>
#include <map>
#include <string>

#include <json.hpp>

#include "storytree/layout.hpp"
#include "storytree/model.hpp"

namespace storytree {

inline nlohmann::json metrics_json(const MetricsReport& report) {
  return {
      {"line_crossings", report.line_crossings},
      {"block_crossings", report.block_crossings},
      {"block_crossings_exact", report.block_crossings_exact},
      {"wiggle_count", report.wiggle_count},
      {"wiggle_magnitude", report.wiggle_magnitude},
      {"white_space", report.white_space},
      {"planarity_violations", report.planarity_violations},
      {"continuity_violations", report.continuity_violations},
      {"branch_degree_excess", report.branch_degree_excess},
  };
}

/// Nodes are listed tree by tree in node order; edges refer to those indices.
inline nlohmann::json layout_json(const Layout& layout, const Forest& trees, const MetricsReport& report) {
  nlohmann::json nodes = nlohmann::json::array();
  std::map<NodeRef, std::size_t> index;
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t n = 0; n < trees[t].nodes.size(); ++n) {
      const auto& node = trees[t].nodes[n];
      index[{static_cast<int>(t), static_cast<int>(n)}] = nodes.size();
      nodes.push_back({{"actor", trees[t].actor_id},
                       {"time", node.time},
                       {"group", node.group == kNoGroup ? nlohmann::json(nullptr) : nlohmann::json(node.group_id)},
                       {"y", layout.y[t][n]}});
    }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [parent, child] : layout.edges) edges.push_back({index.at(parent), index.at(child)});
  return {{"x", layout.x}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"metrics", metrics_json(report)}};
}

}  // namespace storytree
