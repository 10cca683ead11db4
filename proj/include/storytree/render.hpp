#pragma once

// SVG 1.1 rendering of a finished layout.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "storytree/crossmin.hpp"
#include "storytree/error.hpp"
#include "storytree/layout.hpp"
#include "storytree/model.hpp"

namespace storytree {

enum class Curve { Straight, Smooth };

struct RenderOptions {
  double column_width = 80.0;  // px per layout x unit
  double row_unit = 12.0;      // px per layout y unit
  Curve curve = Curve::Straight;
  bool show_group_hulls = false;
  bool label_actors = true;
  double margin_left = 120.0;
  double margin_top = 30.0;
};

inline constexpr std::array<std::string_view, 12> kPalette = {
    "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c", "#fb9a99", "#e31a1c",
    "#fdbf6f", "#ff7f00", "#cab2d6", "#6a3d9a", "#b8b800", "#b15928",
};

namespace detail {

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", value);
  std::string text = buffer;
  if (text == "-0.00") text = "0.00";
  return text;
}

}  // namespace detail

inline std::string actor_color(const StorylineInstance& instance, int actor) {
  const auto& a = instance.actors[static_cast<std::size_t>(actor)];
  if (a.color) return *a.color;
  return std::string(kPalette[static_cast<std::size_t>(actor) % kPalette.size()]);
}

/// Pixel coordinates of a node in the rendered document.
inline std::pair<double, double> svg_position(const Layout& layout, const Forest& trees, NodeRef ref, const RenderOptions& options) {
  const int h = trees[static_cast<std::size_t>(ref.tree)].nodes[static_cast<std::size_t>(ref.node)].time;
  return {options.margin_left + layout.x[static_cast<std::size_t>(h)] * options.column_width,
          options.margin_top + layout.y_of(ref) * options.row_unit};
}

/// One <g class="actor"> per tree holding one polyline (or cubic path) per
/// branch; a branch that leaves a branching node starts at that node's point.
inline std::string render_svg(const Layout& layout, const Forest& trees, const StorylineInstance& instance,
                              const RenderOptions& options = {}) {
  if (!(options.column_width > 0) || !(options.row_unit > 0) || options.margin_left < 0 || options.margin_top < 0)
    throw Error(ErrorKind::BadOptions, "column width and row unit must be positive");

  double max_y = 0.0;
  for (const auto& ys : layout.y)
    for (double y : ys) max_y = std::max(max_y, y);
  const double max_x = layout.x.empty() ? 0.0 : layout.x.back();
  const double width = options.margin_left + max_x * options.column_width + 60.0;
  const double height = options.margin_top + max_y * options.row_unit + 50.0;
  const double axis_y = height - 20.0;
  auto point = [&](NodeRef ref) { return svg_position(layout, trees, ref, options); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::num(width) << "\" height=\""
      << detail::num(height) << "\" viewBox=\"0 0 " << detail::num(width) << " " << detail::num(height) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (options.show_group_hulls) {
    svg << "<g class=\"hulls\" fill=\"#888888\" fill-opacity=\"0.15\" stroke=\"none\">\n";
    const double half = 0.25 * options.column_width;
    const double pad = 0.5 * options.row_unit;
    for (std::size_t g = 0; g < instance.groups.size(); ++g) {
      std::vector<std::pair<double, double>> top, bottom;
      for (int h = instance.groups[g].begin; h <= instance.groups[g].end; ++h) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (auto ref : layout.columns[static_cast<std::size_t>(h)]) {
          if (trees[static_cast<std::size_t>(ref.tree)].nodes[static_cast<std::size_t>(ref.node)].group != static_cast<int>(g)) continue;
          lo = std::min(lo, point(ref).second);
          hi = std::max(hi, point(ref).second);
        }
        if (lo > hi) continue;
        const double x = options.margin_left + layout.x[static_cast<std::size_t>(h)] * options.column_width;
        top.push_back({x - half, lo - pad});
        top.push_back({x + half, lo - pad});
        bottom.push_back({x - half, hi + pad});
        bottom.push_back({x + half, hi + pad});
      }
      if (top.empty()) continue;
      svg << "<polygon data-group=\"" << detail::xml_escape(instance.groups[g].id) << "\" points=\"";
      for (const auto& [x, y] : top) svg << detail::num(x) << "," << detail::num(y) << " ";
      for (auto it = bottom.rbegin(); it != bottom.rend(); ++it) svg << detail::num(it->first) << "," << detail::num(it->second) << " ";
      svg << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"axis\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\" fill=\"#444444\">\n";
  for (std::size_t h = 0; h < layout.x.size() && h < instance.time_axis.labels.size(); ++h)
    svg << "<text x=\"" << detail::num(options.margin_left + layout.x[h] * options.column_width) << "\" y=\""
        << detail::num(axis_y) << "\">" << detail::xml_escape(instance.time_axis.labels[h]) << "</text>\n";
  svg << "</g>\n";

  const auto paths = decompose_to_paths(trees);
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& tree = trees[t];
    const auto color = actor_color(instance, tree.actor);
    svg << "<g class=\"actor\" data-actor=\"" << detail::xml_escape(tree.actor_id) << "\" stroke=\"" << color
        << "\" stroke-width=\"2.5\" stroke-linecap=\"round\" stroke-linejoin=\"round\" fill=\"none\">\n";
    for (const auto& path : paths) {
      if (path.tree != static_cast<int>(t)) continue;
      std::vector<std::pair<double, double>> pts;
      for (int n : path.nodes) pts.push_back(point({static_cast<int>(t), n}));
      if (pts.size() == 1) {
        svg << "<circle cx=\"" << detail::num(pts[0].first) << "\" cy=\"" << detail::num(pts[0].second)
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      } else if (options.curve == Curve::Straight) {
        svg << "<polyline points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
          svg << (i ? " " : "") << detail::num(pts[i].first) << "," << detail::num(pts[i].second);
        svg << "\"/>\n";
      } else {
        svg << "<path d=\"M " << detail::num(pts[0].first) << "," << detail::num(pts[0].second);
        for (std::size_t i = 1; i < pts.size(); ++i) {
          const double mid = 0.5 * (pts[i - 1].first + pts[i].first);
          svg << " C " << detail::num(mid) << "," << detail::num(pts[i - 1].second) << " " << detail::num(mid) << ","
              << detail::num(pts[i].second) << " " << detail::num(pts[i].first) << "," << detail::num(pts[i].second);
        }
        svg << "\"/>\n";
      }
    }
    svg << "</g>\n";
  }

  if (options.label_actors) {
    svg << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
    for (const auto& tree : trees) {
      const int t = static_cast<int>(&tree - trees.data());
      const auto [x, y] = point({t, tree.layers.front().front()});
      svg << "<text x=\"" << detail::num(x - 6.0) << "\" y=\"" << detail::num(y + 4.0) << "\" fill=\""
          << actor_color(instance, tree.actor) << "\">"
          << detail::xml_escape(instance.actors[static_cast<std::size_t>(tree.actor)].display_name) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace storytree
