// Command-line front end: layout, render, metrics, derive.
//
// Exit codes: 0 success, 1 invalid input (syntax, schema, validation),
// 2 I/O failure. Usage errors get CLI11's non-zero codes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "storytree/storytree.hpp"

namespace {

struct IoError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError{"cannot open '" + path + "'"};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError{"cannot read '" + path + "'"};
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError{"cannot create '" + path + "'"};
  out << text;
  out.flush();
  if (!out) throw IoError{"cannot write '" + path + "'"};
}

storytree::SearchBudget parse_budget(const std::string& text) {
  storytree::SearchBudget budget;
  int lines = 0, columns = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d%c", &lines, &columns, &tail) != 2 || lines < 0 || columns < 0)
    throw CLI::ValidationError("--exact-budget", "expected L,C with non-negative integers, got '" + text + "'");
  budget.max_lines = lines;
  budget.max_columns = columns;
  return budget;
}

void add_layout_flags(CLI::App* command, storytree::LayoutParams& params) {
  command->add_option("--unit", params.unit, "Vertical spacing unit");
  command->add_option("--gap-in", params.gap_in, "Gap between members of one group, in units");
  command->add_option("--gap-out", params.gap_out, "Gap between blocks, in units");
  command->add_option("--rounds", params.smoothing_rounds, "Smoothing rounds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Storyline layouts for actors that may sit in several groups at once"};
  app.require_subcommand(1);

  std::string budget_text;
  app.add_option("--exact-budget", budget_text, "Exact crossing search limits as LINES,COLUMNS (default 8,12)");

  storytree::PipelineOptions options;
  storytree::RenderOptions render;
  std::string input, output;

  auto* layout_cmd = app.add_subcommand("layout", "Run the pipeline and write layout + metrics JSON");
  layout_cmd->add_option("instance", input, "Instance JSON")->required();
  layout_cmd->add_option("-o,--output", output, "Output JSON")->required();
  add_layout_flags(layout_cmd, options.layout);

  bool smooth = false, hulls = false, no_labels = false;
  auto* render_cmd = app.add_subcommand("render", "Run the pipeline and write an SVG");
  render_cmd->add_option("instance", input, "Instance JSON")->required();
  render_cmd->add_option("-o,--output", output, "Output SVG")->required();
  render_cmd->add_option("--column-width", render.column_width, "Pixels between columns");
  render_cmd->add_option("--row-unit", render.row_unit, "Pixels per vertical unit");
  render_cmd->add_flag("--smooth", smooth, "Cubic curves instead of straight segments");
  render_cmd->add_flag("--hulls", hulls, "Shade group blocks");
  render_cmd->add_flag("--no-labels", no_labels, "Omit actor names");
  add_layout_flags(render_cmd, options.layout);

  auto* metrics_cmd = app.add_subcommand("metrics", "Print the metrics report as JSON");
  metrics_cmd->add_option("instance", input, "Instance JSON")->required();
  add_layout_flags(metrics_cmd, options.layout);

  auto* derive_cmd = app.add_subcommand("derive", "Build an instance from publication records");
  derive_cmd->add_option("publications", input, "Publications JSON")->required();
  derive_cmd->add_option("-o,--output", output, "Output instance JSON")->required();

  try {
    app.parse(argc, argv);
    if (!budget_text.empty()) options.search = parse_budget(budget_text);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (derive_cmd->parsed()) {
      const auto instance = storytree::derive_groups(storytree::parse_publications(read_file(input)));
      write_file(output, storytree::serialize_instance(instance));
      return 0;
    }

    const auto instance = storytree::parse_instance(read_file(input));
    const auto result = storytree::run_pipeline(instance, options);
    if (layout_cmd->parsed()) {
      write_file(output, storytree::layout_json(result.layout, result.trees, result.metrics).dump(2) + "\n");
    } else if (render_cmd->parsed()) {
      render.curve = smooth ? storytree::Curve::Smooth : storytree::Curve::Straight;
      render.show_group_hulls = hulls;
      render.label_actors = !no_labels;
      write_file(output, storytree::render_svg(result.layout, result.trees, instance, render));
    } else {
      std::cout << storytree::metrics_json(result.metrics).dump(2) << "\n";
    }
    return 0;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 2;
  } catch (const storytree::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
