#pragma once

// Instance and publication file formats, and derivation of groups from
// yearly co-authorship.

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "storytree/error.hpp"
#include "storytree/model.hpp"

namespace storytree {

inline constexpr int kFormatVersion = 1;

struct PublicationRecord {
  int year = 0;
  std::vector<std::string> authors;
  std::optional<std::string> title;
};

// A publications file: records plus optional display data and year range.
struct PublicationSet {
  std::vector<PublicationRecord> records;
  std::vector<Actor> actors;
  std::optional<std::pair<int, int>> year_range;
};

namespace detail {

using nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

inline json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::SyntaxError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
  }
}

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::SchemaError, where + ": " + what);
}

inline void expect_object(const json& value, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!value.is_object()) schema_error(where, "expected an object");
  for (const auto& item : value.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      schema_error(where, "unknown field '" + item.key() + "'");
}

inline const json& required(const json& object, const std::string& key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) schema_error(where, "missing field '" + key + "'");
  return *it;
}

inline std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) schema_error(where, "expected a string");
  return value.get<std::string>();
}

inline int as_int(const json& value, const std::string& where) {
  if (!value.is_number_integer()) schema_error(where, "expected an integer");
  return value.get<int>();
}

inline std::vector<std::string> as_strings(const json& value, const std::string& where) {
  if (!value.is_array()) schema_error(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < value.size(); ++i) out.push_back(as_string(value[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline void check_format(const json& document) {
  if (auto it = document.find("format"); it != document.end() && as_int(*it, "format") != kFormatVersion)
    schema_error("format", "unsupported version " + it->dump());
}

inline Actor parse_actor(const json& value, const std::string& where) {
  expect_object(value, where, {"id", "name", "color"});
  Actor actor;
  actor.id = as_string(required(value, "id", where), where + ".id");
  actor.display_name = value.contains("name") ? as_string(value["name"], where + ".name") : actor.id;
  if (value.contains("color")) {
    auto color = as_string(value["color"], where + ".color");
    static const std::regex hex("#[0-9a-fA-F]{6}");
    if (!std::regex_match(color, hex)) schema_error(where + ".color", "expected #rrggbb, got '" + color + "'");
    actor.color = std::move(color);
  }
  return actor;
}

inline std::vector<Actor> parse_actors(const json& value, const std::string& where) {
  if (!value.is_array()) schema_error(where, "expected an array");
  std::vector<Actor> actors;
  for (std::size_t i = 0; i < value.size(); ++i) actors.push_back(parse_actor(value[i], where + "[" + std::to_string(i) + "]"));
  return actors;
}

inline json actor_json(const Actor& actor) {
  json out = {{"id", actor.id}, {"name", actor.display_name}};
  if (actor.color) out["color"] = *actor.color;
  return out;
}

}  // namespace detail

/// Parses and validates an instance document. Member lists are sorted.
inline StorylineInstance parse_instance(std::string_view text) {
  using detail::json;
  const json document = detail::parse_json(text);
  detail::expect_object(document, "document", {"format", "time_labels", "actors", "groups"});
  detail::check_format(document);

  StorylineInstance instance;
  instance.time_axis.labels = detail::as_strings(detail::required(document, "time_labels", "document"), "time_labels");
  instance.actors = detail::parse_actors(detail::required(document, "actors", "document"), "actors");

  const auto& groups = detail::required(document, "groups", "document");
  if (!groups.is_array()) detail::schema_error("groups", "expected an array");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::string where = "groups[" + std::to_string(i) + "]";
    detail::expect_object(groups[i], where, {"id", "members", "begin", "end"});
    Group group;
    group.id = detail::as_string(detail::required(groups[i], "id", where), where + ".id");
    group.members = detail::as_strings(detail::required(groups[i], "members", where), where + ".members");
    std::sort(group.members.begin(), group.members.end());
    group.begin = detail::as_int(detail::required(groups[i], "begin", where), where + ".begin");
    group.end = detail::as_int(detail::required(groups[i], "end", where), where + ".end");
    instance.groups.push_back(std::move(group));
  }
  return validate_instance(std::move(instance));
}

/// Canonical text: sorted keys, sorted member lists, two-space indent.
inline std::string serialize_instance(const StorylineInstance& instance) {
  using detail::json;
  json document;
  document["format"] = kFormatVersion;
  document["time_labels"] = instance.time_axis.labels;
  document["actors"] = json::array();
  for (const auto& actor : instance.actors) document["actors"].push_back(detail::actor_json(actor));
  document["groups"] = json::array();
  for (const auto& group : instance.groups) {
    auto members = group.members;
    std::sort(members.begin(), members.end());
    document["groups"].push_back({{"id", group.id}, {"members", members}, {"begin", group.begin}, {"end", group.end}});
  }
  return document.dump(2) + "\n";
}

inline PublicationSet parse_publications(std::string_view text) {
  using detail::json;
  const json document = detail::parse_json(text);
  detail::expect_object(document, "document", {"format", "records", "actors", "year_range"});
  detail::check_format(document);

  PublicationSet set;
  if (document.contains("actors")) set.actors = detail::parse_actors(document["actors"], "actors");
  if (document.contains("year_range")) {
    const auto& range = document["year_range"];
    if (!range.is_array() || range.size() != 2) detail::schema_error("year_range", "expected [first, last]");
    set.year_range = std::make_pair(detail::as_int(range[0], "year_range[0]"), detail::as_int(range[1], "year_range[1]"));
    if (set.year_range->first > set.year_range->second) detail::schema_error("year_range", "first year after last year");
  }

  const auto& records = detail::required(document, "records", "document");
  if (!records.is_array()) detail::schema_error("records", "expected an array");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string where = "records[" + std::to_string(i) + "]";
    detail::expect_object(records[i], where, {"year", "authors", "title"});
    PublicationRecord record;
    record.year = detail::as_int(detail::required(records[i], "year", where), where + ".year");
    record.authors = detail::as_strings(detail::required(records[i], "authors", where), where + ".authors");
    if (records[i].contains("title")) record.title = detail::as_string(records[i]["title"], where + ".title");
    set.records.push_back(std::move(record));
  }
  return set;
}

/// One instant per year from the first to the last year. Every distinct
/// author list is a candidate group; each maximal run of consecutive years in
/// which that exact list signs at least one record becomes one group.
inline StorylineInstance derive_groups(const PublicationSet& set) {
  if (set.records.empty()) throw Error(ErrorKind::EmptyInput, "no publication records");

  int first = set.records.front().year, last = first;
  for (const auto& record : set.records) {
    first = std::min(first, record.year);
    last = std::max(last, record.year);
  }
  if (set.year_range) {
    if (first < set.year_range->first || last > set.year_range->second)
      throw Error(ErrorKind::SchemaError, "record year outside year_range");
    first = set.year_range->first;
    last = set.year_range->second;
  }

  std::map<std::vector<std::string>, std::set<int>> years_by_team;
  std::set<std::string> authors;
  for (const auto& record : set.records) {
    if (record.authors.empty()) throw Error(ErrorKind::SchemaError, "record of " + std::to_string(record.year) + " has no authors");
    std::set<std::string> team(record.authors.begin(), record.authors.end());
    authors.insert(team.begin(), team.end());
    years_by_team[std::vector<std::string>(team.begin(), team.end())].insert(record.year);
  }

  StorylineInstance instance;
  for (int year = first; year <= last; ++year) instance.time_axis.labels.push_back(std::to_string(year));
  std::set<std::string> declared;
  for (const auto& actor : set.actors)
    if (declared.insert(actor.id).second) instance.actors.push_back(actor);
  for (const auto& author : authors)
    if (!declared.contains(author)) instance.actors.push_back({author, author, std::nullopt});

  struct Run {
    int begin, end;
    std::vector<std::string> members;
  };
  std::vector<Run> runs;
  for (const auto& [team, years] : years_by_team) {
    auto it = years.begin();
    while (it != years.end()) {
      int begin = *it, end = *it;
      for (++it; it != years.end() && *it == end + 1; ++it) end = *it;
      runs.push_back({begin - first, end - first, team});
    }
  }
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return std::tie(a.begin, a.end, a.members) < std::tie(b.begin, b.end, b.members);
  });
  for (std::size_t i = 0; i < runs.size(); ++i)
    instance.groups.push_back({"G" + std::to_string(i + 1), runs[i].members, runs[i].begin, runs[i].end});
  return validate_instance(std::move(instance));
}

inline StorylineInstance derive_groups(const std::vector<PublicationRecord>& records) {
  return derive_groups(PublicationSet{records, {}, std::nullopt});
}

}  // namespace storytree
