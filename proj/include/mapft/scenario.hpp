#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"
#include "mapft/grid.hpp"

namespace mapft {

enum class ScenKind { Even, Random };

constexpr std::string_view to_string(ScenKind k) noexcept {
  return k == ScenKind::Even ? "even" : "random";
}

inline std::optional<ScenKind> parse_scen_kind(std::string_view s) {
  if (s == "even") return ScenKind::Even;
  if (s == "random") return ScenKind::Random;
  return std::nullopt;
}

struct ScenEntry {
  int bucket = 0;
  std::string map_name;  // as written in the file, e.g. "empty-16-16.map"
  int map_width = 0;
  int map_height = 0;
  Cell start;
  Cell goal;
  double ref_distance = 0.0;  // opaque; never used as a bound

  friend bool operator==(const ScenEntry&, const ScenEntry&) = default;
};

struct Scenario {
  std::string map_name;
  ScenKind kind = ScenKind::Even;
  int index = 1;
  std::vector<ScenEntry> entries;
};

using AgentPair = std::pair<Cell, Cell>;  // (start, goal)

/// "empty-16-16.map" and "maps/empty-16-16.map" both name "empty-16-16".
inline std::string map_stem(std::string_view file) {
  if (auto slash = file.find_last_of("/\\"); slash != std::string_view::npos)
    file.remove_prefix(slash + 1);
  if (file.size() > 4 && file.substr(file.size() - 4) == ".map") file.remove_suffix(4);
  return std::string(file);
}

/// Parses the scenario grammar: a `version <num>` line, then one
/// tab-separated row per entry: bucket, map, width, height, sx, sy, gx, gy, dist.
/// kind/index are left at their defaults; the caller supplies them.
inline Scenario parse_scenario(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw Error(Errc::EmptyScenario, "scenario file is empty");
  std::string_view version;
  if (!detail::starts_with_word(detail::trim(lines[first]), "version", version) ||
      !detail::parse_double(version))
    throw Error(Errc::MalformedHeader, "expected 'version <num>'", static_cast<std::int64_t>(first));

  Scenario scen;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    const auto fields = detail::split(lines[i], '\t');
    const auto row = static_cast<std::int64_t>(i);
    if (fields.size() != 9)
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                      " fields, expected 9",
                  row);
    auto num = [&](std::size_t f) {
      auto v = detail::parse_int<int>(fields[f]);
      if (!v || *v < 0)
        throw Error(Errc::NonNumericField,
                    "line " + std::to_string(i + 1) + " field " + std::to_string(f + 1), row);
      return *v;
    };
    ScenEntry e;
    e.bucket = num(0);
    e.map_name = std::string(detail::trim(fields[1]));
    e.map_width = num(2);
    e.map_height = num(3);
    e.start = {num(4), num(5)};
    e.goal = {num(6), num(7)};
    auto dist = detail::parse_double(fields[8]);
    if (!dist || *dist < 0)
      throw Error(Errc::NonNumericField, "line " + std::to_string(i + 1) + " field 9", row);
    e.ref_distance = *dist;
    auto inside = [&](Cell c) { return c.x < e.map_width && c.y < e.map_height; };
    if (!inside(e.start) || !inside(e.goal))
      throw Error(Errc::MalformedRow,
                  "line " + std::to_string(i + 1) + " start/goal outside declared dimensions", row);
    scen.entries.push_back(std::move(e));
  }
  if (scen.entries.empty()) throw Error(Errc::EmptyScenario, "scenario has no entries");
  scen.map_name = map_stem(scen.entries.front().map_name);
  return scen;
}

inline std::string serialize_scenario(const Scenario& scen) {
  std::string out = "version 1\n";
  char dist[64];
  for (const auto& e : scen.entries) {
    std::snprintf(dist, sizeof dist, "%.8f", e.ref_distance);
    out += std::to_string(e.bucket) + '\t' + e.map_name + '\t' + std::to_string(e.map_width) +
           '\t' + std::to_string(e.map_height) + '\t' + std::to_string(e.start.x) + '\t' +
           std::to_string(e.start.y) + '\t' + std::to_string(e.goal.x) + '\t' +
           std::to_string(e.goal.y) + '\t' + dist + '\n';
  }
  return out;
}

struct ScenarioFileName {
  std::string map_name;
  ScenKind kind;
  int index;
};

/// Applies the `<map>-<kind>-<index>.scen` naming convention.
inline std::optional<ScenarioFileName> parse_scenario_file_name(std::string_view file) {
  if (auto slash = file.find_last_of("/\\"); slash != std::string_view::npos)
    file.remove_prefix(slash + 1);
  if (file.size() <= 5 || file.substr(file.size() - 5) != ".scen") return std::nullopt;
  file.remove_suffix(5);
  const auto dash2 = file.rfind('-');
  if (dash2 == std::string_view::npos || dash2 == 0) return std::nullopt;
  const auto dash1 = file.rfind('-', dash2 - 1);
  if (dash1 == std::string_view::npos || dash1 == 0) return std::nullopt;
  auto kind = parse_scen_kind(file.substr(dash1 + 1, dash2 - dash1 - 1));
  auto index = detail::parse_int<int>(file.substr(dash2 + 1));
  if (!kind || !index || *index < 1) return std::nullopt;
  return ScenarioFileName{std::string(file.substr(0, dash1)), *kind, *index};
}

inline std::string scenario_file_name(const Scenario& s) {
  return s.map_name + "-" + std::string(to_string(s.kind)) + "-" + std::to_string(s.index) +
         ".scen";
}

/// "even-3" <-> (Even, 3)
inline std::string scenario_label(ScenKind kind, int index) {
  return std::string(to_string(kind)) + "-" + std::to_string(index);
}

inline std::optional<std::pair<ScenKind, int>> parse_scenario_label(std::string_view s) {
  const auto dash = s.find('-');
  if (dash == std::string_view::npos) return std::nullopt;
  auto kind = parse_scen_kind(s.substr(0, dash));
  auto index = detail::parse_int<int>(s.substr(dash + 1));
  if (!kind || !index || *index < 1) return std::nullopt;
  return std::pair{*kind, *index};
}

/// Checks that a scenario belongs to `map`: names and dimensions agree and
/// every endpoint is traversable.
inline void bind_scenario(const GridMap& map, const Scenario& scen) {
  if (!map.name().empty() && scen.map_name != map.name())
    throw Error(Errc::ScenarioMapMismatch,
                "scenario is for '" + scen.map_name + "', map is '" + map.name() + "'");
  for (std::size_t i = 0; i < scen.entries.size(); ++i) {
    const auto& e = scen.entries[i];
    const auto pos = static_cast<std::int64_t>(i);
    if (!map.name().empty() && map_stem(e.map_name) != map.name())
      throw Error(Errc::ScenarioMapMismatch, "entry " + std::to_string(i) + " names map '" +
                                                 e.map_name + "'", pos);
    if (e.map_width != map.width() || e.map_height != map.height())
      throw Error(Errc::ScenarioMapMismatch,
                  "entry " + std::to_string(i) + " declares dimensions " +
                      std::to_string(e.map_width) + "x" + std::to_string(e.map_height),
                  pos);
    if (!map.passable(e.start) || !map.passable(e.goal))
      throw Error(Errc::EndpointBlocked,
                  "entry " + std::to_string(i) + " has a blocked start or goal", pos);
  }
}

/// An instance is (map, scenario, first n entries).
struct InstanceId {
  std::string map_name;
  ScenKind kind = ScenKind::Even;
  int index = 1;
  int agents = 1;

  friend auto operator<=>(const InstanceId&, const InstanceId&) = default;
  friend bool operator==(const InstanceId&, const InstanceId&) = default;

  std::string scenario() const { return scenario_label(kind, index); }
};

inline std::string to_string(const InstanceId& id) {
  return id.map_name + "/" + id.scenario() + "/" + std::to_string(id.agents);
}

inline std::vector<AgentPair> instance_agents(const Scenario& scen, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > scen.entries.size())
    throw Error(Errc::AgentCountOutOfRange,
                "agent count " + std::to_string(n) + " outside [1, " +
                    std::to_string(scen.entries.size()) + "]",
                n);
  std::vector<AgentPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& e = scen.entries[static_cast<std::size_t>(i)];
    pairs.emplace_back(e.start, e.goal);
  }
  return pairs;
}

}  // namespace mapft
