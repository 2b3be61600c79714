#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mapft/error.hpp"
#include "mapft/grid.hpp"
#include "mapft/manifest.hpp"
#include "mapft/scenario.hpp"

namespace mapft {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

struct ScenarioKey {
  std::string map_name;
  ScenKind kind;
  int index;

  friend auto operator<=>(const ScenarioKey&, const ScenarioKey&) = default;
};

/// The loaded benchmark: maps, their scenarios, and the domain manifest.
/// Every (map, scenario, n) with 1 <= n <= |entries| is an instance.
class Benchmark {
 public:
  Benchmark() : manifest_(default_manifest()) {}
  explicit Benchmark(DomainManifest manifest) : manifest_(std::move(manifest)) {}

  void add_map(GridMap map) {
    if (map.name().empty()) throw Error(Errc::UnknownMap, "benchmark maps need a name");
    auto name = map.name();
    maps_.insert_or_assign(std::move(name), std::move(map));
  }

  /// The scenario's map must already be loaded.
  void add_scenario(Scenario scen) {
    const auto& map = this->map(scen.map_name);
    bind_scenario(map, scen);
    ScenarioKey key{scen.map_name, scen.kind, scen.index};
    scenarios_.insert_or_assign(std::move(key), std::move(scen));
  }

  /// Loads every *.map under `root`, then every *.scen whose file name follows
  /// `<map>-<kind>-<index>.scen`. A `domains.manifest` file at the root
  /// replaces the default manifest.
  static Benchmark load_directory(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw Error(Errc::Io, "not a directory: " + root.string());
    Benchmark bench;
    if (fs::exists(root / "domains.manifest"))
      bench.manifest_ = load_manifest(read_file(root / "domains.manifest"));
    std::vector<fs::path> map_files, scen_files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().extension() == ".map") map_files.push_back(entry.path());
      if (entry.path().extension() == ".scen") scen_files.push_back(entry.path());
    }
    std::sort(map_files.begin(), map_files.end());
    std::sort(scen_files.begin(), scen_files.end());
    for (const auto& p : map_files)
      bench.add_map(parse_map(read_file(p), p.stem().string()));
    for (const auto& p : scen_files) {
      auto name = parse_scenario_file_name(p.filename().string());
      if (!name) continue;
      auto scen = parse_scenario(read_file(p));
      scen.map_name = name->map_name;
      scen.kind = name->kind;
      scen.index = name->index;
      if (!bench.has_map(scen.map_name)) continue;
      bench.add_scenario(std::move(scen));
    }
    return bench;
  }

  const DomainManifest& manifest() const noexcept { return manifest_; }
  const std::map<std::string, GridMap>& maps() const noexcept { return maps_; }
  const std::map<ScenarioKey, Scenario>& scenarios() const noexcept { return scenarios_; }

  bool has_map(const std::string& name) const { return maps_.contains(name); }

  const GridMap& map(const std::string& name) const {
    auto it = maps_.find(name);
    if (it == maps_.end()) throw Error(Errc::UnknownMap, "unknown map '" + name + "'");
    return it->second;
  }

  const Scenario& scenario(const std::string& map_name, ScenKind kind, int index) const {
    auto it = scenarios_.find(ScenarioKey{map_name, kind, index});
    if (it == scenarios_.end())
      throw Error(Errc::UnknownScenario,
                  "unknown scenario " + map_name + " " + scenario_label(kind, index));
    return it->second;
  }

  std::vector<const Scenario*> scenarios_of(const std::string& map_name) const {
    std::vector<const Scenario*> out;
    for (auto it = scenarios_.lower_bound(ScenarioKey{map_name, ScenKind::Even, 0});
         it != scenarios_.end() && it->first.map_name == map_name; ++it)
      out.push_back(&it->second);
    return out;
  }

  bool contains(const InstanceId& id) const {
    auto it = scenarios_.find(ScenarioKey{id.map_name, id.kind, id.index});
    return it != scenarios_.end() && id.agents >= 1 &&
           static_cast<std::size_t>(id.agents) <= it->second.entries.size();
  }

  /// Start/goal pairs of an instance.
  std::vector<AgentPair> agents(const InstanceId& id) const {
    return instance_agents(scenario(id.map_name, id.kind, id.index), id.agents);
  }

  /// Domain of a loaded map, or "unassigned".
  std::string domain_of(const std::string& map_name) const {
    return manifest_.domain_of(map_name).value_or("unassigned");
  }

 private:
  DomainManifest manifest_;
  std::map<std::string, GridMap> maps_;
  std::map<ScenarioKey, Scenario> scenarios_;
};

}  // namespace mapft
