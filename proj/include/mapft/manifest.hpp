#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"

namespace mapft {

/// The six benchmark domain types, in display order.
inline constexpr std::array<std::string_view, 6> kDomainNames = {
    "Game", "Street", "Maze", "Room", "Open", "Warehouse"};

inline std::optional<std::string> canonical_domain(std::string_view name) {
  const auto want = detail::lower(detail::trim(name));
  for (auto d : kDomainNames)
    if (detail::lower(d) == want) return std::string(d);
  return std::nullopt;
}

/// Domain -> maps, each map in exactly one domain.
class DomainManifest {
 public:
  void assign(const std::string& domain, const std::string& map) {
    if (auto it = domain_of_.find(map); it != domain_of_.end())
      throw Error(Errc::DuplicateMapAssignment,
                  "map '" + map + "' listed under both " + it->second + " and " + domain);
    domain_of_.emplace(map, domain);
    maps_[domain].push_back(map);
  }

  std::optional<std::string> domain_of(const std::string& map) const {
    if (auto it = domain_of_.find(map); it != domain_of_.end()) return it->second;
    return std::nullopt;
  }

  /// Maps of a domain in manifest order; empty when the domain has none.
  const std::vector<std::string>& maps(const std::string& domain) const {
    static const std::vector<std::string> none;
    auto it = maps_.find(domain);
    return it == maps_.end() ? none : it->second;
  }

  /// Domains that have at least one map, in canonical order.
  std::vector<std::string> domains() const {
    std::vector<std::string> out;
    for (auto d : kDomainNames)
      if (maps_.contains(std::string(d))) out.emplace_back(d);
    return out;
  }

  std::size_t map_count() const noexcept { return domain_of_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> maps_;
  std::map<std::string, std::string> domain_of_;
};

/// One line per domain: `Domain: map1, map2, ...`. Blank lines and lines
/// starting with '#' are skipped; a domain may span several lines.
inline DomainManifest load_manifest(std::string_view text) {
  DomainManifest manifest;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::MalformedRow, "manifest line " + std::to_string(i + 1) + " lacks ':'",
                  static_cast<std::int64_t>(i));
    auto domain = canonical_domain(line.substr(0, colon));
    if (!domain)
      throw Error(Errc::UnknownDomainName,
                  "unknown domain '" + std::string(detail::trim(line.substr(0, colon))) + "'",
                  static_cast<std::int64_t>(i));
    for (auto m : detail::split(line.substr(colon + 1), ',')) {
      m = detail::trim(m);
      if (!m.empty()) manifest.assign(*domain, std::string(m));
    }
  }
  return manifest;
}

/// The standard 33-map benchmark grouped into its six domains.
inline constexpr std::string_view kDefaultManifestText =
    "# MAPF grid benchmark: 33 maps in 6 domains\n"
    "Game: brc202d, den312d, den520d, lak303d, orz900d, ost003d, ht_chantry, "
    "ht_mansion_n, lt_gallowstemplar_n, w_woundedcoast\n"
    "Street: Berlin_1_256, Boston_0_256, Paris_1_256\n"
    "Maze: maze-128-128-1, maze-128-128-2, maze-128-128-10, maze-32-32-2, maze-32-32-4\n"
    "Room: room-32-32-4, room-64-64-8, room-64-64-16\n"
    "Open: empty-8-8, empty-16-16, empty-32-32, empty-48-48, random-32-32-10, "
    "random-32-32-20, random-64-64-10, random-64-64-20\n"
    "Warehouse: warehouse-10-20-10-2-1, warehouse-10-20-10-2-2, warehouse-20-40-10-2-1, "
    "warehouse-20-40-10-2-2\n";

inline DomainManifest default_manifest() { return load_manifest(kDefaultManifestText); }

}  // namespace mapft
