#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mapft/error.hpp"
#include "mapft/grid.hpp"
#include "mapft/scenario.hpp"

namespace mapft {

/// Breadth-first distances from one source over the 4-connected grid.
class DistanceField {
 public:
  static constexpr std::int32_t kUnreachable = -1;

  DistanceField(const GridMap& map, Cell source)
      : map_(&map), source_(source), dist_(map.size(), kUnreachable) {
    if (!map.passable(source))
      throw Error(Errc::NonTraversableEndpoint, "source " + to_string(source) + " is blocked");
    std::vector<std::size_t> frontier{map.index(source)};
    dist_[frontier.front()] = 0;
    // The queue is the visit order itself; `head` walks it.
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const Cell c = map.cell(frontier[head]);
      const auto d = dist_[frontier[head]] + 1;
      for (Cell n : {Cell{c.x, c.y - 1}, Cell{c.x, c.y + 1}, Cell{c.x - 1, c.y}, Cell{c.x + 1, c.y}}) {
        if (!map.passable(n)) continue;
        auto& slot = dist_[map.index(n)];
        if (slot != kUnreachable) continue;
        slot = d;
        frontier.push_back(map.index(n));
      }
    }
    max_ = 0;
    for (auto d : dist_) max_ = std::max(max_, d);
    reached_ = frontier.size();
  }

  Cell source() const noexcept { return source_; }

  std::optional<std::int32_t> at(Cell c) const {
    if (!map_->in_bounds(c)) return std::nullopt;
    const auto d = dist_[map_->index(c)];
    if (d == kUnreachable) return std::nullopt;
    return d;
  }

  /// Raw per-cell distances, row-major, kUnreachable where not reachable.
  const std::vector<std::int32_t>& distances() const noexcept { return dist_; }
  std::int32_t eccentricity() const noexcept { return max_; }
  std::size_t reached() const noexcept { return reached_; }

 private:
  const GridMap* map_;
  Cell source_;
  std::vector<std::int32_t> dist_;
  std::int32_t max_ = 0;
  std::size_t reached_ = 0;
};

/// Exact 4-connected distance, or nullopt when g is unreachable from s.
inline std::optional<std::int32_t> shortest_path_dist(const GridMap& map, Cell s, Cell g) {
  if (!map.passable(s) || !map.passable(g))
    throw Error(Errc::NonTraversableEndpoint, "endpoint is blocked or out of bounds");
  return DistanceField(map, s).at(g);
}

struct LowerBoundReport {
  std::int64_t total = 0;
  std::vector<std::int32_t> per_agent;
};

/// Sum over agents of the individual shortest-path distance, ignoring
/// interactions. One breadth-first search per distinct goal.
inline LowerBoundReport trivial_lower_bound(const GridMap& map, std::span<const AgentPair> pairs) {
  LowerBoundReport report;
  report.per_agent.resize(pairs.size());
  std::map<Cell, std::vector<std::size_t>> by_goal;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!map.passable(pairs[i].first) || !map.passable(pairs[i].second))
      throw Error(Errc::NonTraversableEndpoint,
                  "agent " + std::to_string(i) + " has a blocked endpoint",
                  static_cast<std::int64_t>(i));
    by_goal[pairs[i].second].push_back(i);
  }
  for (const auto& [goal, agents] : by_goal) {
    const DistanceField field(map, goal);
    for (auto i : agents) {
      auto d = field.at(pairs[i].first);
      if (!d)
        throw Error(Errc::UnreachablePair,
                    "agent " + std::to_string(i) + " cannot reach its goal",
                    static_cast<std::int64_t>(i));
      report.per_agent[i] = *d;
    }
  }
  for (auto d : report.per_agent) report.total += d;
  return report;
}

/// (S - L) / L. With L = S = 0 the ratio is 0.
inline double suboptimality_ratio(std::int64_t lower, std::int64_t cost) {
  if (lower < 0 || cost < lower)
    throw Error(Errc::InconsistentBounds,
                "solution " + std::to_string(cost) + " below lower bound " + std::to_string(lower));
  if (lower == 0) {
    if (cost == 0) return 0.0;
    throw Error(Errc::DegenerateLowerBound, "lower bound 0 with positive cost");
  }
  return static_cast<double>(cost - lower) / static_cast<double>(lower);
}

/// Cells of the largest 4-connected component, ascending by index. Ties go to
/// the component containing the smallest cell index.
inline std::vector<std::size_t> largest_component(const GridMap& map) {
  std::vector<std::int32_t> label(map.size(), -1);
  std::vector<std::size_t> best, current;
  std::int32_t next_label = 0;
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (!map.cells()[start] || label[start] != -1) continue;
    current.assign(1, start);
    label[start] = next_label;
    for (std::size_t head = 0; head < current.size(); ++head) {
      const Cell c = map.cell(current[head]);
      for (Cell n : {Cell{c.x, c.y - 1}, Cell{c.x, c.y + 1}, Cell{c.x - 1, c.y}, Cell{c.x + 1, c.y}}) {
        if (!map.passable(n) || label[map.index(n)] != -1) continue;
        label[map.index(n)] = next_label;
        current.push_back(map.index(n));
      }
    }
    ++next_label;
    if (current.size() > best.size()) best = current;
  }
  std::sort(best.begin(), best.end());
  return best;
}

/// Maximum shortest-path distance between two cells of the largest connected
/// component; one breadth-first search per cell.
inline std::int32_t map_diameter(const GridMap& map) {
  std::int32_t diameter = 0;
  for (auto idx : largest_component(map))
    diameter = std::max(diameter, DistanceField(map, map.cell(idx)).eccentricity());
  return diameter;
}

}  // namespace mapft
