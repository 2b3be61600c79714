#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "mapft/bounds.hpp"
#include "mapft/error.hpp"
#include "mapft/grid.hpp"
#include "mapft/scenario.hpp"

namespace mapft {

/// Pairs per distance bucket in an even scenario.
inline constexpr int kPairsPerBucket = 10;
/// Width of one distance bucket.
inline constexpr int kBucketWidth = 4;

namespace detail {

// mt19937_64's output sequence is fixed by the standard, unlike the
// std::*_distribution classes, so generated files are portable.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_below(rng, i))]);
}

inline ScenEntry make_entry(const GridMap& map, Cell s, Cell g, std::int32_t dist) {
  ScenEntry e;
  e.bucket = dist / kBucketWidth;
  e.map_name = map.name() + ".map";
  e.map_width = map.width();
  e.map_height = map.height();
  e.start = s;
  e.goal = g;
  e.ref_distance = dist;
  return e;
}

}  // namespace detail

/// floor(d_max / 4) + 1 buckets; bucket i holds 10 distinct (s, g) tuples with
/// s != g and floor(d / 4) == i, so 4i <= d < 4(i + 1).
inline Scenario generate_even_scenario(const GridMap& map, std::uint64_t seed, int index = 1) {
  const auto d_max = map_diameter(map);
  const auto buckets = static_cast<std::size_t>(d_max / kBucketWidth + 1);

  // Both passes enumerate ordered pairs in the same (source, target) index
  // order, so a per-bucket ordinal identifies a pair without storing it.
  auto enumerate = [&](auto&& visit) {
    for (std::size_t s = 0; s < map.size(); ++s) {
      if (!map.cells()[s]) continue;
      const DistanceField field(map, map.cell(s));
      const auto& dist = field.distances();
      for (std::size_t g = 0; g < map.size(); ++g) {
        if (dist[g] <= 0) continue;
        const auto b = static_cast<std::size_t>(dist[g] / kBucketWidth);
        if (b < buckets) visit(b, s, g, dist[g]);
      }
    }
  };

  std::vector<std::uint64_t> count(buckets, 0);
  enumerate([&](std::size_t b, std::size_t, std::size_t, std::int32_t) { ++count[b]; });

  std::mt19937_64 rng(seed);
  // chosen[b] maps ordinal -> draw position
  std::vector<std::vector<std::pair<std::uint64_t, int>>> chosen(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    if (count[b] < kPairsPerBucket)
      throw Error(Errc::BucketUnsatisfiable,
                  "bucket " + std::to_string(b) + " has only " + std::to_string(count[b]) +
                      " qualifying pairs",
                  static_cast<std::int64_t>(b));
    std::set<std::uint64_t> taken;
    for (int k = 0; k < kPairsPerBucket;) {
      const auto ordinal = detail::uniform_below(rng, count[b]);
      if (!taken.insert(ordinal).second) continue;
      chosen[b].emplace_back(ordinal, k++);
    }
    std::sort(chosen[b].begin(), chosen[b].end());
  }

  std::vector<std::vector<ScenEntry>> picked(buckets, std::vector<ScenEntry>(kPairsPerBucket));
  std::vector<std::uint64_t> seen(buckets, 0);
  std::vector<std::size_t> cursor(buckets, 0);
  enumerate([&](std::size_t b, std::size_t s, std::size_t g, std::int32_t d) {
    const auto ordinal = seen[b]++;
    auto& c = cursor[b];
    if (c < chosen[b].size() && chosen[b][c].first == ordinal) {
      picked[b][static_cast<std::size_t>(chosen[b][c].second)] =
          detail::make_entry(map, map.cell(s), map.cell(g), d);
      ++c;
    }
  });

  Scenario scen;
  scen.map_name = map.name();
  scen.kind = ScenKind::Even;
  scen.index = index;
  for (auto& bucket : picked)
    for (auto& e : bucket) scen.entries.push_back(std::move(e));
  return scen;
}

/// n agents with pairwise-distinct starts and pairwise-distinct goals; every
/// goal lies in its start's connected component.
inline Scenario generate_random_scenario(const GridMap& map, std::size_t n, std::uint64_t seed,
                                         int index = 1) {
  if (n == 0 || n > map.open_count())
    throw Error(Errc::NotEnoughCells, "cannot place " + std::to_string(n) + " agents on " +
                                          std::to_string(map.open_count()) + " open cells");
  std::vector<std::int32_t> component(map.size(), -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t s = 0; s < map.size(); ++s) {
    if (!map.cells()[s] || component[s] != -1) continue;
    const DistanceField field(map, map.cell(s));
    members.emplace_back();
    for (std::size_t i = 0; i < map.size(); ++i)
      if (field.distances()[i] != DistanceField::kUnreachable) {
        component[i] = static_cast<std::int32_t>(members.size() - 1);
        members.back().push_back(i);
      }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map.cells()[i]) open.push_back(i);
  detail::shuffle(open, rng);
  open.resize(n);
  for (auto& pool : members) detail::shuffle(pool, rng);

  std::vector<std::size_t> used(members.size(), 0);
  Scenario scen;
  scen.map_name = map.name();
  scen.kind = ScenKind::Random;
  scen.index = index;
  for (auto s : open) {
    const auto c = static_cast<std::size_t>(component[s]);
    const auto g = members[c][used[c]++];
    const Cell start = map.cell(s), goal = map.cell(g);
    const auto d = DistanceField(map, start).at(goal).value();
    scen.entries.push_back(detail::make_entry(map, start, goal, d));
  }
  return scen;
}

}  // namespace mapft
