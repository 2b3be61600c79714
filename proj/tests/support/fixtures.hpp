// Small in-memory benchmarks shared by the tracking, ingestion and API tests.
#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "mapft/benchmark.hpp"
#include "mapft/scengen.hpp"
#include "mapft/tracking/events.hpp"

namespace fixture {

/// empty-8-8 (Open) with random-1 and random-2 of 4 agents each, plus
/// maze-32-32-2 (Maze) with random-1 of 3 agents.
inline mapft::Benchmark small_bench() {
  mapft::Benchmark bench;
  auto open = mapft::GridMap::empty("empty-8-8", 8, 8);
  auto maze = mapft::GridMap::empty("maze-32-32-2", 6, 6);
  bench.add_map(open);
  bench.add_map(maze);
  bench.add_scenario(mapft::generate_random_scenario(open, 4, 11, 1));
  bench.add_scenario(mapft::generate_random_scenario(open, 4, 12, 2));
  bench.add_scenario(mapft::generate_random_scenario(maze, 3, 13, 1));
  return bench;
}

inline mapft::InstanceId id(const std::string& map, int index, int agents) {
  return {map, mapft::ScenKind::Random, index, agents};
}

inline mapft::Contribution contribution(const std::string& batch, const std::string& algo,
                                        std::optional<std::int64_t> lb,
                                        std::optional<std::int64_t> cost) {
  mapft::Contribution c;
  c.batch_id = batch;
  c.algorithm = algo;
  c.lower_bound = lb;
  c.solution_cost = cost;
  if (cost) c.plan = "plan-of-" + batch;
  return c;
}

inline mapft::BatchOpened open_batch(const std::string& batch, const std::string& algo) {
  return {batch, {algo, "someone", std::nullopt, std::nullopt}, "2024-01-01T00:00:00Z"};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("mapft-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixture
