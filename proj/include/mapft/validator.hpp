#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "mapft/error.hpp"
#include "mapft/grid.hpp"
#include "mapft/plan.hpp"
#include "mapft/scenario.hpp"

namespace mapft {

/// Positions at t = 0..T; position 0 is the start.
using Path = std::vector<Cell>;

struct SimulationFailure {
  Errc code;     // OutOfBounds, IntoObstacle or NonTraversableEndpoint
  int timestep;  // first offending timestep
};

inline std::variant<Path, SimulationFailure> try_simulate(const GridMap& map, Cell start,
                                                          std::span<const Action> actions) {
  if (!map.passable(start)) return SimulationFailure{Errc::NonTraversableEndpoint, 0};
  Path path;
  path.reserve(actions.size() + 1);
  path.push_back(start);
  for (std::size_t t = 0; t < actions.size(); ++t) {
    const Cell next = step(path.back(), actions[t]);
    if (!map.in_bounds(next)) return SimulationFailure{Errc::OutOfBounds, static_cast<int>(t + 1)};
    if (!map.passable(next)) return SimulationFailure{Errc::IntoObstacle, static_cast<int>(t + 1)};
    path.push_back(next);
  }
  return path;
}

inline Path simulate(const GridMap& map, Cell start, std::span<const Action> actions) {
  auto result = try_simulate(map, start, actions);
  if (auto* f = std::get_if<SimulationFailure>(&result))
    throw Error(f->code, "at timestep " + std::to_string(f->timestep), f->timestep);
  return std::move(std::get<Path>(result));
}

/// Smallest T with pos(t) == goal for every t >= T. Waiting at the goal after
/// arrival is free; leaving and coming back moves T to the last arrival.
inline std::int64_t agent_cost(const Path& path, Cell goal) {
  if (path.empty() || path.back() != goal)
    throw Error(Errc::GoalNotReached, "final position is not the goal");
  std::size_t t = path.size() - 1;
  while (t > 0 && path[t - 1] == goal) --t;
  return static_cast<std::int64_t>(t);
}

enum class ConflictKind { Vertex, Edge };

/// For a vertex conflict `from == to` is the shared cell. For an edge conflict
/// the first agent moves from -> to while the second moves to -> from.
struct Conflict {
  ConflictKind kind;
  std::size_t first;   // first < second
  std::size_t second;
  int time;
  Cell from;
  Cell to;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

inline bool conflict_order(const Conflict& a, const Conflict& b) {
  return std::tie(a.time, a.first, a.second, a.kind) < std::tie(b.time, b.first, b.second, b.kind);
}

inline std::string describe(const Conflict& c) {
  std::string out = c.kind == ConflictKind::Vertex ? "vertex" : "edge";
  out += " conflict between agents " + std::to_string(c.first) + " and " +
         std::to_string(c.second) + " at t=" + std::to_string(c.time) + " ";
  out += c.kind == ConflictKind::Vertex ? to_string(c.from)
                                        : to_string(c.from) + "->" + to_string(c.to);
  return out;
}

/// Every vertex and swap conflict among `paths`, with each path padded by its
/// final position up to the common horizon. Sorted by (time, first, second).
inline std::vector<Conflict> find_conflicts(std::span<const Path> paths) {
  std::vector<Conflict> conflicts;
  if (paths.size() < 2) return conflicts;

  std::size_t horizon = 0;
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  bool seen = false;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    horizon = std::max(horizon, p.size() - 1);
    for (auto c : p) {
      if (!seen) {
        min_x = max_x = c.x;
        min_y = max_y = c.y;
        seen = true;
      }
      min_x = std::min(min_x, c.x);
      max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y);
      max_y = std::max(max_y, c.y);
    }
  }
  if (!seen) return conflicts;

  const auto width = static_cast<std::size_t>(max_x - min_x + 1);
  const auto cells = width * static_cast<std::size_t>(max_y - min_y + 1);
  auto slot = [&](Cell c) {
    return static_cast<std::size_t>(c.y - min_y) * width + static_cast<std::size_t>(c.x - min_x);
  };
  auto pos = [&](std::size_t agent, std::size_t t) {
    const auto& p = paths[agent];
    return p[std::min(t, p.size() - 1)];
  };

  // Per-timestep occupancy as intrusive linked lists: head[cell] -> agent,
  // next[agent] -> agent. Agents are inserted in decreasing index order so
  // every list is ascending.
  constexpr std::int32_t kNone = -1;
  const std::size_t n = paths.size();
  std::vector<std::int32_t> head_prev(cells, kNone), head_cur(cells, kNone);
  std::vector<std::int32_t> next_prev(n, kNone), next_cur(n, kNone);
  std::vector<std::size_t> touched_prev, touched_cur;

  for (std::size_t t = 0; t <= horizon; ++t) {
    for (auto s : touched_cur) head_cur[s] = kNone;
    touched_cur.clear();
    for (std::size_t i = n; i-- > 0;) {
      if (paths[i].empty()) continue;
      const auto s = slot(pos(i, t));
      if (head_cur[s] == kNone) touched_cur.push_back(s);
      next_cur[i] = head_cur[s];
      head_cur[s] = static_cast<std::int32_t>(i);
    }
    for (auto s : touched_cur) {
      for (auto i = head_cur[s]; i != kNone; i = next_cur[static_cast<std::size_t>(i)])
        for (auto j = next_cur[static_cast<std::size_t>(i)]; j != kNone;
             j = next_cur[static_cast<std::size_t>(j)]) {
          const Cell c = pos(static_cast<std::size_t>(i), t);
          conflicts.push_back({ConflictKind::Vertex, static_cast<std::size_t>(i),
                               static_cast<std::size_t>(j), static_cast<int>(t), c, c});
        }
    }
    if (t > 0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (paths[i].empty()) continue;
        const Cell from = pos(i, t - 1), to = pos(i, t);
        if (from == to) continue;
        for (auto j = head_prev[slot(to)]; j != kNone; j = next_prev[static_cast<std::size_t>(j)]) {
          const auto other = static_cast<std::size_t>(j);
          if (other > i && pos(other, t) == from)
            conflicts.push_back({ConflictKind::Edge, i, other, static_cast<int>(t), from, to});
        }
      }
    }
    std::swap(head_prev, head_cur);
    std::swap(next_prev, next_cur);
    std::swap(touched_prev, touched_cur);
  }
  std::sort(conflicts.begin(), conflicts.end(), conflict_order);
  return conflicts;
}

struct AgentError {
  std::size_t agent;
  Errc code;
  int timestep;  // -1 when not tied to a timestep
};

struct CostMismatch {
  std::int64_t claimed;
  std::int64_t computed;
};

struct ValidationOutcome {
  bool valid = false;
  std::optional<std::int64_t> computed_cost;
  std::vector<Conflict> conflicts;
  std::vector<AgentError> agent_errors;
  std::optional<CostMismatch> cost_mismatch;

  /// One-line explanation of the verdict.
  std::string reason() const {
    if (valid) return "valid, sum-of-costs " + std::to_string(computed_cost.value_or(0));
    std::string out;
    auto add = [&](const std::string& s) {
      if (!out.empty()) out += "; ";
      out += s;
    };
    for (const auto& e : agent_errors) {
      std::string s = "agent " + std::to_string(e.agent) + " " + std::string(to_string(e.code));
      if (e.timestep >= 0) s += " at t=" + std::to_string(e.timestep);
      add(s);
    }
    for (const auto& c : conflicts) add(describe(c));
    if (cost_mismatch)
      add("CostMismatch claimed " + std::to_string(cost_mismatch->claimed) + " computed " +
          std::to_string(cost_mismatch->computed));
    return out;
  }
};

/// Full verdict on a plan set for the given (start, goal) pairs. Conflicts are
/// reported when every agent simulates cleanly; the cost when, in addition,
/// every agent ends on its goal.
inline ValidationOutcome validate_plan_set(const GridMap& map, std::span<const AgentPair> pairs,
                                           std::span<const ActionSeq> plans,
                                           std::optional<std::int64_t> claimed_cost = {}) {
  if (pairs.size() != plans.size())
    throw Error(Errc::PlanCountMismatch, std::to_string(plans.size()) + " plans for " +
                                             std::to_string(pairs.size()) + " agents");
  ValidationOutcome out;
  std::vector<Path> paths;
  paths.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto sim = try_simulate(map, pairs[i].first, plans[i]);
    if (auto* f = std::get_if<SimulationFailure>(&sim)) {
      out.agent_errors.push_back({i, f->code, f->timestep});
      continue;
    }
    paths.push_back(std::move(std::get<Path>(sim)));
  }
  if (!out.agent_errors.empty()) return out;

  std::int64_t total = 0;
  bool all_arrived = true;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].back() != pairs[i].second) {
      out.agent_errors.push_back({i, Errc::GoalNotReached, -1});
      all_arrived = false;
      continue;
    }
    total += agent_cost(paths[i], pairs[i].second);
  }
  out.conflicts = find_conflicts(paths);
  if (all_arrived) {
    out.computed_cost = total;
    if (claimed_cost && *claimed_cost != total) out.cost_mismatch = CostMismatch{*claimed_cost, total};
  }
  out.valid = all_arrived && out.conflicts.empty() && !out.cost_mismatch;
  return out;
}

}  // namespace mapft
