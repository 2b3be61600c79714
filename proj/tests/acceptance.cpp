// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>

#include "mapft/mapft.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mapft;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Benchmark disk_bench() { return Benchmark::load_directory(std::string(MAPFT_TEST_DATA) + "/bench"); }

// ---------------------------------------------------------------------------

Verdict conflict_oracle() {
  std::mt19937_64 rng(20240601);
  const auto start = Clock::now();
  std::size_t mismatches = 0, with_conflicts = 0, vertex = 0, edge = 0;
  constexpr std::size_t trials = 100000;
  for (std::size_t t = 0; t < trials; ++t) {
    const int w = 1 + static_cast<int>(rng() % 6), h = 1 + static_cast<int>(rng() % 6);
    const auto map = oracle::random_map(rng, w, h, static_cast<double>(rng() % 30) / 100.0);
    const std::size_t agents = 1 + rng() % 4;
    std::vector<Path> paths;
    for (std::size_t a = 0; a < agents; ++a) {
      const Cell s = oracle::random_open_cell(rng, map);
      const auto plan = oracle::random_walk(rng, map, s, 8);
      paths.push_back(simulate(map, s, parse_plan(plan)));
    }
    const auto got = find_conflicts(paths);
    if (got != oracle::conflicts(paths)) ++mismatches;
    if (!got.empty()) ++with_conflicts;
    for (const auto& c : got) (c.kind == ConflictKind::Vertex ? vertex : edge)++;
  }
  const double secs = seconds_since(start);
  return {mismatches == 0 && secs < 60.0 && vertex > 0 && edge > 0,
          fmt("%zu instances, %zu mismatches, %zu with conflicts (%zu vertex, %zu swap), %.2f s",
              trials, mismatches, with_conflicts, vertex, edge, secs)};
}

// ---------------------------------------------------------------------------

Verdict cost_convention() {
  const auto map = GridMap::empty("empty-9-9", 9, 9);
  const Cell origin{4, 4};
  std::size_t cases = 0, mismatches = 0, trailing_waits = 0, mid_visits = 0, redepartures = 0,
              not_reached = 0;

  auto check = [&](Cell s, const std::string& plan, Cell goal) {
    ++cases;
    const auto trace = oracle::replay(s, plan);
    const auto want = oracle::cost(trace, goal);
    std::int64_t got = -1;
    try {
      got = agent_cost(simulate(map, s, parse_plan(plan)), goal);
    } catch (const Error& e) {
      if (e.code() != Errc::GoalNotReached) ++mismatches;
    }
    if (got != want) ++mismatches;
    if (want < 0) {
      ++not_reached;
      return;
    }
    const auto first_visit = std::find(trace.begin(), trace.end(), goal) - trace.begin();
    if (want < static_cast<std::int64_t>(plan.size())) ++trailing_waits;
    if (first_visit < want && first_visit > 0) ++mid_visits;
    if (first_visit == 0 && want > 0) ++redepartures;
  };

  // Every plan of length <= 4 from the centre, against every cell it visits
  // and one it never visits.
  std::vector<std::string> plans{""};
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (plans[i].size() < 4)
      for (char c : std::string("udlrw")) plans.push_back(plans[i] + c);
  for (const auto& plan : plans) {
    const auto trace = oracle::replay(origin, plan);
    std::set<Cell> goals(trace.begin(), trace.end());
    for (Cell g : goals) check(origin, plan, g);
    check(origin, plan, Cell{0, 8});
  }

  // Hand-worked fixtures with literal expectations.
  struct Fixed {
    std::string plan;
    Cell goal;
    std::int64_t cost;  // -1: goal not reached
  };
  const std::vector<Fixed> fixed{
      {"", origin, 0},        {"ww", origin, 0},      {"rw", {5, 4}, 1},   {"rwww", {5, 4}, 1},
      {"wr", {5, 4}, 2},      {"rlr", {5, 4}, 3},     {"lr", origin, 2},   {"rwl", origin, 3},
      {"rl", {5, 4}, -1},     {"rrll", origin, 4},    {"rdlu", origin, 4}, {"rrwlw", {5, 4}, 4},
      {"dduu", {4, 6}, -1},   {"ddww", {4, 6}, 2},    {"wwwr", {5, 4}, 4}, {"rlrlr", {5, 4}, 5},
  };
  std::size_t fixed_bad = 0;
  for (const auto& f : fixed) {
    std::int64_t got = -1;
    try {
      got = agent_cost(simulate(map, origin, parse_plan(f.plan)), f.goal);
    } catch (const Error&) {
    }
    if (got != f.cost || oracle::cost(oracle::replay(origin, f.plan), f.goal) != f.cost) ++fixed_bad;
  }
  cases += fixed.size();
  mismatches += fixed_bad;

  return {mismatches == 0 && cases >= 50 && trailing_waits > 0 && mid_visits > 0 && redepartures > 0,
          fmt("%zu cases (%zu trailing waits, %zu mid-plan goal visits, %zu re-departures, "
              "%zu unreached, %zu literal), %zu mismatches",
              cases, trailing_waits, mid_visits, redepartures, not_reached, fixed.size(), mismatches)};
}

// ---------------------------------------------------------------------------

Verdict lower_bound_soundness() {
  std::mt19937_64 rng(777);
  std::size_t sets = 0, drawn = 0, violations = 0, tight = 0;
  while (sets < 10000) {
    ++drawn;
    const int w = 2 + static_cast<int>(rng() % 11), h = 2 + static_cast<int>(rng() % 11);
    const auto map = oracle::random_map(rng, w, h, static_cast<double>(rng() % 30) / 100.0);
    const std::size_t agents = 1 + rng() % 6;
    std::vector<AgentPair> pairs;
    std::vector<ActionSeq> plans;
    for (std::size_t a = 0; a < agents; ++a) {
      const Cell s = oracle::random_open_cell(rng, map);
      Cell g;
      plans.push_back(parse_plan(oracle::random_walk(rng, map, s, 16, &g)));
      pairs.push_back({s, g});
    }
    const auto outcome = validate_plan_set(map, pairs, plans);
    if (!outcome.valid) continue;
    ++sets;
    const auto lb = trivial_lower_bound(map, pairs).total;
    if (lb > *outcome.computed_cost) ++violations;
    if (lb == *outcome.computed_cost) ++tight;
  }
  return {violations == 0, fmt("%zu valid plan sets (%zu drawn), %zu violations, %zu tight", sets,
                               drawn, violations, tight)};
}

// ---------------------------------------------------------------------------

Verdict classification() {
  std::vector<std::string> bad;
  auto record = [](std::optional<std::int64_t> lb, std::optional<std::int64_t> cost) {
    InstanceRecord r;
    if (lb) r.best_lb = BestLowerBound{*lb, {"A"}, {"b1"}};
    if (cost) r.best_cost = BestSolution{*cost, {"A"}, {"b1"}, "r", "b1"};
    return r;
  };
  struct Case {
    std::optional<std::int64_t> lb, cost;
    InstanceState want;
  };
  const std::vector<Case> cases{
      {100, 100, InstanceState::Closed},       {0, 0, InstanceState::Closed},
      {100, 140, InstanceState::Solved},       {std::nullopt, 140, InstanceState::Solved},
      {100, std::nullopt, InstanceState::Unknown}, {std::nullopt, std::nullopt, InstanceState::Unknown},
  };
  for (const auto& c : cases) {
    const auto r = record(c.lb, c.cost);
    if (classify(r) != c.want) bad.push_back("classify");
  }
  if (classify(nullptr) != InstanceState::Unknown) bad.push_back("missing record");

  if (std::abs(suboptimality_ratio(100, 140) - 0.40) > 1e-12) bad.push_back("ratio(100,140)");

  std::size_t pairs = 0;
  for (std::int64_t lb = 0; lb <= 60; ++lb)
    for (std::int64_t cost = lb; cost <= 80; ++cost) {
      if (lb == 0 && cost > 0) continue;
      ++pairs;
      const bool zero = suboptimality_ratio(lb, cost) == 0.0;
      const bool closed = classify(record(lb, cost)) == InstanceState::Closed;
      if (zero != closed) bad.push_back("ratio zero iff closed at " + std::to_string(lb));
    }

  return {bad.empty(), fmt("%zu state fixtures, ratio(100,140)=%.2f, %zu (L,S) pairs, %zu failures",
                           cases.size() + 1, suboptimality_ratio(100, 140), pairs, bad.size())};
}

// ---------------------------------------------------------------------------

GridMap rooms_map(int n) {
  // Four rooms: a wall cross with one doorway in each arm.
  std::vector<std::uint8_t> open(static_cast<std::size_t>(n * n), 1);
  const int mid = n / 2;
  for (int i = 0; i < n; ++i) {
    open[static_cast<std::size_t>(mid * n + i)] = 0;
    open[static_cast<std::size_t>(i * n + mid)] = 0;
  }
  for (auto [x, y] : {std::pair{mid / 2, mid}, {mid + mid / 2 + 1, mid}, {mid, mid / 2}, {mid, mid + mid / 2 + 1}})
    open[static_cast<std::size_t>(y * n + x)] = 1;
  return GridMap("rooms-" + std::to_string(n) + "-" + std::to_string(n), n, n, std::move(open));
}

GridMap pillars_map(int n) {
  std::vector<std::uint8_t> open(static_cast<std::size_t>(n * n), 1);
  for (int y = 1; y < n; y += 2)
    for (int x = 1; x < n; x += 2) open[static_cast<std::size_t>(y * n + x)] = 0;
  return GridMap("pillars-" + std::to_string(n) + "-" + std::to_string(n), n, n, std::move(open));
}

Verdict even_generator() {
  std::mt19937_64 rng(99);
  std::vector<GridMap> maps{GridMap::empty("empty-8-8", 8, 8), GridMap::empty("empty-16-16", 16, 16),
                            oracle::random_map(rng, 16, 16, 0.10, "random-16-16-10"), rooms_map(18),
                            pillars_map(16), GridMap::empty("strip-24-3", 24, 3)};
  std::size_t violations = 0, pairs = 0;
  std::vector<std::string> notes;
  for (const auto& map : maps) {
    const auto dist = oracle::all_pairs(map);
    std::int32_t d_max = 0;
    for (std::size_t s = 0; s < map.size(); ++s)
      for (auto d : dist[s])
        if (d != std::numeric_limits<std::int32_t>::max()) d_max = std::max(d_max, d);
    const auto buckets = static_cast<std::size_t>(d_max / 4 + 1);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto scen = generate_even_scenario(map, seed);
      const auto again = generate_even_scenario(map, seed);
      if (serialize_scenario(scen) != serialize_scenario(again)) ++violations;
      if (scen.entries.size() != buckets * 10) ++violations;
      std::vector<std::size_t> per_bucket(buckets, 0);
      for (const auto& e : scen.entries) {
        ++pairs;
        const auto d = dist[map.index(e.start)][map.index(e.goal)];
        if (e.bucket < 0 || static_cast<std::size_t>(e.bucket) >= buckets || d <= 0 ||
            d == std::numeric_limits<std::int32_t>::max() || d / 4 != e.bucket) {
          ++violations;
          continue;
        }
        ++per_bucket[static_cast<std::size_t>(e.bucket)];
      }
      for (auto c : per_bucket)
        if (c != 10) ++violations;
    }
    notes.push_back(map.name() + ":" + std::to_string(buckets));
  }
  // With d_max a multiple of 4 the top bucket holds only the few pairs at
  // exactly d_max; the generator must refuse rather than shorten it.
  bool refused = false;
  try {
    generate_even_scenario(rooms_map(17), 1);
  } catch (const Error& e) {
    refused = e.code() == Errc::BucketUnsatisfiable;
  }
  std::string list;
  for (const auto& n : notes) list += (list.empty() ? "" : " ") + n;
  return {violations == 0 && maps.size() >= 5 && refused,
          fmt("%zu maps x 3 seeds (map:buckets %s), %zu pairs checked, %zu violations, "
              "short top bucket refused=%s",
              maps.size(), list.c_str(), pairs, violations, refused ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

// empty-8-8 even-1 fixture: optimal costs 1, 4, 6, 6 for 1..4 agents.
const std::string kHeader = "map_name,scenario,agents,lower_bound,solution_cost,plan\n";
const std::string kBounder = "algorithm: Bounder\nauthors: B\n";
const std::string kBounderCsv = kHeader + "empty-8-8,even-1,1,1,,\nempty-8-8,even-1,2,5,,\n"
                                          "empty-8-8,even-1,3,4,,\n";
const std::string kPlanner = "algorithm: Planner\nauthors: P\n";
const std::string kPlannerCsv = kHeader + "empty-8-8,even-1,1,1,1,r\nempty-8-8,even-1,2,,4,\"r;dlu\"\n"
                                          "empty-8-8,even-1,4,6,6,\"r;dlu;dd;w\"\n";
const std::string kFollower = "algorithm: Follower\nauthors: F\n";
const std::string kFollowerCsv = kHeader + "empty-8-8,even-1,2,,4,\"r;dlu\"\n"
                                           "empty-8-8,even-1,3,,6,\"r;dlu;dd\"\n";

Verdict revocation_equivalence() {
  const auto bench = disk_bench();
  fixture::TempDir live_dir, rebuilt_dir;
  std::vector<std::string> bad;
  Scope scope;
  scope.map = "empty-8-8";

  auto store = Store::open(live_dir.path());
  const auto bounder = ingest_batch(store, bench, kBounder, kBounderCsv);
  if (bounder.accepted != 3) bad.push_back("bounder rows");
  if (algorithm_comparison(bench, store.book(), scope).at("Bounder") != AlgoMetrics{0, 0, 3, 0})
    bad.push_back("metrics before revocation");

  const auto planner = ingest_batch(store, bench, kPlanner, kPlannerCsv);
  if (planner.accepted != 3 || planner.revoked_batches != std::vector<std::string>{bounder.batch_id})
    bad.push_back("planner did not revoke the bounder batch");
  const auto follower = ingest_batch(store, bench, kFollower, kFollowerCsv);
  if (follower.accepted != 2) bad.push_back("follower rows");

  std::vector<Event> scrubbed;
  for (const auto& e : store.log()) {
    if (std::holds_alternative<BatchRevoked>(e)) continue;
    auto copy = e;
    if (auto* c = std::get_if<ContributionAccepted>(&copy); c && c->contribution.batch_id == bounder.batch_id)
      c->contribution.lower_bound.reset();
    scrubbed.push_back(std::move(copy));
  }
  {
    auto rebuilt = Store::open(rebuilt_dir.path());
    rebuilt.commit(scrubbed);
  }
  const auto live_snapshot = read_file(live_dir.path() / "snapshot.jsonl");
  const auto rebuilt_snapshot = read_file(rebuilt_dir.path() / "snapshot.jsonl");
  if (live_snapshot != rebuilt_snapshot) bad.push_back("snapshot bytes differ");
  if (read_file(live_dir.path() / "snapshot.jsonl") !=
      Store::open(live_dir.path()).book().snapshot_text())
    bad.push_back("reopened snapshot differs");

  const std::map<std::string, AlgoMetrics> want{
      {"Bounder", {0, 0, 0, 0}},
      {"Follower", {0, 2, 0, 2}},
      {"Planner", {2, 3, 2, 3}},
  };
  const auto got = algorithm_comparison(bench, store.book(), scope);
  if (got != want) bad.push_back("live metrics");
  if (algorithm_comparison(bench, replay(scrubbed), scope) != want) bad.push_back("rebuilt metrics");

  std::string list;
  for (const auto& b : bad) list += " [" + b + "]";
  return {bad.empty(), fmt("snapshot %zu bytes identical=%s, metrics Planner{2,3,2,3} Follower{0,2,0,2} "
                           "Bounder{0,0,0,0}%s",
                           live_snapshot.size(), live_snapshot == rebuilt_snapshot ? "yes" : "no",
                           list.c_str())};
}

// ---------------------------------------------------------------------------

Verdict ingestion_atomicity() {
  const auto bench = disk_bench();
  std::size_t crash_points = 0, bad = 0;
  for (std::size_t crash_at = 0;; ++crash_at) {
    fixture::TempDir dir;
    std::string events_before, snapshot_before;
    bool crashed = false;
    {
      auto store = Store::open(dir.path());
      ingest_batch(store, bench, kBounder, kBounderCsv);
      events_before = read_file(dir.path() / "events.jsonl");
      snapshot_before = read_file(dir.path() / "snapshot.jsonl");
      store.set_write_hook([&](std::size_t i) {
        if (i == crash_at) {
          crashed = true;
          throw std::runtime_error("power loss");
        }
      });
      try {
        ingest_batch(store, bench, kPlanner, kPlannerCsv);  // also revokes Bounder
      } catch (const std::runtime_error&) {
      }
    }
    if (!crashed) break;
    ++crash_points;
    auto store = Store::open(dir.path());
    if (read_file(dir.path() / "events.jsonl") != events_before) ++bad;
    if (read_file(dir.path() / "snapshot.jsonl") != snapshot_before) ++bad;
    if (ingest_batch(store, bench, kPlanner, kPlannerCsv).accepted != 3) ++bad;
  }

  fixture::TempDir dir;
  auto store = Store::open(dir.path());
  ingest_batch(store, bench, kBounder, kBounderCsv);
  ingest_batch(store, bench, kPlanner, kPlannerCsv);
  const auto events = read_file(dir.path() / "events.jsonl");
  const auto snapshot = read_file(dir.path() / "snapshot.jsonl");
  std::size_t duplicates = 0;
  for (const auto& [desc, csv] : {std::pair{kBounder, kBounderCsv}, {kPlanner, kPlannerCsv}}) {
    const auto again = ingest_batch(store, bench, desc, csv);
    if (!again.duplicate_batch || again.accepted != 0) ++bad;
    duplicates += again.outcomes.size();
  }
  const bool unchanged = read_file(dir.path() / "events.jsonl") == events &&
                         read_file(dir.path() / "snapshot.jsonl") == snapshot &&
                         Store::open(dir.path()).book().snapshot_text() == snapshot;
  return {bad == 0 && crash_points >= 3 && unchanged,
          fmt("%zu crash points all restored pre-batch state, %zu failures; re-ingest %zu rows, "
              "store unchanged=%s",
              crash_points, bad, duplicates, unchanged ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

SolverAdapter mock(const std::string& mode, bool lower_bounds, const std::string& extra = {}) {
  SolverAdapter a;
  a.algorithm = {"Mock", "Tester", std::nullopt, std::nullopt};
  a.command = "sh " + std::string(MAPFT_TEST_DATA) + "/solvers/mock_solver.sh " + mode + " {agents}" + extra;
  a.lower_bounds = lower_bounds;
  return a;
}

std::vector<int> attempted(const RunResult& r) {
  std::vector<int> out;
  for (const auto& a : r.attempts) out.push_back(a.agents);
  return out;
}

// The agent counts the stop rule visits: step through the sequence and stop
// right after `stop` consecutive failures.
std::vector<int> closure(const std::set<int>& fails, int last, int step, int stop) {
  std::vector<int> out;
  int run = 0;
  for (int n = 1; n <= last; n += step) {
    out.push_back(n);
    run = fails.contains(n) ? run + 1 : 0;
    if (run == stop) break;
  }
  return out;
}

Verdict runner_protocol() {
  std::vector<std::string> bad;

  // Scripted failure sets through a fake process layer.
  Benchmark big;
  big.add_map(GridMap::empty("empty-8-8", 8, 8));
  Scenario scen;
  scen.map_name = "empty-8-8";
  scen.kind = ScenKind::Random;
  scen.index = 1;
  for (int i = 0; i < 60; ++i) {
    ScenEntry e;
    e.map_name = "empty-8-8.map";
    e.map_width = e.map_height = 8;
    e.start = e.goal = {i % 8, i / 8};
    scen.entries.push_back(e);
  }
  big.add_scenario(scen);
  std::mt19937_64 rng(4242);
  std::size_t fake_trials = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::set<int> fails;
    const double rate = static_cast<double>(rng() % 70) / 100.0;
    for (int n = 1; n <= 60; ++n)
      if (std::uniform_real_distribution<>(0, 1)(rng) < rate) fails.insert(n);
    RunnerPolicy p;
    p.agent_step = 1 + static_cast<int>(rng() % 3);
    auto fake = [&](const std::string& cmd, const Supervision&) {
      std::smatch m;
      std::regex_search(cmd, m, std::regex("agents=(\\d+)"));
      const int n = std::stoi(m[1]);
      ProcessOutcome o;
      if (fails.contains(n)) {
        o.exit_code = 1;
        return o;
      }
      std::string plan;
      for (int i = 0; i < n; ++i) plan += i ? ";w" : "w";
      o.lines = {"cost 0", "plan " + plan};
      return o;
    };
    SolverAdapter a;
    a.algorithm = {"Fake", "x", std::nullopt, std::nullopt};
    a.command = "solve agents={agents}";
    const auto r = run_scenario(a, big, "empty-8-8", ScenKind::Random, 1, p, fake);
    ++fake_trials;
    if (attempted(r) != closure(fails, 60, p.agent_step, 2)) bad.push_back("fake closure");
  }

  // Every failure subset of the 4-agent fixture through real processes.
  const auto bench = disk_bench();
  RunnerPolicy quick;
  quick.base_budget = 5;
  quick.grace = 0.5;
  std::size_t real_trials = 0;
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::set<int> fails;
    std::string list;
    for (int n = 1; n <= 4; ++n)
      if (mask & (1u << (n - 1))) {
        fails.insert(n);
        list += (list.empty() ? "" : " ") + std::to_string(n);
      }
    const auto r = run_scenario(mock("failing", false, " '" + list + "'"), bench, "empty-8-8",
                                ScenKind::Even, 1, quick);
    ++real_trials;
    if (attempted(r) != closure(fails, 4, 1, 2)) bad.push_back("process closure " + list);
    for (const auto& e : r.entries)
      if (fails.contains(e.instance.agents)) bad.push_back("entry from failed run");
  }

  // Budget extension: one extra window per window in which the bound rose.
  RunnerPolicy ext = quick;
  ext.base_budget = 0.4;
  ext.lb_extension = true;
  ext.max_agents = 1;
  struct Expect {
    std::string mode;
    bool capable;
    bool extension;
    int windows;
  };
  const std::vector<Expect> windows{{"lb-rises", true, true, 2},       {"lb-rises-twice", true, true, 3},
                                    {"lb-then-sleep", true, true, 1},  {"lb-rises", false, true, 1},
                                    {"lb-rises", true, false, 1}};
  std::string seen;
  for (const auto& w : windows) {
    auto p = ext;
    p.lb_extension = w.extension;
    const auto r = run_scenario(mock(w.mode, w.capable), bench, "empty-8-8", ScenKind::Even, 1, p);
    const auto& a = r.attempts.at(0);
    seen += (seen.empty() ? "" : ",") + std::to_string(a.windows);
    if (a.windows != w.windows) bad.push_back("windows " + w.mode);
    if (a.wall_seconds > p.base_budget * a.windows + p.grace) bad.push_back("extended wall " + w.mode);
  }

  // Wall clock with the 2 s grace.
  RunnerPolicy timed;
  timed.base_budget = 1;
  timed.grace = 2;
  double worst = 0;
  const auto r = run_scenario(mock("sleep", false), bench, "empty-8-8", ScenKind::Even, 1, timed);
  for (const auto& a : r.attempts) {
    worst = std::max(worst, a.wall_seconds);
    if (a.status != AttemptStatus::Timeout || a.wall_seconds > timed.base_budget + timed.grace)
      bad.push_back("timeout wall");
  }
  if (attempted(r) != std::vector<int>{1, 2}) bad.push_back("timeouts count as failures");

  std::string list;
  for (const auto& b : bad) list += " [" + b + "]";
  return {bad.empty(), fmt("%zu scripted + %zu process failure sets match closure, windows %s "
                           "(want 2,3,1,1,1), worst timed-out wall %.2f s for 1 s budget%s",
                           fake_trials, real_trials, seen.c_str(), worst, list.c_str())};
}

// ---------------------------------------------------------------------------

Verdict desk_performance() {
  // A Hamiltonian cycle of the 32x32 grid: row 0 left to right, a serpentine
  // over columns 1..31 for rows 1..31, then column 0 back up.
  std::vector<Cell> cycle;
  for (int x = 0; x < 32; ++x) cycle.push_back({x, 0});
  for (int y = 1; y < 32; ++y)
    for (int i = 0; i < 31; ++i) cycle.push_back({y % 2 ? 31 - i : 1 + i, y});
  for (int y = 31; y >= 1; --y) cycle.push_back({0, y});

  constexpr std::size_t agents = 1000, steps = 500;
  std::vector<AgentPair> pairs;
  std::string field;
  for (std::size_t i = 0; i < agents; ++i) {
    pairs.push_back({cycle[i], cycle[(i + steps) % cycle.size()]});
    if (i) field += ';';
    for (std::size_t t = 0; t < steps; ++t) {
      const Cell a = cycle[(i + t) % cycle.size()], b = cycle[(i + t + 1) % cycle.size()];
      field += b.x > a.x ? 'r' : b.x < a.x ? 'l' : b.y > a.y ? 'd' : 'u';
    }
  }
  const auto map = GridMap::empty("empty-32-32", 32, 32);
  const auto start = Clock::now();
  const auto plans = parse_plan_field(field);
  const auto outcome = validate_plan_set(map, pairs, plans, static_cast<std::int64_t>(agents * steps));
  const double secs = seconds_since(start);
  return {cycle.size() == 1024 && outcome.valid && secs < 1.0,
          fmt("%zu agents, horizon %zu, %s, cost %lld, %.3f s", agents, steps,
              outcome.valid ? "valid" : outcome.reason().c_str(),
              static_cast<long long>(outcome.computed_cost.value_or(-1)), secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"conflict-oracle-equivalence", conflict_oracle},
      {"cost-convention", cost_convention},
      {"lower-bound-soundness", lower_bound_soundness},
      {"classification-semantics", classification},
      {"even-scenario-generator", even_generator},
      {"revocation-equivalence", revocation_equivalence},
      {"ingestion-atomicity-idempotence", ingestion_atomicity},
      {"runner-protocol", runner_protocol},
      {"desk-performance", desk_performance},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - static_cast<std::size_t>(failed)
            << "/" << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
