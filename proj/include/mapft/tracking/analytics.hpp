#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mapft/benchmark.hpp"
#include "mapft/bounds.hpp"
#include "mapft/csv.hpp"
#include "mapft/error.hpp"
#include "mapft/manifest.hpp"
#include "mapft/tracking/book.hpp"
#include "mapft/tracking/record.hpp"

namespace mapft {

/// Narrowing filter over the benchmark. A scenario requires a map.
struct Scope {
  std::optional<std::string> domain;
  std::optional<std::string> map;
  std::optional<std::pair<ScenKind, int>> scenario;
  std::optional<int> agents_min;
  std::optional<int> agents_max;

  std::string label() const {
    std::string out;
    auto add = [&](const std::string& s) {
      if (!out.empty()) out += '/';
      out += s;
    };
    if (domain) add(*domain);
    if (map) add(*map);
    if (scenario) add(scenario_label(scenario->first, scenario->second));
    if (agents_min || agents_max)
      add("agents:" + (agents_min ? std::to_string(*agents_min) : std::string()) + "-" +
          (agents_max ? std::to_string(*agents_max) : std::string()));
    return out.empty() ? "all" : out;
  }
};

/// Maps a scope covers, in name order. Validates the scope.
inline std::vector<std::string> scope_maps(const Benchmark& bench, const Scope& scope) {
  if (scope.scenario && !scope.map) throw Error(Errc::InvalidScope, "scenario requires a map");
  if (scope.agents_min && scope.agents_max && *scope.agents_min > *scope.agents_max)
    throw Error(Errc::InvalidScope, "empty agent range");
  std::optional<std::string> domain;
  if (scope.domain) {
    domain = scope.domain == "unassigned" ? std::optional<std::string>("unassigned")
                                          : canonical_domain(*scope.domain);
    if (!domain) throw Error(Errc::UnknownDomain, "unknown domain '" + *scope.domain + "'");
  }
  std::vector<std::string> maps;
  if (scope.map) {
    if (!bench.has_map(*scope.map)) throw Error(Errc::UnknownMap, "unknown map '" + *scope.map + "'");
    if (domain && bench.domain_of(*scope.map) != *domain)
      throw Error(Errc::InvalidScope, "map '" + *scope.map + "' is not in domain " + *domain);
    if (scope.scenario) bench.scenario(*scope.map, scope.scenario->first, scope.scenario->second);
    maps.push_back(*scope.map);
    return maps;
  }
  for (const auto& [name, _] : bench.maps())
    if (!domain || bench.domain_of(name) == *domain) maps.push_back(name);
  return maps;
}

/// Calls fn(InstanceId) for every instance in scope, ordered by
/// (map, scenario kind, scenario index, agents).
template <typename Fn>
void for_each_instance(const Benchmark& bench, const Scope& scope, Fn&& fn) {
  for (const auto& map : scope_maps(bench, scope)) {
    for (const Scenario* scen : bench.scenarios_of(map)) {
      if (scope.scenario && (scen->kind != scope.scenario->first || scen->index != scope.scenario->second))
        continue;
      const int lo = std::max(1, scope.agents_min.value_or(1));
      const int hi = std::min(static_cast<int>(scen->entries.size()),
                              scope.agents_max.value_or(static_cast<int>(scen->entries.size())));
      for (int k = lo; k <= hi; ++k) fn(InstanceId{map, scen->kind, scen->index, k});
    }
  }
}

inline std::vector<InstanceId> resolve_scope(const Benchmark& bench, const Scope& scope) {
  std::vector<InstanceId> out;
  for_each_instance(bench, scope, [&](const InstanceId& id) { out.push_back(id); });
  return out;
}

struct ProgressSummary {
  std::string scope;
  std::size_t total = 0;
  std::size_t closed = 0;
  std::size_t solved = 0;
  std::size_t unknown = 0;
  double closed_pct = 0;
  double solved_pct = 0;
  double unknown_pct = 0;

  void count(InstanceState s) {
    ++total;
    if (s == InstanceState::Closed) ++closed;
    else if (s == InstanceState::Solved) ++solved;
    else ++unknown;
  }

  void finish() {
    if (total == 0) return;
    const auto t = static_cast<double>(total);
    closed_pct = 100.0 * static_cast<double>(closed) / t;
    solved_pct = 100.0 * static_cast<double>(solved) / t;
    unknown_pct = 100.0 * static_cast<double>(unknown) / t;
  }
};

/// Closed / solved / unknown over every instance in scope; instances without
/// a record count as unknown.
inline ProgressSummary progress_summary(const Benchmark& bench, const RecordBook& book,
                                        const Scope& scope) {
  ProgressSummary s;
  s.scope = scope.label();
  for_each_instance(bench, scope, [&](const InstanceId& id) { s.count(classify(book.find(id))); });
  if (s.total == 0) throw Error(Errc::EmptyScope, "no instances in scope " + s.scope);
  s.finish();
  return s;
}

/// What one algorithm achieved on one instance.
struct AlgoFacts {
  bool solved = false;
  bool best_lb = false;
  bool best_solution = false;
  bool closed = false;
};

inline AlgoFacts algo_facts(const InstanceRecord* rec, const std::string& algorithm) {
  AlgoFacts f;
  if (!rec) return f;
  f.solved = rec->cost_of(algorithm).has_value();
  f.best_lb = rec->best_lb && rec->best_lb->holders.contains(algorithm);
  f.best_solution = rec->best_cost && rec->best_cost->holders.contains(algorithm);
  f.closed = classify(rec) == InstanceState::Closed && f.best_lb && f.best_solution;
  return f;
}

struct AlgoMetrics {
  std::size_t closed = 0;
  std::size_t solved = 0;
  std::size_t best_lower_bound = 0;
  std::size_t best_solution = 0;

  friend bool operator==(const AlgoMetrics&, const AlgoMetrics&) = default;
};

/// The four per-algorithm counters over a scope. The trivial oracle is left
/// out unless asked for.
inline std::map<std::string, AlgoMetrics> algorithm_comparison(const Benchmark& bench,
                                                               const RecordBook& book,
                                                               const Scope& scope,
                                                               bool include_oracle = false) {
  std::map<std::string, AlgoMetrics> out;
  for (const auto& [name, _] : book.algorithms())
    if (include_oracle || name != kTrivialOracle) out[name];
  std::size_t total = 0;
  for_each_instance(bench, scope, [&](const InstanceId& id) {
    ++total;
    const auto* rec = book.find(id);
    if (!rec) return;
    for (auto& [name, m] : out) {
      const auto f = algo_facts(rec, name);
      m.closed += f.closed;
      m.solved += f.solved;
      m.best_lower_bound += f.best_lb;
      m.best_solution += f.best_solution;
    }
  });
  if (total == 0) throw Error(Errc::EmptyScope, "no instances in scope " + scope.label());
  return out;
}

enum class SeriesMetric {
  ClosedPct,
  SolvedPct,
  UnknownPct,
  AlgoClosedPct,
  AlgoSolvedPct,
  AlgoBestLowerBoundPct,
  AlgoBestSolutionPct,
};

struct SeriesPoint {
  int agents = 0;
  std::size_t instances = 0;
  std::size_t hits = 0;
  double value = 0;  // percentage of instances

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Per agent count k: the metric over all in-scope instances with k agents.
/// Agent counts with no instance are omitted.
inline std::vector<SeriesPoint> agent_count_series(const Benchmark& bench, const RecordBook& book,
                                                   const Scope& scope, SeriesMetric metric,
                                                   const std::string& algorithm = {}) {
  std::map<int, SeriesPoint> by_k;
  for_each_instance(bench, scope, [&](const InstanceId& id) {
    auto& p = by_k[id.agents];
    p.agents = id.agents;
    ++p.instances;
    const auto* rec = book.find(id);
    bool hit = false;
    switch (metric) {
      case SeriesMetric::ClosedPct: hit = classify(rec) == InstanceState::Closed; break;
      case SeriesMetric::SolvedPct: hit = classify(rec) == InstanceState::Solved; break;
      case SeriesMetric::UnknownPct: hit = classify(rec) == InstanceState::Unknown; break;
      case SeriesMetric::AlgoClosedPct: hit = algo_facts(rec, algorithm).closed; break;
      case SeriesMetric::AlgoSolvedPct: hit = algo_facts(rec, algorithm).solved; break;
      case SeriesMetric::AlgoBestLowerBoundPct: hit = algo_facts(rec, algorithm).best_lb; break;
      case SeriesMetric::AlgoBestSolutionPct: hit = algo_facts(rec, algorithm).best_solution; break;
    }
    p.hits += hit;
  });
  std::vector<SeriesPoint> out;
  for (auto& [k, p] : by_k) {
    p.value = 100.0 * static_cast<double>(p.hits) / static_cast<double>(p.instances);
    out.push_back(p);
  }
  return out;
}

struct SuboptimalityPoint {
  int agents = 0;
  std::int64_t lower_bound = 0;
  std::int64_t cost = 0;
  double ratio = 0;
  bool trivial_lb = false;  // only the trivial bound is known: ratio is an upper bound
};

/// Ratio (S - L) / L per agent count for one scenario, over solved and closed
/// instances. When no submitted lower bound exists the trivial bound is used.
inline std::vector<SuboptimalityPoint> suboptimality_series(const Benchmark& bench,
                                                            const RecordBook& book,
                                                            const std::string& map, ScenKind kind,
                                                            int index) {
  const auto& scen = bench.scenario(map, kind, index);
  const auto& grid = bench.map(map);
  std::vector<SuboptimalityPoint> out;
  for (int k = 1; k <= static_cast<int>(scen.entries.size()); ++k) {
    const auto* rec = book.find({map, kind, index, k});
    if (!rec || !rec->best_cost) continue;
    SuboptimalityPoint p;
    p.agents = k;
    p.cost = rec->best_cost->value;
    if (rec->best_lb) {
      p.lower_bound = rec->best_lb->value;
      p.trivial_lb = rec->best_lb->holders == std::set<std::string>{std::string(kTrivialOracle)};
    } else {
      p.lower_bound = trivial_lower_bound(grid, instance_agents(scen, k)).total;
      p.trivial_lb = true;
    }
    if (p.lower_bound == 0 && p.cost > 0) continue;  // ratio undefined
    p.ratio = suboptimality_ratio(p.lower_bound, p.cost);
    out.push_back(p);
  }
  return out;
}

enum class ExportLevel { Instance, Scenario, Map, Domain };

inline std::optional<ExportLevel> parse_export_level(std::string_view s) {
  if (s == "instance") return ExportLevel::Instance;
  if (s == "scenario") return ExportLevel::Scenario;
  if (s == "map") return ExportLevel::Map;
  if (s == "domain") return ExportLevel::Domain;
  return std::nullopt;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const {
    std::string out = csv::row(header);
    for (const auto& r : rows) out += csv::row(r);
    return out;
  }
};

namespace detail {

inline std::string join_set(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ';';
    out += s;
  }
  return out;
}

inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::vector<std::string> summary_cells(const ProgressSummary& s) {
  return {std::to_string(s.total), std::to_string(s.closed), std::to_string(s.solved),
          std::to_string(s.unknown), pct(s.closed_pct), pct(s.solved_pct), pct(s.unknown_pct)};
}

}  // namespace detail

inline const std::vector<std::string>& instance_export_header() {
  static const std::vector<std::string> h{"map",           "scenario",  "agents",
                                          "lower_bound",   "solution_cost", "state",
                                          "lb_holders",    "solution_holders", "plan_batch"};
  return h;
}

/// Results at one level of the benchmark as a table with a fixed column order.
inline Table export_results(const Benchmark& bench, const RecordBook& book, const Scope& scope,
                            ExportLevel level) {
  Table t;
  const std::vector<std::string> counts{"instances", "closed", "solved", "unknown",
                                        "closed_pct", "solved_pct", "unknown_pct"};
  std::size_t total = 0;
  switch (level) {
    case ExportLevel::Instance: {
      t.header = instance_export_header();
      for_each_instance(bench, scope, [&](const InstanceId& id) {
        ++total;
        const auto* rec = book.find(id);
        std::vector<std::string> row{id.map_name, id.scenario(), std::to_string(id.agents), "", "",
                                     std::string(to_string(classify(rec))), "", "", ""};
        if (rec && rec->best_lb) {
          row[3] = std::to_string(rec->best_lb->value);
          row[6] = detail::join_set(rec->best_lb->holders);
        }
        if (rec && rec->best_cost) {
          row[4] = std::to_string(rec->best_cost->value);
          row[7] = detail::join_set(rec->best_cost->holders);
          row[8] = rec->best_cost->plan_batch;
        }
        t.rows.push_back(std::move(row));
      });
      break;
    }
    case ExportLevel::Scenario: {
      t.header = {"map", "scenario"};
      t.header.insert(t.header.end(), counts.begin(), counts.end());
      for (const auto& map : scope_maps(bench, scope))
        for (const Scenario* scen : bench.scenarios_of(map)) {
          if (scope.scenario && (scen->kind != scope.scenario->first || scen->index != scope.scenario->second))
            continue;
          Scope sub = scope;
          sub.map = map;
          sub.scenario = std::pair{scen->kind, scen->index};
          ProgressSummary s;
          for_each_instance(bench, sub, [&](const InstanceId& id) { s.count(classify(book.find(id))); });
          if (s.total == 0) continue;
          s.finish();
          total += s.total;
          std::vector<std::string> row{map, scenario_label(scen->kind, scen->index)};
          auto cells = detail::summary_cells(s);
          row.insert(row.end(), cells.begin(), cells.end());
          t.rows.push_back(std::move(row));
        }
      break;
    }
    case ExportLevel::Map: {
      t.header = {"domain", "map"};
      t.header.insert(t.header.end(), counts.begin(), counts.end());
      for (const auto& map : scope_maps(bench, scope)) {
        Scope sub = scope;
        sub.map = map;
        ProgressSummary s;
        for_each_instance(bench, sub, [&](const InstanceId& id) { s.count(classify(book.find(id))); });
        s.finish();
        total += s.total;
        std::vector<std::string> row{bench.domain_of(map), map};
        auto cells = detail::summary_cells(s);
        row.insert(row.end(), cells.begin(), cells.end());
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case ExportLevel::Domain: {
      t.header = {"domain", "maps"};
      t.header.insert(t.header.end(), counts.begin(), counts.end());
      std::vector<std::string> domains;
      if (scope.domain) {
        scope_maps(bench, scope);
        domains.push_back(scope.domain == "unassigned" ? "unassigned" : *canonical_domain(*scope.domain));
      } else {
        for (auto d : kDomainNames) domains.emplace_back(d);
        for (const auto& [name, _] : bench.maps())
          if (bench.domain_of(name) == "unassigned") {
            domains.emplace_back("unassigned");
            break;
          }
      }
      for (const auto& d : domains) {
        Scope sub = scope;
        sub.domain = d;
        const auto maps = scope_maps(bench, sub);
        ProgressSummary s;
        for_each_instance(bench, sub, [&](const InstanceId& id) { s.count(classify(book.find(id))); });
        s.finish();
        total += s.total;
        std::vector<std::string> row{d, std::to_string(maps.size())};
        auto cells = detail::summary_cells(s);
        row.insert(row.end(), cells.begin(), cells.end());
        t.rows.push_back(std::move(row));
      }
      break;
    }
  }
  if (total == 0) throw Error(Errc::EmptyScope, "no instances in scope " + scope.label());
  return t;
}

struct ExportedInstance {
  InstanceId instance;
  std::optional<std::int64_t> lower_bound;
  std::optional<std::int64_t> solution_cost;
  InstanceState state = InstanceState::Unknown;
};

/// Reads an instance-level export back.
inline std::vector<ExportedInstance> read_instance_export(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty() || rows.front().fields != instance_export_header())
    throw Error(Errc::MissingHeader, "not an instance-level export");
  std::vector<ExportedInstance> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    if (f.size() != instance_export_header().size())
      throw Error(Errc::ColumnCountMismatch, "export row " + std::to_string(i), static_cast<std::int64_t>(i));
    auto label = parse_scenario_label(f[1]);
    auto agents = mapft::detail::parse_int<int>(f[2]);
    if (!label || !agents) throw Error(Errc::MalformedRow, "export row " + std::to_string(i));
    ExportedInstance e;
    e.instance = {f[0], label->first, label->second, *agents};
    e.lower_bound = mapft::detail::parse_int(f[3]);
    e.solution_cost = mapft::detail::parse_int(f[4]);
    e.state = f[5] == "closed" ? InstanceState::Closed
              : f[5] == "solved" ? InstanceState::Solved
                                 : InstanceState::Unknown;
    out.push_back(std::move(e));
  }
  return out;
}

/// Summary recomputed from exported bounds (not from the state column).
inline ProgressSummary summarize(const std::vector<ExportedInstance>& rows, std::string label = "all") {
  ProgressSummary s;
  s.scope = std::move(label);
  for (const auto& r : rows) {
    InstanceRecord rec;
    if (r.lower_bound) rec.best_lb = BestLowerBound{*r.lower_bound, {}, {}};
    if (r.solution_cost) rec.best_cost = BestSolution{*r.solution_cost, {}, {}, {}, {}};
    s.count(classify(rec));
  }
  s.finish();
  return s;
}

}  // namespace mapft
