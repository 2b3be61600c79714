// Command-line front end. Every command delegates to the library; this file
// only parses flags and formats results.
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mapft/mapft.hpp"

namespace fs = std::filesystem;
using namespace mapft;

namespace {

enum class Format { Table, Csv, Json };

struct Globals {
  std::string bench_root;
  std::string store_dir;
  Format format = Format::Table;
};

// Usage and input problems exit 2; a well-formed request with a negative
// answer (invalid plan, unreachable pair, rejected rows) exits 1.
int exit_code_for(Errc code) {
  switch (code) {
    case Errc::GoalNotReached:
    case Errc::OutOfBounds:
    case Errc::IntoObstacle:
    case Errc::NonTraversableEndpoint:
    case Errc::UnreachablePair:
    case Errc::BucketUnsatisfiable:
    case Errc::NotEnoughCells:
    case Errc::BoundConflict:
    case Errc::EmptyScope:
    case Errc::InconsistentBounds:
    case Errc::DegenerateLowerBound:
    case Errc::EndpointBlocked:
    case Errc::NoSolution: return 1;
    default: return 2;
  }
}

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

Benchmark load_bench(const Globals& g) {
  if (g.bench_root.empty())
    throw Error(Errc::Io, "no benchmark root: pass --bench or set MAPFT_BENCHMARK_ROOT");
  return Benchmark::load_directory(g.bench_root);
}

Store open_store(const Globals& g) {
  if (g.store_dir.empty()) throw Error(Errc::Io, "no store: pass --store or set MAPFT_STORE");
  return Store::open(g.store_dir);
}

void print(const Table& t, Format f) {
  if (f == Format::Csv) {
    std::cout << t.to_csv();
    return;
  }
  if (f == Format::Json) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::object();
      for (std::size_t i = 0; i < t.header.size(); ++i) row[t.header[i]] = r[i];
      rows.push_back(std::move(row));
    }
    std::cout << rows.dump(2) << '\n';
    return;
  }
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    width[i] = t.header[i].size();
    for (const auto& r : t.rows) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += "  ";
      out += cells[i];
      if (i + 1 < cells.size()) out += std::string(width[i] - cells[i].size(), ' ');
    }
    std::cout << out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

struct ScopeFlags {
  std::string domain, map, scenario;
  int agents_min = 0, agents_max = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--domain", domain, "Restrict to a domain");
    cmd->add_option("--map", map, "Restrict to a map");
    cmd->add_option("--scenario", scenario, "Restrict to a scenario such as even-1 (needs --map)");
    cmd->add_option("--agents-min", agents_min, "Smallest agent count");
    cmd->add_option("--agents-max", agents_max, "Largest agent count");
  }

  Scope scope() const {
    Scope s;
    if (!domain.empty()) s.domain = domain;
    if (!map.empty()) s.map = map;
    if (!scenario.empty()) {
      auto label = parse_scenario_label(scenario);
      if (!label) throw Error(Errc::InvalidScope, "bad scenario label '" + scenario + "'");
      s.scenario = label;
    }
    if (agents_min > 0) s.agents_min = agents_min;
    if (agents_max > 0) s.agents_max = agents_max;
    return s;
  }
};

struct InstanceFiles {
  std::string map_file, scen_file;
  int agents = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--map", map_file, "Map file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--scen", scen_file, "Scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--agents", agents, "Number of agents (first n pairs)")->required();
  }

  std::pair<GridMap, std::vector<AgentPair>> load() const {
    auto map = parse_map(read_file(map_file), fs::path(map_file).stem().string());
    const auto scen = parse_scenario(read_file(scen_file));
    bind_scenario(map, scen);
    return {std::move(map), instance_agents(scen, agents)};
  }
};

int cmd_validate(const Globals& g, const InstanceFiles& inst, const std::string& plan_file,
                 std::optional<std::int64_t> claimed) {
  const auto [map, pairs] = inst.load();
  std::string field(detail::trim(read_file(plan_file)));
  std::replace(field.begin(), field.end(), '\n', ';');
  field.erase(std::remove(field.begin(), field.end(), '\r'), field.end());
  const auto plans = parse_plan_field(field);
  const auto v = validate_plan_set(map, pairs, plans, claimed);

  if (g.format == Format::Json) {
    json conflicts = json::array(), errors = json::array();
    for (const auto& c : v.conflicts)
      conflicts.push_back({{"kind", c.kind == ConflictKind::Vertex ? "vertex" : "edge"},
                           {"agents", {c.first, c.second}},
                           {"time", c.time},
                           {"from", {c.from.x, c.from.y}},
                           {"to", {c.to.x, c.to.y}}});
    for (const auto& e : v.agent_errors)
      errors.push_back({{"agent", e.agent}, {"code", to_string(e.code)}, {"timestep", e.timestep}});
    json out{{"valid", v.valid}, {"conflicts", conflicts}, {"agent_errors", errors}, {"reason", v.reason()}};
    out["computed_cost"] = v.computed_cost ? json(*v.computed_cost) : json(nullptr);
    if (v.cost_mismatch) out["cost_mismatch"] = {{"claimed", v.cost_mismatch->claimed}, {"computed", v.cost_mismatch->computed}};
    std::cout << out.dump(2) << '\n';
  } else if (g.format == Format::Csv) {
    std::cout << csv::row({"valid", "computed_cost", "reason"})
              << csv::row({v.valid ? "true" : "false", v.computed_cost ? std::to_string(*v.computed_cost) : "",
                           v.reason()});
  } else {
    if (v.valid) {
      std::cout << "valid sum-of-costs " << *v.computed_cost << '\n';
    } else {
      for (const auto& e : v.agent_errors)
        std::cout << "agent " << e.agent << ' ' << to_string(e.code)
                  << (e.timestep >= 0 ? " at t=" + std::to_string(e.timestep) : "") << '\n';
      for (const auto& c : v.conflicts) std::cout << describe(c) << '\n';
      if (v.cost_mismatch)
        std::cout << "CostMismatch claimed " << v.cost_mismatch->claimed << " computed "
                  << v.cost_mismatch->computed << '\n';
      std::cout << "invalid: " << v.reason() << '\n';
    }
  }
  return v.valid ? 0 : 1;
}

int cmd_lb(const Globals& g, const InstanceFiles& inst) {
  const auto [map, pairs] = inst.load();
  const auto lb = trivial_lower_bound(map, pairs);
  if (g.format == Format::Json) {
    std::cout << json{{"lower_bound", lb.total}, {"per_agent", lb.per_agent}}.dump(2) << '\n';
    return 0;
  }
  Table t{{"agent", "distance"}, {}};
  for (std::size_t i = 0; i < lb.per_agent.size(); ++i)
    t.rows.push_back({std::to_string(i), std::to_string(lb.per_agent[i])});
  if (g.format == Format::Table) std::cout << "lower bound " << lb.total << '\n';
  print(t, g.format);
  return 0;
}

int cmd_genscen(const std::string& map_file, const std::string& kind, std::uint64_t seed, int index, int agents,
                const std::string& out) {
  const auto map = parse_map(read_file(map_file), fs::path(map_file).stem().string());
  const auto k = parse_scen_kind(kind);
  if (!k) throw Error(Errc::InvalidScope, "kind must be even or random");
  Scenario scen;
  if (*k == ScenKind::Even) {
    scen = generate_even_scenario(map, seed, index);
  } else {
    if (agents < 1) throw Error(Errc::InvalidScope, "random scenarios need --agents");
    scen = generate_random_scenario(map, static_cast<std::size_t>(agents), seed, index);
  }
  const auto text = serialize_scenario(scen);
  if (out.empty()) std::cout << text;
  else write_file(out, text);
  return 0;
}

void print_report(const IngestReport& r, const RecordBook& book, Format f) {
  if (f == Format::Json) {
    std::cout << report_to_json(r, book).dump(2) << '\n';
    return;
  }
  Table t{{"row", "line", "status", "instance", "detail"}, {}};
  for (const auto& o : r.outcomes)
    t.rows.push_back({std::to_string(o.row), std::to_string(o.line), std::string(to_string(o.status)),
                      o.instance ? to_string(*o.instance) : "", o.detail});
  if (f == Format::Table)
    std::cout << "batch " << r.batch_id << " (" << r.algorithm << "): " << r.accepted << " accepted, "
              << r.rejected << " rejected" << (r.duplicate_batch ? ", already ingested" : "") << '\n';
  print(t, f);
  if (f == Format::Table)
    for (const auto& b : r.revoked_batches) std::cout << "revoked lower bounds of batch " << b << '\n';
}

int cmd_ingest(const Globals& g, const std::string& descriptor, const std::string& csv_file) {
  const auto bench = load_bench(g);
  auto store = open_store(g);
  const auto report = ingest_batch(store, bench, read_file(descriptor), read_file(csv_file));
  print_report(report, store.book(), g.format);
  return report.rejected == 0 ? 0 : 1;
}

int cmd_export(const Globals& g, const ScopeFlags& scope, const std::string& level_name) {
  const auto level = parse_export_level(level_name);
  if (!level) throw Error(Errc::InvalidScope, "level must be instance, scenario, map or domain");
  const auto bench = load_bench(g);
  const auto store = open_store(g);
  print(export_results(bench, store.book(), scope.scope(), *level), g.format);
  return 0;
}

int cmd_progress(const Globals& g, const ScopeFlags& scope) {
  const auto bench = load_bench(g);
  const auto store = open_store(g);
  const auto s = progress_summary(bench, store.book(), scope.scope());
  if (g.format == Format::Json) {
    std::cout << summary_to_json(s).dump(2) << '\n';
    return 0;
  }
  char pct[3][16];
  std::snprintf(pct[0], sizeof pct[0], "%.2f", s.closed_pct);
  std::snprintf(pct[1], sizeof pct[1], "%.2f", s.solved_pct);
  std::snprintf(pct[2], sizeof pct[2], "%.2f", s.unknown_pct);
  print(Table{{"scope", "instances", "closed", "solved", "unknown", "closed_pct", "solved_pct", "unknown_pct"},
              {{s.scope, std::to_string(s.total), std::to_string(s.closed), std::to_string(s.solved),
                std::to_string(s.unknown), pct[0], pct[1], pct[2]}}},
        g.format);
  return 0;
}

int cmd_compare(const Globals& g, const ScopeFlags& scope, bool include_oracle) {
  const auto bench = load_bench(g);
  const auto store = open_store(g);
  Table t{{"algorithm", "closed", "solved", "best_lower_bound", "best_solution"}, {}};
  for (const auto& [name, m] : algorithm_comparison(bench, store.book(), scope.scope(), include_oracle))
    t.rows.push_back({name, std::to_string(m.closed), std::to_string(m.solved), std::to_string(m.best_lower_bound),
                      std::to_string(m.best_solution)});
  print(t, g.format);
  return 0;
}

int cmd_seed(const Globals& g) {
  const auto bench = load_bench(g);
  auto store = open_store(g);
  const auto added = seed_trivial_bounds(store, bench);
  std::cout << "recorded " << added << " trivial lower bounds\n";
  return 0;
}

int cmd_revoke(const Globals& g, const std::string& batch, const std::string& reason) {
  auto store = open_store(g);
  const auto changed = store.revoke_batch_lower_bounds(batch, reason);
  Table t{{"instance", "lower_bound", "state"}, {}};
  for (const auto& rec : changed)
    t.rows.push_back({to_string(rec.instance), rec.best_lb ? std::to_string(rec.best_lb->value) : "",
                      std::string(to_string(classify(rec)))});
  print(t, g.format);
  return 0;
}

struct RunFlags {
  std::string adapter, map, scenario, out_dir;
  RunnerPolicy policy;
  int max_agents = 0;
  bool ingest = false;
};

int cmd_run(const Globals& g, const RunFlags& f) {
  const auto adapter = parse_adapter(read_file(f.adapter));
  const auto bench = load_bench(g);
  const auto label = parse_scenario_label(f.scenario);
  if (!label) throw Error(Errc::InvalidScope, "bad scenario label '" + f.scenario + "'");
  auto policy = f.policy;
  if (f.max_agents > 0) policy.max_agents = f.max_agents;
  const auto result = run_scenario(adapter, bench, f.map, label->first, label->second, policy, run_supervised,
                                   [](const Attempt& a) {
                                     std::cerr << "n=" << a.agents << ' ' << to_string(a.status);
                                     if (a.cost) std::cerr << " cost=" << *a.cost;
                                     if (a.lower_bound) std::cerr << " lb=" << *a.lower_bound;
                                     if (!a.detail.empty()) std::cerr << " (" << a.detail << ')';
                                     std::cerr << '\n';
                                   });
  const auto descriptor = render_descriptor(adapter.algorithm);
  const auto csv_text = result.csv();
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    const auto stem = f.map + "-" + f.scenario + "-" + adapter.algorithm.name;
    write_file(fs::path(f.out_dir) / (stem + ".csv"), csv_text);
    write_file(fs::path(f.out_dir) / (stem + ".txt"), descriptor);
  }
  if (f.ingest) {
    auto store = open_store(g);
    const auto report = ingest_batch(store, bench, descriptor, csv_text);
    print_report(report, store.book(), g.format);
  } else if (f.out_dir.empty()) {
    std::cout << csv_text;
  }
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_serve(const Globals& g, const std::string& bind, int port, std::size_t upload_cap) {
  ServiceConfig config;
  config.upload_cap = upload_cap;
  Service service(load_bench(g), open_store(g), config);
  httplib::Server server;
  service.mount(server);
  g_server = &server;
  std::signal(SIGINT, [](int) { if (g_server) g_server->stop(); });
  std::signal(SIGTERM, [](int) { if (g_server) g_server->stop(); });
  if (port == 0) port = server.bind_to_any_port(bind);
  else if (!server.bind_to_port(bind, port)) throw Error(Errc::Io, "cannot bind " + bind + ":" + std::to_string(port));
  std::cerr << "listening on " << bind << ':' << port << '\n';
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark tracker for multi-agent path finding"};
  app.require_subcommand(1);
  Globals g;
  g.bench_root = env_or("MAPFT_BENCHMARK_ROOT");
  g.store_dir = env_or("MAPFT_STORE");
  app.add_option("--bench", g.bench_root, "Benchmark root directory (env MAPFT_BENCHMARK_ROOT)");
  app.add_option("--store", g.store_dir, "Store directory (env MAPFT_STORE)");
  const std::map<std::string, Format> formats{{"table", Format::Table}, {"csv", Format::Csv}, {"json", Format::Json}};
  app.add_option("--format", g.format, "Output format: table, csv or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  std::function<int()> action;

  auto* validate = app.add_subcommand("validate", "Check a plan set and compute its sum of costs");
  InstanceFiles v_inst;
  std::string plan_file;
  std::optional<std::int64_t> claimed;
  v_inst.add(validate);
  validate->add_option("--plan", plan_file, "Plan file: per-agent action strings separated by ';' or newlines")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--cost", claimed, "Claimed sum of costs");
  validate->callback([&] { action = [&] { return cmd_validate(g, v_inst, plan_file, claimed); }; });

  auto* lb = app.add_subcommand("lb", "Trivial lower bound of an instance");
  InstanceFiles lb_inst;
  lb_inst.add(lb);
  lb->callback([&] { action = [&] { return cmd_lb(g, lb_inst); }; });

  auto* genscen = app.add_subcommand("genscen", "Generate a scenario for a map");
  std::string gs_map, gs_kind = "even", gs_out;
  std::uint64_t gs_seed = 1;
  int gs_index = 1, gs_agents = 0;
  genscen->add_option("--map", gs_map, "Map file")->required()->check(CLI::ExistingFile);
  genscen->add_option("--kind", gs_kind, "even or random");
  genscen->add_option("--seed", gs_seed, "Random seed");
  genscen->add_option("--index", gs_index, "Scenario index");
  genscen->add_option("--agents", gs_agents, "Pairs to draw (random scenarios)");
  genscen->add_option("--out", gs_out, "Output file (default: stdout)");
  genscen->callback([&] { action = [&] { return cmd_genscen(gs_map, gs_kind, gs_seed, gs_index, gs_agents, gs_out); }; });

  auto* ingest = app.add_subcommand("ingest", "Validate and record a submission batch");
  std::string descriptor, csv_file;
  ingest->add_option("--descriptor", descriptor, "Batch descriptor file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--csv", csv_file, "Submission CSV")->required()->check(CLI::ExistingFile);
  ingest->callback([&] { action = [&] { return cmd_ingest(g, descriptor, csv_file); }; });

  auto* exp = app.add_subcommand("export", "Export results at one level");
  ScopeFlags exp_scope;
  std::string level = "instance";
  exp_scope.add(exp);
  exp->add_option("--level", level, "instance, scenario, map or domain");
  exp->callback([&] { action = [&] { return cmd_export(g, exp_scope, level); }; });

  auto* progress = app.add_subcommand("progress", "Closed / solved / unknown counts for a scope");
  ScopeFlags pr_scope;
  pr_scope.add(progress);
  progress->callback([&] { action = [&] { return cmd_progress(g, pr_scope); }; });

  auto* compare = app.add_subcommand("compare", "Per-algorithm counters for a scope");
  ScopeFlags cmp_scope;
  bool include_oracle = false;
  cmp_scope.add(compare);
  compare->add_flag("--include-oracle", include_oracle, "Also list the system's trivial bounds");
  compare->callback([&] { action = [&] { return cmd_compare(g, cmp_scope, include_oracle); }; });

  auto* seed = app.add_subcommand("seed-trivial", "Record trivial lower bounds where none exist");
  seed->callback([&] { action = [&] { return cmd_seed(g); }; });

  auto* revoke = app.add_subcommand("revoke", "Revoke every lower bound of a batch");
  std::string batch, reason = "revoked by operator";
  revoke->add_option("--batch", batch, "Batch id")->required();
  revoke->add_option("--reason", reason, "Reason recorded in the log");
  revoke->callback([&] { action = [&] { return cmd_revoke(g, batch, reason); }; });

  auto* run = app.add_subcommand("run", "Run a solver over one scenario");
  RunFlags rf;
  run->add_option("--adapter", rf.adapter, "Adapter descriptor file")->required()->check(CLI::ExistingFile);
  run->add_option("--map", rf.map, "Map name")->required();
  run->add_option("--scenario", rf.scenario, "Scenario label, e.g. even-1")->required();
  run->add_option("--budget", rf.policy.base_budget, "Seconds per instance window");
  run->add_flag("--lb-extension", rf.policy.lb_extension, "Grant another window while the lower bound rises");
  run->add_option("--failure-stop", rf.policy.failure_stop, "Consecutive failures that end the scenario");
  run->add_option("--agent-step", rf.policy.agent_step, "Agent count increment");
  run->add_option("--first-agents", rf.policy.first_agents, "First agent count");
  run->add_option("--max-agents", rf.max_agents, "Last agent count");
  run->add_option("--grace", rf.policy.grace, "Seconds allowed for a killed solver to go away");
  run->add_option("--out-dir", rf.out_dir, "Write <map>-<scenario>-<algorithm>.csv/.txt here");
  run->add_flag("--ingest", rf.ingest, "Ingest the batch into the store");
  run->callback([&] { action = [&] { return cmd_run(g, rf); }; });

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string bind = env_or("MAPFT_BIND", "127.0.0.1");
  int port = 8080;
  std::size_t upload_cap = 64u << 20;
  if (auto cap = env_or("MAPFT_UPLOAD_CAP"); !cap.empty()) upload_cap = std::stoull(cap);
  serve->add_option("--bind", bind, "Address to listen on (env MAPFT_BIND)");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--upload-cap", upload_cap, "Largest accepted upload in bytes (env MAPFT_UPLOAD_CAP)");
  serve->callback([&] { action = [&] { return cmd_serve(g, bind, port, upload_cap); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
