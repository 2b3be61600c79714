#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/benchmark.hpp"
#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"
#include "mapft/ingest.hpp"
#include "mapft/plan.hpp"
#include "mapft/validator.hpp"

namespace mapft {

struct RunnerPolicy {
  double base_budget = 60.0;  // seconds per window
  bool lb_extension = false;
  int failure_stop = 2;       // consecutive failures that end a scenario
  int agent_step = 1;
  int first_agents = 1;
  std::optional<int> max_agents;
  double grace = 2.0;         // bound on kill latency after a deadline

  void check() const {
    if (!(base_budget > 0)) throw Error(Errc::MalformedDescriptor, "base budget must be positive");
    if (failure_stop < 1) throw Error(Errc::MalformedDescriptor, "failure stop must be at least 1");
    if (agent_step < 1 || first_agents < 1) throw Error(Errc::MalformedDescriptor, "agent counts must be positive");
    if (grace < 0) throw Error(Errc::MalformedDescriptor, "grace must not be negative");
  }
};

/// How to call one solver. The command is run by /bin/sh after substituting
/// {map}, {scen}, {agents} and {budget}.
struct SolverAdapter {
  AlgorithmMeta algorithm;
  std::string command;
  bool lower_bounds = false;  // solver reports `lb` lines; enables budget extension
};

/// Adapter descriptor file: the batch descriptor keys plus `command` and
/// `lower_bounds: true|false`.
inline SolverAdapter parse_adapter(std::string_view text) {
  SolverAdapter a;
  std::string meta;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    const auto key = colon == std::string_view::npos ? std::string() : detail::lower(detail::trim(line.substr(0, colon)));
    const auto value = colon == std::string_view::npos ? std::string_view() : detail::trim(line.substr(colon + 1));
    if (key == "command") {
      a.command = std::string(value);
    } else if (key == "lower_bounds") {
      const auto v = detail::lower(value);
      if (v != "true" && v != "false")
        throw Error(Errc::MalformedDescriptor, "lower_bounds must be true or false",
                    static_cast<std::int64_t>(line_no));
      a.lower_bounds = v == "true";
    } else {
      meta += std::string(line) + "\n";
    }
  }
  if (a.command.empty()) throw Error(Errc::MalformedDescriptor, "adapter has no command");
  a.algorithm = parse_descriptor(meta);
  return a;
}

namespace detail {

inline std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

}  // namespace detail

inline std::string expand_command(std::string_view tmpl, const std::filesystem::path& map_path,
                                  const std::filesystem::path& scen_path, int agents, double budget) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    auto try_sub = [&](std::string_view key, const std::string& value) {
      if (tmpl.substr(i, key.size()) != key) return false;
      out += value;
      i += key.size();
      return true;
    };
    if (try_sub("{map}", detail::shell_quote(map_path.string())) ||
        try_sub("{scen}", detail::shell_quote(scen_path.string())) ||
        try_sub("{agents}", std::to_string(agents)) ||
        try_sub("{budget}", detail::format_seconds(budget)))
      continue;
    out += tmpl[i++];
  }
  return out;
}

/// `lb <int>` line value, if the line is one.
inline std::optional<std::int64_t> lb_line_value(std::string_view line) {
  std::string_view rest;
  if (!detail::starts_with_word(detail::trim(line), "lb", rest)) return std::nullopt;
  return detail::parse_int<std::int64_t>(detail::trim(rest));
}

struct SolverReport {
  std::optional<std::int64_t> lower_bound;  // largest reported
  std::optional<std::int64_t> cost;
  std::optional<std::string> plan;
};

/// Strict reading of solver output: blank lines and '#' comments aside,
/// every line is `lb <int>`, `cost <int>` or `plan <field>`. Later cost and
/// plan lines replace earlier ones; cost and plan come together or not at all.
inline SolverReport parse_solver_output(const std::vector<std::string>& lines) {
  SolverReport r;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    std::string_view rest;
    auto violation = [&](const std::string& why) {
      return Error(Errc::OutputContractViolation, "output line " + std::to_string(i + 1) + ": " + why,
                   static_cast<std::int64_t>(i + 1));
    };
    if (detail::starts_with_word(line, "lb", rest) || detail::starts_with_word(line, "cost", rest)) {
      const bool is_lb = line.front() == 'l';
      auto v = detail::parse_int<std::int64_t>(detail::trim(rest));
      if (!v || *v < 0) throw violation("expected a non-negative integer");
      if (is_lb) r.lower_bound = std::max(r.lower_bound.value_or(*v), *v);
      else r.cost = *v;
    } else if (detail::starts_with_word(line, "plan", rest)) {
      r.plan = std::string(detail::trim(rest));
    } else {
      throw violation("unrecognised line '" + std::string(line) + "'");
    }
  }
  if (r.cost.has_value() != r.plan.has_value())
    throw Error(Errc::OutputContractViolation, "cost and plan must be reported together");
  return r;
}

struct Supervision {
  double budget = 60;
  bool extend_on_lb = false;
  double grace = 2;
};

/// What happened to one solver process.
struct ProcessOutcome {
  enum class End { Exited, Signaled, TimedOut, SpawnFailed };
  End end = End::Exited;
  int exit_code = 0;
  std::vector<std::string> lines;  // complete stdout lines only
  double wall_seconds = 0;
  int windows = 1;
};

/// Runs `command` under /bin/sh in its own process group. At each window
/// deadline the run either gets another window (extension enabled and the
/// lower bound rose during the window just ended; for the first window,
/// relative to the first bound reported) or the group is killed. Output is
/// read for at most `grace` seconds after the kill.
inline ProcessOutcome run_supervised(const std::string& command, const Supervision& sup) {
  using clock = std::chrono::steady_clock;
  ProcessOutcome out;
  const auto t0 = clock::now();
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    out.end = ProcessOutcome::End::SpawnFailed;
    return out;
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    out.end = ProcessOutcome::End::SpawnFailed;
    return out;
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(fds[1], STDOUT_FILENO);
    const int devnull = ::open("/dev/null", O_RDWR);
    if (devnull >= 0) {
      ::dup2(devnull, STDIN_FILENO);
      ::dup2(devnull, STDERR_FILENO);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also done in the child; whichever runs first wins
  ::close(fds[1]);

  auto seconds = [](double s) {
    return std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(s));
  };
  auto deadline = t0 + seconds(sup.budget);
  std::optional<clock::time_point> killed_at;
  std::optional<std::int64_t> first_lb, window_start_lb, current_lb;
  std::string pending;

  auto take_lines = [&](std::string_view chunk) {
    pending += chunk;
    std::size_t start = 0;
    for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string line = pending.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (auto v = lb_line_value(line)) {
        if (!first_lb) first_lb = *v;
        current_lb = std::max(current_lb.value_or(*v), *v);
      }
      out.lines.push_back(std::move(line));
    }
    pending.erase(0, start);
  };

  char buf[4096];
  for (;;) {
    const auto now = clock::now();
    if (!killed_at && now >= deadline) {
      const bool rose = out.windows == 1 ? (current_lb && first_lb && *current_lb > *first_lb)
                                         : (current_lb && (!window_start_lb || *current_lb > *window_start_lb));
      if (sup.extend_on_lb && rose) {
        window_start_lb = current_lb;
        deadline += seconds(sup.budget);
        ++out.windows;
        continue;
      }
      ::kill(-pid, SIGKILL);
      killed_at = now;
    }
    if (killed_at && now >= *killed_at + seconds(sup.grace)) break;
    const auto until = killed_at ? *killed_at + seconds(sup.grace) : deadline;
    const auto wait_ms = std::max<long long>(
        1, std::chrono::duration_cast<std::chrono::milliseconds>(until - now).count());
    pollfd p{fds[0], POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(wait_ms, 1000)));
    if (rc < 0 && errno != EINTR) break;
    if (rc <= 0) continue;
    const auto n = ::read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;  // EOF: every writer is gone
    take_lines({buf, static_cast<std::size_t>(n)});
  }
  ::close(fds[0]);

  int status = 0;
  if (!killed_at) {
    // Output closed before the deadline; the shell may still be exiting.
    for (;;) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (r < 0) break;
      if (clock::now() >= deadline) {
        ::kill(-pid, SIGKILL);
        killed_at = clock::now();
        ::waitpid(pid, &status, 0);
        break;
      }
      ::usleep(1000);
    }
  } else {
    ::waitpid(pid, &status, 0);
  }
  ::kill(-pid, SIGKILL);  // stray members of the group

  out.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (killed_at) {
    out.end = ProcessOutcome::End::TimedOut;
  } else if (WIFEXITED(status)) {
    out.exit_code = WEXITSTATUS(status);
    out.end = out.exit_code == 127 || out.exit_code == 126 ? ProcessOutcome::End::SpawnFailed
                                                           : ProcessOutcome::End::Exited;
  } else {
    out.end = ProcessOutcome::End::Signaled;
    out.exit_code = WIFSIGNALED(status) ? WTERMSIG(status) : -1;
  }
  return out;
}

/// Process launcher used by the runner; tests substitute scripted fakes.
using Invoker = std::function<ProcessOutcome(const std::string& command, const Supervision&)>;

enum class AttemptStatus { Solved, Timeout, Crashed, SpawnFailure, ContractViolation, InvalidPlan };

constexpr std::string_view to_string(AttemptStatus s) noexcept {
  switch (s) {
    case AttemptStatus::Solved: return "solved";
    case AttemptStatus::Timeout: return "timeout";
    case AttemptStatus::Crashed: return "crashed";
    case AttemptStatus::SpawnFailure: return "AdapterSpawnFailure";
    case AttemptStatus::ContractViolation: return "OutputContractViolation";
    case AttemptStatus::InvalidPlan: return "invalid-plan";
  }
  return "crashed";
}

struct Attempt {
  int agents = 0;
  AttemptStatus status = AttemptStatus::Crashed;
  double wall_seconds = 0;
  int windows = 1;
  std::optional<std::int64_t> lower_bound;
  std::optional<std::int64_t> cost;
  std::string detail;

  bool failed() const noexcept { return status != AttemptStatus::Solved; }
};

struct RunResult {
  std::vector<Attempt> attempts;
  std::vector<BatchEntry> entries;  // what goes into the submission batch

  std::string csv() const { return render_submission_csv(entries); }
};

/// Runs the solver on n = first, first+step, ... agents of one scenario until
/// `failure_stop` attempts in a row fail or the scenario is exhausted. A run
/// counts as solved only with a cost and a plan that validates to it; lower
/// bounds from output that parses are kept either way.
inline RunResult run_scenario(const SolverAdapter& adapter, const Benchmark& bench,
                              const std::string& map_name, ScenKind kind, int index,
                              const RunnerPolicy& policy, const Invoker& invoke = run_supervised,
                              const std::function<void(const Attempt&)>& progress = {}) {
  policy.check();
  const auto& map = bench.map(map_name);
  const auto& scen = bench.scenario(map_name, kind, index);

  // The solver reads the benchmark files; write them out so in-memory
  // benchmarks work the same way as loaded ones.
  namespace fs = std::filesystem;
  const auto work = fs::temp_directory_path() /
                    ("mapft-run-" + std::to_string(::getpid()) + "-" +
                     detail::fnv1a_hex(map_name + scenario_label(kind, index) + adapter.command));
  fs::create_directories(work);
  const auto map_path = work / (map_name + ".map");
  const auto scen_path = work / scenario_file_name(scen);
  write_file(map_path, serialize_map(map));
  write_file(scen_path, serialize_scenario(scen));
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{work};

  RunResult result;
  const int last = std::min(static_cast<int>(scen.entries.size()),
                            policy.max_agents.value_or(static_cast<int>(scen.entries.size())));
  const Supervision sup{policy.base_budget, policy.lb_extension && adapter.lower_bounds, policy.grace};
  int consecutive = 0;
  for (int n = policy.first_agents; n <= last && consecutive < policy.failure_stop; n += policy.agent_step) {
    Attempt a;
    a.agents = n;
    const auto proc = invoke(expand_command(adapter.command, map_path, scen_path, n, policy.base_budget), sup);
    a.wall_seconds = proc.wall_seconds;
    a.windows = proc.windows;

    std::optional<SolverReport> report;
    if (proc.end == ProcessOutcome::End::SpawnFailed) {
      a.status = AttemptStatus::SpawnFailure;
      a.detail = "solver could not be started (exit " + std::to_string(proc.exit_code) + ")";
    } else {
      try {
        report = parse_solver_output(proc.lines);
      } catch (const Error& e) {
        a.status = AttemptStatus::ContractViolation;
        a.detail = e.what();
      }
    }
    if (report) {
      a.lower_bound = report->lower_bound;
      const bool clean_exit = proc.end == ProcessOutcome::End::Exited && proc.exit_code == 0;
      if (report->cost && (clean_exit || proc.end == ProcessOutcome::End::TimedOut)) {
        const InstanceId id{map_name, kind, index, n};
        std::string why;
        try {
          const auto plans = parse_plan_field(*report->plan);
          const auto pairs = instance_agents(scen, n);
          if (plans.size() != pairs.size()) {
            why = std::to_string(plans.size()) + " plans for " + std::to_string(pairs.size()) + " agents";
          } else {
            const auto verdict = validate_plan_set(map, pairs, plans, report->cost);
            if (verdict.valid) {
              a.status = AttemptStatus::Solved;
              a.cost = verdict.computed_cost;
              report->plan = join_plans(plans);
            } else {
              why = verdict.reason();
            }
          }
        } catch (const Error& e) {
          why = e.what();
        }
        if (!why.empty()) {
          a.status = AttemptStatus::InvalidPlan;
          a.detail = why;
        }
      } else if (proc.end == ProcessOutcome::End::TimedOut) {
        a.status = AttemptStatus::Timeout;
        a.detail = "no solution within " + detail::format_seconds(policy.base_budget * proc.windows) + " s";
      } else {
        a.status = AttemptStatus::Crashed;
        a.detail = proc.end == ProcessOutcome::End::Signaled
                       ? "killed by signal " + std::to_string(proc.exit_code)
                       : (report->cost ? "solution reported with exit status " : "no solution, exit status ") +
                             std::to_string(proc.exit_code);
      }
      if (a.status != AttemptStatus::InvalidPlan && (a.lower_bound || a.cost)) {
        BatchEntry e;
        e.instance = {map_name, kind, index, n};
        e.lower_bound = a.lower_bound;
        if (a.status == AttemptStatus::Solved) {
          e.solution_cost = a.cost;
          e.plan = report->plan;
        }
        if (e.lower_bound || e.solution_cost) result.entries.push_back(std::move(e));
      }
    }
    consecutive = a.failed() ? consecutive + 1 : 0;
    if (progress) progress(a);
    result.attempts.push_back(std::move(a));
  }
  return result;
}

}  // namespace mapft
