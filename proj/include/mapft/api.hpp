#pragma once

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mapft/benchmark.hpp"
#include "mapft/error.hpp"
#include "mapft/ingest.hpp"
#include "mapft/tracking/analytics.hpp"
#include "mapft/tracking/store.hpp"

namespace mapft {

struct ServiceConfig {
  std::size_t upload_cap = 64u << 20;       // bytes; larger uploads get 413
  std::size_t async_threshold = 1u << 20;   // bytes; larger uploads become jobs
  std::size_t default_page = 100;
  std::size_t max_page = 10000;
};

/// Report as JSON, shared by the service and the CLI.
inline json report_to_json(const IngestReport& r, const RecordBook& book) {
  json rows = json::array();
  for (const auto& o : r.outcomes) {
    json row{{"row", o.row}, {"line", o.line}, {"status", to_string(o.status)}};
    if (o.instance) row["instance"] = instance_to_json(*o.instance);
    if (!o.detail.empty()) row["detail"] = o.detail;
    rows.push_back(std::move(row));
  }
  json revocations = json::array();
  for (const auto& batch : r.revoked_batches) {
    json affected = json::array();
    if (auto it = book.batches().find(batch); it != book.batches().end())
      for (const auto& id : it->second.instances) affected.push_back(instance_to_json(id));
    revocations.push_back({{"batch_id", batch}, {"instances", std::move(affected)}});
  }
  return {{"batch_id", r.batch_id},     {"algorithm", r.algorithm}, {"duplicate_batch", r.duplicate_batch},
          {"accepted", r.accepted},     {"rejected", r.rejected},   {"outcomes", std::move(rows)},
          {"revocations", std::move(revocations)}};
}

inline json summary_to_json(const ProgressSummary& s) {
  return {{"scope", s.scope},         {"total", s.total},          {"closed", s.closed},
          {"solved", s.solved},       {"unknown", s.unknown},      {"closed_pct", s.closed_pct},
          {"solved_pct", s.solved_pct}, {"unknown_pct", s.unknown_pct}};
}

inline json metrics_to_json(const AlgoMetrics& m) {
  return {{"closed", m.closed},
          {"solved", m.solved},
          {"best_lower_bound", m.best_lower_bound},
          {"best_solution", m.best_solution}};
}

inline int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownDomain:
    case Errc::UnknownMap:
    case Errc::UnknownScenario:
    case Errc::UnknownAlgorithm:
    case Errc::NoSolution:
    case Errc::UnknownBatch:
    case Errc::EmptyScope: return 404;
    case Errc::CorruptLog:
    case Errc::StorageFailure:
    case Errc::Io: return 500;
    default: return 400;
  }
}

/// JSON-over-HTTP front of a benchmark and its store, mounted under /api/v1/.
/// Reads take a shared lock; a submission holds the exclusive lock while it
/// is validated and committed, so no reader sees half a batch.
class Service {
 public:
  Service(Benchmark bench, Store store, ServiceConfig config = {})
      : bench_(std::move(bench)), store_(std::move(store)), config_(config) {
    worker_ = std::thread([this] { work(); });
  }

  ~Service() {
    {
      std::lock_guard lock(jobs_mutex_);
      stopping_ = true;
    }
    jobs_cv_.notify_all();
    worker_.join();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const Benchmark& benchmark() const noexcept { return bench_; }

  /// Runs `fn(const RecordBook&)` under the read lock.
  template <typename Fn>
  auto read(Fn&& fn) const {
    std::shared_lock lock(mutex_);
    return fn(store_.book());
  }

  void mount(httplib::Server& server) {
    server.set_payload_max_length(config_.upload_cap);
    auto route = [this](auto handler) {
      return [this, handler](const httplib::Request& req, httplib::Response& res) { (this->*handler)(req, res); };
    };
    server.Get("/api/v1/progress", route(&Service::handle_progress));
    server.Get("/api/v1/comparison", route(&Service::handle_comparison));
    server.Get("/api/v1/instances", route(&Service::handle_instances));
    server.Get("/api/v1/plan", route(&Service::handle_plan));
    server.Get("/api/v1/map", route(&Service::handle_map));
    server.Get("/api/v1/algorithms", route(&Service::handle_algorithms));
    server.Get("/api/v1/suboptimality", route(&Service::handle_suboptimality));
    server.Get("/api/v1/export", route(&Service::handle_export));
    server.Post("/api/v1/submissions", route(&Service::handle_submit));
    server.Get(R"(/api/v1/submissions/([0-9a-z-]+))", route(&Service::handle_job));
  }

  void handle_progress(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto scope = scope_from(req);
      std::string group_by = req.has_param("group_by") ? req.get_param_value("group_by") : default_grouping(scope);
      std::shared_lock lock(mutex_);
      const auto& book = store_.book();
      const auto total = progress_summary(bench_, book, scope);
      json groups = json::array();
      if (group_by != "none") {
        for (const auto& [key, s] : grouped(scope, group_by, book)) {
          json g = summary_to_json(s);
          g["key"] = std::get<3>(key);
          groups.push_back(std::move(g));
        }
      }
      reply(res, {{"scope", scope_to_json(scope)},
                  {"summary", summary_to_json(total)},
                  {"group_by", group_by},
                  {"groups", std::move(groups)}});
    });
  }

  void handle_comparison(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      static const std::map<std::string, SeriesMetric> metrics{
          {"solved", SeriesMetric::AlgoSolvedPct},
          {"closed", SeriesMetric::AlgoClosedPct},
          {"best_lb", SeriesMetric::AlgoBestLowerBoundPct},
          {"best_solution", SeriesMetric::AlgoBestSolutionPct}};
      const auto name = req.has_param("metric") ? req.get_param_value("metric") : "best_solution";
      auto metric = metrics.find(name);
      if (metric == metrics.end()) throw Error(Errc::InvalidScope, "unknown metric '" + name + "'");
      const auto scope = scope_from(req);
      std::shared_lock lock(mutex_);
      const auto& book = store_.book();
      std::vector<std::string> algos;
      if (req.has_param("algorithms")) {
        for (auto part : detail::split(req.get_param_value("algorithms"), ',')) {
          std::string a(detail::trim(part));
          if (a.empty()) continue;
          if (!book.algorithms().contains(a)) throw Error(Errc::UnknownAlgorithm, "unknown algorithm '" + a + "'");
          algos.push_back(std::move(a));
        }
      } else {
        for (const auto& [a, _] : book.algorithms())
          if (a != kTrivialOracle) algos.push_back(a);
      }
      const auto totals = algorithm_comparison(bench_, book, scope, true);
      json series = json::array();
      for (const auto& a : algos) {
        json points = json::array();
        for (const auto& p : agent_count_series(bench_, book, scope, metric->second, a))
          points.push_back({{"agents", p.agents}, {"instances", p.instances}, {"count", p.hits}, {"value", p.value}});
        series.push_back({{"algorithm", a}, {"totals", metrics_to_json(totals.at(a))}, {"points", std::move(points)}});
      }
      reply(res, {{"scope", scope_to_json(scope)}, {"metric", name}, {"series", std::move(series)}});
    });
  }

  void handle_instances(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto scope = scope_from(req);
      const auto limit = std::min(count_param(req, "limit", config_.default_page), config_.max_page);
      const auto offset = count_param(req, "offset", 0);
      std::shared_lock lock(mutex_);
      const auto& book = store_.book();
      json items = json::array();
      std::size_t total = 0;
      for_each_instance(bench_, scope, [&](const InstanceId& id) {
        const auto i = total++;
        if (i < offset || i >= offset + limit) return;
        const auto* rec = book.find(id);
        json item{{"instance", instance_to_json(id)}, {"state", to_string(classify(rec))}};
        item["lower_bound"] = rec && rec->best_lb ? json(rec->best_lb->value) : json(nullptr);
        item["solution_cost"] = rec && rec->best_cost ? json(rec->best_cost->value) : json(nullptr);
        item["lb_holders"] = rec && rec->best_lb ? json(rec->best_lb->holders) : json::array();
        item["solution_holders"] = rec && rec->best_cost ? json(rec->best_cost->holders) : json::array();
        items.push_back(std::move(item));
      });
      if (total == 0) throw Error(Errc::EmptyScope, "no instances in scope " + scope.label());
      reply(res, {{"scope", scope_to_json(scope)}, {"total", total}, {"offset", offset}, {"limit", limit},
                  {"items", std::move(items)}});
    });
  }

  void handle_plan(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto id = instance_from(req);
      std::shared_lock lock(mutex_);
      const auto* rec = store_.book().find(id);
      if (!rec || !rec->best_cost)
        throw Error(Errc::NoSolution, "no solution recorded for " + to_string(id));
      const auto pairs = bench_.agents(id);
      const auto plans = detail::split(rec->best_cost->plan, ';');
      json agents = json::array();
      for (std::size_t i = 0; i < pairs.size(); ++i)
        agents.push_back({{"start", {pairs[i].first.x, pairs[i].first.y}},
                          {"goal", {pairs[i].second.x, pairs[i].second.y}},
                          {"plan", i < plans.size() ? std::string(plans[i]) : std::string()}});
      const auto& map = bench_.map(id.map_name);
      reply(res, {{"instance", instance_to_json(id)},
                  {"map", {{"name", map.name()}, {"width", map.width()}, {"height", map.height()}}},
                  {"cost", rec->best_cost->value},
                  {"holders", rec->best_cost->holders},
                  {"batch_id", rec->best_cost->plan_batch},
                  {"agents", std::move(agents)}});
    });
  }

  void handle_map(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto& map = bench_.map(require(req, "name"));
      json rows = json::array();
      for (int y = 0; y < map.height(); ++y) {
        std::string row;
        for (int x = 0; x < map.width(); ++x) row += map.passable({x, y}) ? '.' : '@';
        rows.push_back(std::move(row));
      }
      reply(res, {{"name", map.name()}, {"domain", bench_.domain_of(map.name())}, {"width", map.width()},
                  {"height", map.height()}, {"rows", std::move(rows)}});
    });
  }

  void handle_algorithms(const httplib::Request&, httplib::Response& res) const {
    guarded(res, [&] {
      std::shared_lock lock(mutex_);
      json out = json::array();
      for (const auto& [name, meta] : store_.book().algorithms()) {
        json a{{"name", name}, {"authors", meta.authors}};
        a["references"] = meta.references ? json(*meta.references) : json(nullptr);
        a["repository"] = meta.repository ? json(*meta.repository) : json(nullptr);
        out.push_back(std::move(a));
      }
      reply(res, {{"algorithms", std::move(out)}});
    });
  }

  void handle_suboptimality(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto map = require(req, "map");
      const auto label = parse_scenario_label(require(req, "scenario"));
      if (!label) throw Error(Errc::InvalidScope, "bad scenario label");
      std::shared_lock lock(mutex_);
      json points = json::array();
      for (const auto& p : suboptimality_series(bench_, store_.book(), map, label->first, label->second))
        points.push_back({{"agents", p.agents}, {"lower_bound", p.lower_bound}, {"cost", p.cost},
                          {"ratio", p.ratio}, {"trivial_lb", p.trivial_lb}});
      reply(res, {{"map", map}, {"scenario", scenario_label(label->first, label->second)},
                  {"points", std::move(points)}});
    });
  }

  void handle_export(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const auto level_name = req.has_param("level") ? req.get_param_value("level") : "instance";
      const auto level = parse_export_level(level_name);
      if (!level) throw Error(Errc::InvalidScope, "unknown level '" + level_name + "'");
      const auto scope = scope_from(req);
      std::shared_lock lock(mutex_);
      const auto table = export_results(bench_, store_.book(), scope, *level);
      std::string file = "mapft-" + level_name + "-" + scope.label() + ".csv";
      std::replace(file.begin(), file.end(), '/', '_');
      res.set_header("Content-Disposition", "attachment; filename=\"" + file + "\"");
      res.set_content(table.to_csv(), "text/csv");
    });
  }

  /// Multipart upload with parts `descriptor` and `csv`.
  void handle_submit(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (req.body.size() > config_.upload_cap) {
        res.status = 413;
        reply(res, error_json("PayloadTooLarge", "upload exceeds " + std::to_string(config_.upload_cap) + " bytes"),
              413);
        return;
      }
      if (!req.is_multipart_form_data() || !req.has_file("descriptor") || !req.has_file("csv"))
        throw Error(Errc::MissingMetadata, "expected multipart parts 'descriptor' and 'csv'");
      auto descriptor = req.get_file_value("descriptor").content;
      auto csv_text = req.get_file_value("csv").content;
      if (descriptor.size() + csv_text.size() > config_.upload_cap) {
        reply(res, error_json("PayloadTooLarge", "upload exceeds " + std::to_string(config_.upload_cap) + " bytes"),
              413);
        return;
      }
      // Metadata and header problems are reported immediately either way.
      parse_descriptor(descriptor);
      parse_submission_csv(csv_text);
      if (descriptor.size() + csv_text.size() <= config_.async_threshold) {
        reply(res, ingest(descriptor, csv_text));
        return;
      }
      std::string id;
      {
        std::lock_guard lock(jobs_mutex_);
        id = "job-" + std::to_string(++job_counter_);
        jobs_[id] = Job{"queued", {}};
        queue_.push_back({id, std::move(descriptor), std::move(csv_text)});
      }
      jobs_cv_.notify_all();
      res.set_header("Location", "/api/v1/submissions/" + id);
      reply(res, {{"job", id}, {"status", "queued"}}, 202);
    });
  }

  void handle_job(const httplib::Request& req, httplib::Response& res) const {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      std::lock_guard lock(jobs_mutex_);
      auto it = jobs_.find(id);
      if (it == jobs_.end()) throw Error(Errc::UnknownBatch, "unknown job " + id);
      json out{{"job", id}, {"status", it->second.status}};
      if (!it->second.result.is_null()) out[it->second.status == "failed" ? "error" : "report"] = it->second.result;
      reply(res, out);
    });
  }

  /// Applies a submission under the writer lock; the API's synchronous path.
  json ingest(const std::string& descriptor, const std::string& csv_text) {
    std::unique_lock lock(mutex_);
    const auto report = ingest_batch(store_, bench_, descriptor, csv_text);
    return report_to_json(report, store_.book());
  }

  /// Blocks until every queued job has finished.
  void drain() {
    std::unique_lock lock(jobs_mutex_);
    jobs_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
  }

 private:
  struct Job {
    std::string status;
    json result;
  };
  struct Pending {
    std::string id, descriptor, csv;
  };
  using GroupKey = std::tuple<int, std::string, int, std::string>;  // sort fields, then label

  static json error_json(std::string_view code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}}}};
  }

  static void reply(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      const std::string what = e.what();
      const auto name = std::string(to_string(e.code()));
      const auto message = what.rfind(name + ": ", 0) == 0 ? what.substr(name.size() + 2) : what;
      reply(res, error_json(name, message), http_status(e.code()));
    } catch (const std::exception& e) {
      reply(res, error_json("Internal", e.what()), 500);
    }
  }

  static std::string require(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) throw Error(Errc::InvalidScope, std::string("missing parameter '") + key + "'");
    return req.get_param_value(key);
  }

  static std::size_t count_param(const httplib::Request& req, const char* key, std::size_t fallback) {
    if (!req.has_param(key)) return fallback;
    auto v = detail::parse_int<std::size_t>(req.get_param_value(key));
    if (!v) throw Error(Errc::InvalidScope, std::string("parameter '") + key + "' must be a non-negative integer");
    return *v;
  }

  static Scope scope_from(const httplib::Request& req) {
    Scope s;
    auto text = [&](const char* key) -> std::optional<std::string> {
      if (!req.has_param(key) || req.get_param_value(key).empty()) return std::nullopt;
      return req.get_param_value(key);
    };
    auto number = [&](const char* key) -> std::optional<int> {
      auto t = text(key);
      if (!t) return std::nullopt;
      auto v = detail::parse_int<int>(*t);
      if (!v || *v < 1) throw Error(Errc::InvalidScope, std::string("parameter '") + key + "' must be a positive integer");
      return v;
    };
    s.domain = text("domain");
    s.map = text("map");
    if (auto scen = text("scenario")) {
      auto label = parse_scenario_label(*scen);
      if (!label) throw Error(Errc::InvalidScope, "bad scenario label '" + *scen + "'");
      s.scenario = label;
    }
    s.agents_min = number("agents_min");
    s.agents_max = number("agents_max");
    if (auto k = number("agents")) s.agents_min = s.agents_max = k;
    return s;
  }

  static InstanceId instance_from(const httplib::Request& req) {
    const auto scope = scope_from(req);
    if (!scope.map || !scope.scenario || !scope.agents_min || scope.agents_min != scope.agents_max)
      throw Error(Errc::InvalidScope, "an instance needs map, scenario and agents");
    return {*scope.map, scope.scenario->first, scope.scenario->second, *scope.agents_min};
  }

  static json scope_to_json(const Scope& s) {
    json j{{"label", s.label()}};
    j["domain"] = s.domain ? json(*s.domain) : json(nullptr);
    j["map"] = s.map ? json(*s.map) : json(nullptr);
    j["scenario"] = s.scenario ? json(scenario_label(s.scenario->first, s.scenario->second)) : json(nullptr);
    j["agents_min"] = s.agents_min ? json(*s.agents_min) : json(nullptr);
    j["agents_max"] = s.agents_max ? json(*s.agents_max) : json(nullptr);
    return j;
  }

  static std::string default_grouping(const Scope& s) {
    if (s.scenario) return "agents";
    if (s.map) return "scenario";
    if (s.domain) return "map";
    return "domain";
  }

  std::map<GroupKey, ProgressSummary> grouped(const Scope& scope, const std::string& by,
                                              const RecordBook& book) const {
    std::map<GroupKey, ProgressSummary> groups;
    auto domain_rank = [](const std::string& d) {
      for (std::size_t i = 0; i < kDomainNames.size(); ++i)
        if (kDomainNames[i] == d) return static_cast<int>(i);
      return static_cast<int>(kDomainNames.size());
    };
    std::function<GroupKey(const InstanceId&)> key;
    if (by == "domain") {
      key = [&](const InstanceId& id) {
        const auto d = bench_.domain_of(id.map_name);
        return GroupKey{domain_rank(d), "", 0, d};
      };
      if (!scope.map && !scope.domain)
        for (auto d : kDomainNames) groups[GroupKey{domain_rank(std::string(d)), "", 0, std::string(d)}];
    } else if (by == "map") {
      key = [](const InstanceId& id) { return GroupKey{0, id.map_name, 0, id.map_name}; };
    } else if (by == "scenario") {
      key = [&](const InstanceId& id) {
        const int order = (id.kind == ScenKind::Even ? 0 : 1 << 20) + id.index;
        return GroupKey{0, id.map_name, order, scope.map ? id.scenario() : id.map_name + "/" + id.scenario()};
      };
    } else if (by == "agents") {
      key = [](const InstanceId& id) { return GroupKey{id.agents, "", 0, std::to_string(id.agents)}; };
    } else {
      throw Error(Errc::InvalidScope, "unknown group_by '" + by + "'");
    }
    for_each_instance(bench_, scope, [&](const InstanceId& id) { groups[key(id)].count(classify(book.find(id))); });
    for (auto& [k, s] : groups) {
      s.scope = std::get<3>(k);
      s.finish();
    }
    return groups;
  }

  void work() {
    for (;;) {
      Pending job;
      {
        std::unique_lock lock(jobs_mutex_);
        jobs_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop_front();
        busy_ = true;
        jobs_[job.id].status = "running";
      }
      Job done;
      try {
        done = {"done", ingest(job.descriptor, job.csv)};
      } catch (const Error& e) {
        done = {"failed", error_json(to_string(e.code()), e.what())};
      } catch (const std::exception& e) {
        done = {"failed", error_json("Internal", e.what())};
      }
      {
        std::lock_guard lock(jobs_mutex_);
        jobs_[job.id] = std::move(done);
        busy_ = false;
      }
      jobs_cv_.notify_all();
    }
  }

  Benchmark bench_;
  Store store_;
  ServiceConfig config_;
  mutable std::shared_mutex mutex_;

  mutable std::mutex jobs_mutex_;
  std::condition_variable jobs_cv_;
  std::deque<Pending> queue_;
  std::map<std::string, Job> jobs_;
  std::size_t job_counter_ = 0;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace mapft
