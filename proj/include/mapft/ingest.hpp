#pragma once

#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/benchmark.hpp"
#include "mapft/bounds.hpp"
#include "mapft/csv.hpp"
#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"
#include "mapft/plan.hpp"
#include "mapft/tracking/record.hpp"
#include "mapft/tracking/store.hpp"
#include "mapft/validator.hpp"

namespace mapft {

inline constexpr std::string_view kSubmissionHeader =
    "map_name,scenario,agents,lower_bound,solution_cost,plan";

/// Sidecar descriptor: `key: value` lines with keys algorithm, authors,
/// references, repository. Blank lines and '#' comments are ignored.
inline AlgorithmMeta parse_descriptor(std::string_view text) {
  AlgorithmMeta meta;
  bool have_authors = false;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw Error(Errc::MalformedDescriptor, "line " + std::to_string(line_no) + " is not 'key: value'",
                  static_cast<std::int64_t>(line_no));
    const auto key = detail::lower(detail::trim(line.substr(0, colon)));
    std::string value(detail::trim(line.substr(colon + 1)));
    if (key == "algorithm") meta.name = std::move(value);
    else if (key == "authors") {
      meta.authors = std::move(value);
      have_authors = true;
    } else if (key == "references") {
      if (!value.empty()) meta.references = std::move(value);
    } else if (key == "repository") {
      if (!value.empty()) meta.repository = std::move(value);
    } else {
      throw Error(Errc::MalformedDescriptor, "unknown descriptor key '" + key + "'",
                  static_cast<std::int64_t>(line_no));
    }
  }
  if (meta.name.empty()) throw Error(Errc::MissingMetadata, "descriptor has no algorithm name");
  if (!have_authors || meta.authors.empty()) throw Error(Errc::MissingMetadata, "descriptor has no authors");
  if (meta.name == kTrivialOracle)
    throw Error(Errc::ReservedAlgorithm, "'" + meta.name + "' is reserved for the system's own bounds");
  return meta;
}

inline std::string render_descriptor(const AlgorithmMeta& meta) {
  std::string out = "algorithm: " + meta.name + "\nauthors: " + meta.authors + "\n";
  if (meta.references) out += "references: " + *meta.references + "\n";
  if (meta.repository) out += "repository: " + *meta.repository + "\n";
  return out;
}

/// One data row exactly as written, before interpretation.
struct RawRow {
  std::size_t line = 0;
  std::vector<std::string> fields;  // always 6
};

/// The checked tabular part of a submission.
inline std::vector<RawRow> parse_submission_csv(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw Error(Errc::MissingHeader, "empty submission");
  std::vector<std::string> header;
  for (auto f : rows.front().fields) header.emplace_back(detail::trim(f));
  if (csv::row(header) != std::string(kSubmissionHeader) + "\n")
    throw Error(Errc::MissingHeader, "first line must be '" + std::string(kSubmissionHeader) + "'");
  std::vector<RawRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].fields.size() != 6)
      throw Error(Errc::ColumnCountMismatch,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].fields.size()) + " fields",
                  static_cast<std::int64_t>(i));
    out.push_back({rows[i].line, std::move(rows[i].fields)});
  }
  return out;
}

/// A row once its fields are typed. Absent optional fields stay absent.
struct BatchEntry {
  InstanceId instance;
  std::optional<std::int64_t> lower_bound;
  std::optional<std::int64_t> solution_cost;
  std::optional<std::string> plan;

  friend bool operator==(const BatchEntry&, const BatchEntry&) = default;
};

/// Types the fields of one row. Returns an error message instead of throwing.
inline std::variant<BatchEntry, std::string> interpret_row(const RawRow& row) {
  auto field = [&](std::size_t i) { return detail::trim(row.fields[i]); };
  BatchEntry e;
  if (field(0).empty()) return std::string("empty map_name");
  auto label = parse_scenario_label(field(1));
  if (!label) return "bad scenario '" + std::string(field(1)) + "'";
  auto agents = detail::parse_int<int>(field(2));
  if (!agents || *agents < 1) return "bad agent count '" + std::string(field(2)) + "'";
  e.instance = {std::string(field(0)), label->first, label->second, *agents};
  for (std::size_t i : {3u, 4u}) {
    if (field(i).empty()) continue;
    auto v = detail::parse_int<std::int64_t>(field(i));
    if (!v || *v < 0)
      return std::string(i == 3 ? "lower_bound" : "solution_cost") + " '" + std::string(field(i)) +
             "' is not a non-negative integer";
    (i == 3 ? e.lower_bound : e.solution_cost) = *v;
  }
  if (!field(5).empty()) e.plan = std::string(field(5));
  if (!e.lower_bound && !e.solution_cost) return std::string("row has neither lower_bound nor solution_cost");
  return e;
}

/// Submission CSV for a list of entries; the plan field is always quoted.
inline std::string render_submission_csv(const std::vector<BatchEntry>& entries) {
  std::string out = std::string(kSubmissionHeader) + "\n";
  for (const auto& e : entries) {
    out += csv::field(e.instance.map_name) + ',' + e.instance.scenario() + ',' +
           std::to_string(e.instance.agents) + ',' +
           (e.lower_bound ? std::to_string(*e.lower_bound) : "") + ',' +
           (e.solution_cost ? std::to_string(*e.solution_cost) : "") + ',' +
           csv::quote(e.plan.value_or("")) + '\n';
  }
  return out;
}

enum class RowStatus { Accepted, ParseError, UnknownInstance, PlanInvalid, CostMismatch, MissingPlan, DuplicateRow };

constexpr std::string_view to_string(RowStatus s) noexcept {
  switch (s) {
    case RowStatus::Accepted: return "accepted";
    case RowStatus::ParseError: return "ParseError";
    case RowStatus::UnknownInstance: return "UnknownInstance";
    case RowStatus::PlanInvalid: return "PlanInvalid";
    case RowStatus::CostMismatch: return "CostMismatch";
    case RowStatus::MissingPlan: return "MissingPlan";
    case RowStatus::DuplicateRow: return "DuplicateRow";
  }
  return "ParseError";
}

struct RowOutcome {
  std::size_t row = 0;   // 1-based data row
  std::size_t line = 0;  // line in the CSV text
  std::optional<InstanceId> instance;
  RowStatus status = RowStatus::ParseError;
  std::string detail;
};

struct IngestReport {
  std::string batch_id;
  std::string algorithm;
  bool duplicate_batch = false;
  std::vector<RowOutcome> outcomes;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  /// Batches whose lower bounds were revoked while applying this one (may
  /// include this batch itself).
  std::vector<std::string> revoked_batches;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Content hash of a batch; identical resubmissions map to the same id.
inline std::string batch_id_of(std::string_view descriptor, std::string_view csv_text) {
  std::string key(descriptor);
  key += '\x1e';
  key += csv_text;
  return detail::fnv1a_hex(key);
}

namespace detail {

/// Applies `events` atomically, revoking the lower bounds of every batch a
/// bound conflict names. The revocations go into the same commit.
inline std::vector<std::string> commit_resolving_conflicts(Store& store, std::vector<Event> events,
                                                           const std::string& own_batch) {
  std::vector<std::string> revoked;
  std::set<std::string> seen;
  for (;;) {
    try {
      store.commit(events);
      return revoked;
    } catch (const BoundConflict& conflict) {
      bool progress = false;
      for (const auto& batch : conflict.offending_batches()) {
        if (!seen.insert(batch).second) continue;
        progress = true;
        revoked.push_back(batch);
        BatchRevoked r{batch, std::string("lower bound contradicted by a verified plan: ") + conflict.what()};
        // The own batch must be opened before it can be revoked.
        const auto at = batch == own_batch ? events.begin() + 1 : events.begin();
        events.insert(at, std::move(r));
      }
      if (!progress) throw;
    }
  }
}

}  // namespace detail

/// Validates every row of a batch and applies the accepted ones in a single
/// commit. Per-row problems become outcomes; only metadata, header, column
/// and storage errors throw.
inline IngestReport ingest_batch(Store& store, const Benchmark& bench, std::string_view descriptor_text,
                                 std::string_view csv_text, std::optional<std::string> received_at = {}) {
  const auto meta = parse_descriptor(descriptor_text);
  const auto rows = parse_submission_csv(csv_text);

  IngestReport report;
  report.batch_id = batch_id_of(descriptor_text, csv_text);
  report.algorithm = meta.name;
  report.outcomes.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    report.outcomes[i].row = i + 1;
    report.outcomes[i].line = rows[i].line;
  }

  if (store.book().has_batch(report.batch_id)) {
    report.duplicate_batch = true;
    for (auto& o : report.outcomes) {
      o.status = RowStatus::DuplicateRow;
      o.detail = "batch " + report.batch_id + " was already ingested";
    }
    report.rejected = rows.size();
    return report;
  }

  std::vector<Event> events{BatchOpened{report.batch_id, meta, received_at.value_or(utc_timestamp())}};
  std::set<InstanceId> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& out = report.outcomes[i];
    auto reject = [&](RowStatus s, std::string why) {
      out.status = s;
      out.detail = std::move(why);
    };
    auto typed = interpret_row(rows[i]);
    if (auto* why = std::get_if<std::string>(&typed)) {
      reject(RowStatus::ParseError, *why);
      continue;
    }
    auto& entry = std::get<BatchEntry>(typed);
    out.instance = entry.instance;
    if (!bench.contains(entry.instance)) {
      reject(RowStatus::UnknownInstance, "no instance " + to_string(entry.instance));
      continue;
    }
    if (!seen.insert(entry.instance).second) {
      reject(RowStatus::DuplicateRow, "instance already appears earlier in this batch");
      continue;
    }
    Contribution c;
    c.batch_id = report.batch_id;
    c.algorithm = meta.name;
    c.lower_bound = entry.lower_bound;
    if (entry.solution_cost) {
      if (!entry.plan) {
        reject(RowStatus::MissingPlan, "solution_cost without a plan");
        continue;
      }
      std::vector<ActionSeq> plans;
      try {
        plans = parse_plan_field(*entry.plan);
      } catch (const Error& e) {
        reject(RowStatus::ParseError, e.what());
        continue;
      }
      const auto pairs = bench.agents(entry.instance);
      if (plans.size() != pairs.size()) {
        reject(RowStatus::PlanInvalid, "PlanCountMismatch: " + std::to_string(plans.size()) +
                                           " plans for " + std::to_string(pairs.size()) + " agents");
        continue;
      }
      const auto verdict =
          validate_plan_set(bench.map(entry.instance.map_name), pairs, plans, entry.solution_cost);
      if (!verdict.valid) {
        const bool only_cost = verdict.conflicts.empty() && verdict.agent_errors.empty();
        reject(only_cost ? RowStatus::CostMismatch : RowStatus::PlanInvalid, verdict.reason());
        continue;
      }
      c.solution_cost = verdict.computed_cost;
      c.plan = join_plans(plans);
    } else if (entry.plan) {
      reject(RowStatus::ParseError, "plan given without solution_cost");
      continue;
    }
    out.status = RowStatus::Accepted;
    events.push_back(ContributionAccepted{entry.instance, std::move(c)});
  }

  for (const auto& o : report.outcomes) (o.status == RowStatus::Accepted ? report.accepted : report.rejected)++;
  report.revoked_batches = detail::commit_resolving_conflicts(store, std::move(events), report.batch_id);
  return report;
}

/// Records the trivial lower bound of every in-benchmark instance that has no
/// lower bound yet, as one batch under the reserved algorithm name. Returns
/// the number of bounds added.
inline std::size_t seed_trivial_bounds(Store& store, const Benchmark& bench) {
  std::vector<Event> contributions;
  std::string digest;
  for (const auto& [key, scen] : bench.scenarios()) {
    const auto& map = bench.map(key.map_name);
    auto pairs = instance_agents(scen, scen.entries.size());
    std::vector<std::int32_t> dist;
    try {
      dist = trivial_lower_bound(map, pairs).per_agent;
    } catch (const Error& e) {
      if (e.code() != Errc::UnreachablePair && e.code() != Errc::NonTraversableEndpoint) throw;
      pairs.resize(static_cast<std::size_t>(e.position()));
      if (!pairs.empty()) dist = trivial_lower_bound(map, pairs).per_agent;
    }
    std::int64_t total = 0;
    for (std::size_t k = 1; k <= dist.size(); ++k) {
      total += dist[k - 1];
      const InstanceId id{key.map_name, key.kind, key.index, static_cast<int>(k)};
      const auto* rec = store.book().find(id);
      if (rec && rec->best_lb) continue;
      Contribution c;
      c.algorithm = std::string(kTrivialOracle);
      c.lower_bound = total;
      contributions.push_back(ContributionAccepted{id, std::move(c)});
      digest += to_string(id) + '=' + std::to_string(total) + ';';
    }
  }
  if (contributions.empty()) return 0;
  const auto batch = std::string(kTrivialOracle) + "-" + detail::fnv1a_hex(digest);
  if (store.book().has_batch(batch)) return 0;
  const auto added = contributions.size();
  for (auto& e : contributions) std::get<ContributionAccepted>(e).contribution.batch_id = batch;
  std::vector<Event> events{BatchOpened{batch, {std::string(kTrivialOracle), "system", std::nullopt, std::nullopt},
                                        utc_timestamp()}};
  events.insert(events.end(), std::make_move_iterator(contributions.begin()),
                std::make_move_iterator(contributions.end()));
  detail::commit_resolving_conflicts(store, std::move(events), batch);
  return added;
}

}  // namespace mapft
