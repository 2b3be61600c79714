#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/error.hpp"
#include "mapft/scenario.hpp"

namespace mapft {

/// Reserved algorithm name under which the system's own trivial lower
/// bounds are recorded.
inline constexpr std::string_view kTrivialOracle = "trivial-oracle";

struct AlgorithmMeta {
  std::string name;
  std::string authors;
  std::optional<std::string> references;
  std::optional<std::string> repository;

  friend bool operator==(const AlgorithmMeta&, const AlgorithmMeta&) = default;
};

/// One accepted row: a lower bound and/or a verified solution cost with its plan.
struct Contribution {
  std::string batch_id;
  std::string algorithm;
  std::optional<std::int64_t> lower_bound;
  std::optional<std::int64_t> solution_cost;
  std::string plan;  // joined plan field, present with solution_cost

  friend bool operator==(const Contribution&, const Contribution&) = default;
};

enum class RecordEventKind { Accepted, Revoked };

/// History entry. A Revoked entry names the batch whose lower bounds no
/// longer count; only batch_id and algorithm are set on it.
struct RecordEvent {
  RecordEventKind kind = RecordEventKind::Accepted;
  Contribution contribution;

  friend bool operator==(const RecordEvent&, const RecordEvent&) = default;
};

struct BestLowerBound {
  std::int64_t value = 0;
  std::set<std::string> holders;
  std::set<std::string> batches;

  friend bool operator==(const BestLowerBound&, const BestLowerBound&) = default;
};

struct BestSolution {
  std::int64_t value = 0;
  std::set<std::string> holders;
  std::set<std::string> batches;
  std::string plan;        // plan of the first contribution that reached `value`
  std::string plan_batch;

  friend bool operator==(const BestSolution&, const BestSolution&) = default;
};

struct InstanceRecord {
  InstanceId instance;
  std::optional<BestLowerBound> best_lb;
  std::optional<BestSolution> best_cost;
  std::vector<RecordEvent> events;

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;

  bool lb_revoked(std::string_view batch_id) const {
    return std::any_of(events.begin(), events.end(), [&](const RecordEvent& e) {
      return e.kind == RecordEventKind::Revoked && e.contribution.batch_id == batch_id;
    });
  }

  /// Smallest accepted cost reported by `algorithm`, if any.
  std::optional<std::int64_t> cost_of(std::string_view algorithm) const {
    std::optional<std::int64_t> best;
    for (const auto& e : events)
      if (e.kind == RecordEventKind::Accepted && e.contribution.algorithm == algorithm &&
          e.contribution.solution_cost)
        best = best ? std::min(*best, *e.contribution.solution_cost) : *e.contribution.solution_cost;
    return best;
  }
};

enum class BoundConflictKind { LowerBoundAboveSolution, SolutionBelowLowerBound };

/// A contribution contradicts a verified plan. `offending_batches` are the
/// batches whose lower bounds must be revoked before it can be applied.
class BoundConflict : public Error {
 public:
  BoundConflict(BoundConflictKind kind, std::set<std::string> offending, const std::string& what)
      : Error(Errc::BoundConflict, what), kind_(kind), offending_(std::move(offending)) {}

  BoundConflictKind kind() const noexcept { return kind_; }
  const std::set<std::string>& offending_batches() const noexcept { return offending_; }

 private:
  BoundConflictKind kind_;
  std::set<std::string> offending_;
};

/// Rebuilds best_lb / best_cost from the event history.
inline void recompute(InstanceRecord& rec) {
  std::set<std::string> revoked;
  for (const auto& e : rec.events)
    if (e.kind == RecordEventKind::Revoked) revoked.insert(e.contribution.batch_id);

  rec.best_lb.reset();
  rec.best_cost.reset();
  for (const auto& e : rec.events) {
    if (e.kind != RecordEventKind::Accepted) continue;
    const auto& c = e.contribution;
    if (c.lower_bound && !revoked.contains(c.batch_id)) {
      if (!rec.best_lb || *c.lower_bound > rec.best_lb->value) {
        rec.best_lb = BestLowerBound{*c.lower_bound, {c.algorithm}, {c.batch_id}};
      } else if (*c.lower_bound == rec.best_lb->value) {
        rec.best_lb->holders.insert(c.algorithm);
        rec.best_lb->batches.insert(c.batch_id);
      }
    }
    if (c.solution_cost) {
      if (!rec.best_cost || *c.solution_cost < rec.best_cost->value) {
        rec.best_cost = BestSolution{*c.solution_cost, {c.algorithm}, {c.batch_id}, c.plan, c.batch_id};
      } else if (*c.solution_cost == rec.best_cost->value) {
        rec.best_cost->holders.insert(c.algorithm);
        rec.best_cost->batches.insert(c.batch_id);
      }
    }
  }
}

/// Applies an already-validated contribution. Raises BoundConflict instead of
/// ever storing best_lb > best_cost. Re-applying an identical contribution is
/// a no-op.
inline InstanceRecord record_result(InstanceRecord rec, const Contribution& c) {
  for (const auto& e : rec.events)
    if (e.kind == RecordEventKind::Accepted && e.contribution == c) return rec;

  const bool lb_counts = c.lower_bound && !rec.lb_revoked(c.batch_id);
  if (lb_counts && c.solution_cost && *c.lower_bound > *c.solution_cost)
    throw BoundConflict(BoundConflictKind::LowerBoundAboveSolution, {c.batch_id},
                        "lower bound " + std::to_string(*c.lower_bound) +
                            " exceeds the row's own verified cost " +
                            std::to_string(*c.solution_cost) + " on " + to_string(rec.instance));
  if (lb_counts && rec.best_cost && *c.lower_bound > rec.best_cost->value)
    throw BoundConflict(BoundConflictKind::LowerBoundAboveSolution, {c.batch_id},
                        "lower bound " + std::to_string(*c.lower_bound) +
                            " exceeds verified cost " + std::to_string(rec.best_cost->value) +
                            " on " + to_string(rec.instance));
  if (c.solution_cost && rec.best_lb && *c.solution_cost < rec.best_lb->value) {
    std::set<std::string> offending;
    for (const auto& e : rec.events) {
      const auto& prior = e.contribution;
      if (e.kind == RecordEventKind::Accepted && prior.lower_bound &&
          *prior.lower_bound > *c.solution_cost && !rec.lb_revoked(prior.batch_id))
        offending.insert(prior.batch_id);
    }
    throw BoundConflict(BoundConflictKind::SolutionBelowLowerBound, std::move(offending),
                        "verified cost " + std::to_string(*c.solution_cost) +
                            " is below lower bound " + std::to_string(rec.best_lb->value) +
                            " on " + to_string(rec.instance));
  }
  rec.events.push_back({RecordEventKind::Accepted, c});
  recompute(rec);
  return rec;
}

/// Marks every lower bound of `batch_id` in this record as revoked.
inline InstanceRecord revoke_lower_bounds(InstanceRecord rec, const std::string& batch_id,
                                          const std::string& algorithm) {
  if (rec.lb_revoked(batch_id)) return rec;
  Contribution marker;
  marker.batch_id = batch_id;
  marker.algorithm = algorithm;
  rec.events.push_back({RecordEventKind::Revoked, std::move(marker)});
  recompute(rec);
  return rec;
}

enum class InstanceState { Closed, Solved, Unknown };

constexpr std::string_view to_string(InstanceState s) noexcept {
  switch (s) {
    case InstanceState::Closed: return "closed";
    case InstanceState::Solved: return "solved";
    case InstanceState::Unknown: return "unknown";
  }
  return "unknown";
}

/// closed: both bounds present and equal; solved: a solution with no lower
/// bound or a strictly smaller one; unknown: no solution. A missing record is
/// unknown.
inline InstanceState classify(const InstanceRecord* rec) {
  if (!rec || !rec->best_cost) return InstanceState::Unknown;
  if (rec->best_lb && rec->best_lb->value == rec->best_cost->value) return InstanceState::Closed;
  return InstanceState::Solved;
}

inline InstanceState classify(const InstanceRecord& rec) { return classify(&rec); }

}  // namespace mapft
