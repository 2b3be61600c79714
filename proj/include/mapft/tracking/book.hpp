#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mapft/error.hpp"
#include "mapft/tracking/events.hpp"
#include "mapft/tracking/record.hpp"

namespace mapft {

struct BatchInfo {
  AlgorithmMeta algorithm;
  std::string received_at;
  bool lb_revoked = false;
  std::set<InstanceId> instances;

  friend bool operator==(const BatchInfo&, const BatchInfo&) = default;
};

/// All instance records plus batch and algorithm registries. The state is a
/// pure fold of the event sequence, so replaying a log reproduces it exactly.
class RecordBook {
 public:
  /// Throws BoundConflict when a contribution contradicts the current bests;
  /// the book is unchanged in that case.
  void apply(const Event& event) {
    std::visit([this](const auto& e) { apply_one(e); }, event);
  }

  const InstanceRecord* find(const InstanceId& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
  }

  const std::map<InstanceId, InstanceRecord>& records() const noexcept { return records_; }
  const std::map<std::string, BatchInfo>& batches() const noexcept { return batches_; }
  const std::map<std::string, AlgorithmMeta>& algorithms() const noexcept { return algorithms_; }
  bool has_batch(const std::string& id) const { return batches_.contains(id); }

  /// Instances whose record carries lower bounds from `batch_id` that have
  /// not been revoked yet.
  std::set<InstanceId> lower_bound_holdings(const std::string& batch_id) const {
    std::set<InstanceId> out;
    auto it = batches_.find(batch_id);
    if (it == batches_.end()) return out;
    for (const auto& id : it->second.instances) {
      const auto& rec = records_.at(id);
      if (rec.lb_revoked(batch_id)) continue;
      for (const auto& e : rec.events)
        if (e.kind == RecordEventKind::Accepted && e.contribution.batch_id == batch_id &&
            e.contribution.lower_bound) {
          out.insert(id);
          break;
        }
    }
    return out;
  }

  /// Derived state only: best values, holders and plans per instance, one
  /// JSON object per line in instance order.
  std::string snapshot_text() const {
    std::string out;
    for (const auto& [id, rec] : records_) {
      json j{{"instance", instance_to_json(id)}};
      if (rec.best_lb)
        j["best_lb"] = {{"value", rec.best_lb->value},
                        {"holders", rec.best_lb->holders},
                        {"batches", rec.best_lb->batches}};
      else
        j["best_lb"] = nullptr;
      if (rec.best_cost)
        j["best_cost"] = {{"value", rec.best_cost->value},
                          {"holders", rec.best_cost->holders},
                          {"batches", rec.best_cost->batches},
                          {"plan_batch", rec.best_cost->plan_batch},
                          {"plan", rec.best_cost->plan}};
      else
        j["best_cost"] = nullptr;
      out += j.dump() + '\n';
    }
    return out;
  }

  friend bool operator==(const RecordBook&, const RecordBook&) = default;

 private:
  void apply_one(const BatchOpened& e) {
    if (batches_.contains(e.batch_id))
      throw Error(Errc::CorruptLog, "batch " + e.batch_id + " opened twice");
    if (e.algorithm.name.empty()) throw Error(Errc::MissingMetadata, "batch without algorithm");
    algorithms_.try_emplace(e.algorithm.name, e.algorithm);
    batches_.emplace(e.batch_id, BatchInfo{e.algorithm, e.received_at, false, {}});
  }

  void apply_one(const ContributionAccepted& e) {
    auto batch = batches_.find(e.contribution.batch_id);
    if (batch == batches_.end())
      throw Error(Errc::UnknownBatch, "contribution for unknown batch " + e.contribution.batch_id);
    if (e.contribution.algorithm != batch->second.algorithm.name)
      throw Error(Errc::CorruptLog, "contribution algorithm differs from its batch");

    InstanceRecord rec;
    if (auto it = records_.find(e.instance); it != records_.end()) rec = it->second;
    else rec.instance = e.instance;
    // Lower bounds arriving from an already revoked batch never count.
    if (batch->second.lb_revoked && e.contribution.lower_bound)
      rec = revoke_lower_bounds(std::move(rec), e.contribution.batch_id, e.contribution.algorithm);
    rec = record_result(std::move(rec), e.contribution);
    records_.insert_or_assign(e.instance, std::move(rec));
    batch->second.instances.insert(e.instance);
  }

  void apply_one(const BatchRevoked& e) {
    auto batch = batches_.find(e.batch_id);
    if (batch == batches_.end()) throw Error(Errc::UnknownBatch, "unknown batch " + e.batch_id);
    for (const auto& id : lower_bound_holdings(e.batch_id))
      records_.at(id) = revoke_lower_bounds(records_.at(id), e.batch_id, batch->second.algorithm.name);
    batch->second.lb_revoked = true;
  }

  std::map<InstanceId, InstanceRecord> records_;
  std::map<std::string, BatchInfo> batches_;
  std::map<std::string, AlgorithmMeta> algorithms_;
};

inline RecordBook replay(std::span<const Event> events) {
  RecordBook book;
  for (const auto& e : events) book.apply(e);
  return book;
}

}  // namespace mapft
