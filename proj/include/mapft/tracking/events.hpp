#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "mapft/error.hpp"
#include "mapft/scenario.hpp"
#include "mapft/tracking/record.hpp"

namespace mapft {

struct BatchOpened {
  std::string batch_id;
  AlgorithmMeta algorithm;
  std::string received_at;

  friend bool operator==(const BatchOpened&, const BatchOpened&) = default;
};

struct ContributionAccepted {
  InstanceId instance;
  Contribution contribution;

  friend bool operator==(const ContributionAccepted&, const ContributionAccepted&) = default;
};

struct BatchRevoked {
  std::string batch_id;
  std::string reason;

  friend bool operator==(const BatchRevoked&, const BatchRevoked&) = default;
};

using Event = std::variant<BatchOpened, ContributionAccepted, BatchRevoked>;

using json = nlohmann::ordered_json;

inline json instance_to_json(const InstanceId& id) {
  return {{"map", id.map_name}, {"scenario", id.scenario()}, {"agents", id.agents}};
}

inline InstanceId instance_from_json(const json& j) {
  auto label = parse_scenario_label(j.at("scenario").get<std::string>());
  if (!label) throw Error(Errc::CorruptLog, "bad scenario label in event");
  return {j.at("map").get<std::string>(), label->first, label->second, j.at("agents").get<int>()};
}

namespace detail {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline json algorithm_to_json(const AlgorithmMeta& a) {
  json j{{"name", a.name}, {"authors", a.authors}};
  detail::put_optional(j, "references", a.references);
  detail::put_optional(j, "repository", a.repository);
  return j;
}

inline AlgorithmMeta algorithm_from_json(const json& j) {
  return {j.at("name").get<std::string>(), j.value("authors", std::string{}),
          detail::get_optional<std::string>(j, "references"),
          detail::get_optional<std::string>(j, "repository")};
}

inline json event_to_json(const Event& event) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BatchOpened>) {
          return {{"type", "batch"},
                  {"batch_id", e.batch_id},
                  {"algorithm", algorithm_to_json(e.algorithm)},
                  {"received_at", e.received_at}};
        } else if constexpr (std::is_same_v<T, ContributionAccepted>) {
          json j{{"type", "contribution"},
                 {"batch_id", e.contribution.batch_id},
                 {"algorithm", e.contribution.algorithm},
                 {"instance", instance_to_json(e.instance)}};
          detail::put_optional(j, "lower_bound", e.contribution.lower_bound);
          detail::put_optional(j, "solution_cost", e.contribution.solution_cost);
          j["plan"] = e.contribution.plan;
          return j;
        } else {
          return {{"type", "revocation"}, {"batch_id", e.batch_id}, {"reason", e.reason}};
        }
      },
      event);
}

inline Event event_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "batch")
      return BatchOpened{j.at("batch_id").get<std::string>(), algorithm_from_json(j.at("algorithm")),
                         j.at("received_at").get<std::string>()};
    if (type == "contribution") {
      Contribution c;
      c.batch_id = j.at("batch_id").get<std::string>();
      c.algorithm = j.at("algorithm").get<std::string>();
      c.lower_bound = detail::get_optional<std::int64_t>(j, "lower_bound");
      c.solution_cost = detail::get_optional<std::int64_t>(j, "solution_cost");
      c.plan = j.value("plan", std::string{});
      return ContributionAccepted{instance_from_json(j.at("instance")), std::move(c)};
    }
    if (type == "revocation")
      return BatchRevoked{j.at("batch_id").get<std::string>(), j.value("reason", std::string{})};
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptLog, e.what());
  }
  throw Error(Errc::CorruptLog, "unknown event type");
}

}  // namespace mapft
