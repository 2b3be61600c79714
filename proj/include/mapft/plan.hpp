#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"
#include "mapft/grid.hpp"

namespace mapft {

enum class Action : char { Up = 'u', Down = 'd', Left = 'l', Right = 'r', Wait = 'w' };

constexpr Cell step(Cell c, Action a) noexcept {
  switch (a) {
    case Action::Up: return {c.x, c.y - 1};
    case Action::Down: return {c.x, c.y + 1};
    case Action::Left: return {c.x - 1, c.y};
    case Action::Right: return {c.x + 1, c.y};
    case Action::Wait: return c;
  }
  return c;
}

using ActionSeq = std::vector<Action>;

/// One action per character of "udlrw", case-insensitive.
inline ActionSeq parse_plan(std::string_view text) {
  ActionSeq actions;
  actions.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    switch (c) {
      case 'u': case 'd': case 'l': case 'r': case 'w':
        actions.push_back(static_cast<Action>(c));
        break;
      default:
        throw Error(Errc::IllegalCharacter,
                    "illegal plan character '" + std::string(1, text[i]) + "' at index " +
                        std::to_string(i),
                    static_cast<std::int64_t>(i));
    }
  }
  return actions;
}

inline std::string to_string(std::span<const Action> actions) {
  std::string out;
  out.reserve(actions.size());
  for (auto a : actions) out += static_cast<char>(a);
  return out;
}

/// Splits a multi-agent plan field ("rr;dd;w") into per-agent sequences.
/// An IllegalCharacter error reports the agent index as its position.
inline std::vector<ActionSeq> parse_plan_field(std::string_view field) {
  std::vector<ActionSeq> plans;
  const auto parts = detail::split(field, ';');
  plans.reserve(parts.size());
  for (std::size_t agent = 0; agent < parts.size(); ++agent) {
    try {
      plans.push_back(parse_plan(detail::trim(parts[agent])));
    } catch (const Error& e) {
      throw Error(e.code(), "agent " + std::to_string(agent) + ": " + e.what(),
                  static_cast<std::int64_t>(agent));
    }
  }
  return plans;
}

inline std::string join_plans(std::span<const ActionSeq> plans) {
  std::string out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (i) out += ';';
    out += to_string(plans[i]);
  }
  return out;
}

}  // namespace mapft
