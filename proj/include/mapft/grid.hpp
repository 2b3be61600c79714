#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mapft/detail/text.hpp"
#include "mapft/error.hpp"

namespace mapft {

/// Grid coordinate: x is the column, y the row, origin at the top-left.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

/// 4-connected grid with open/blocked cells. Immutable once built.
class GridMap {
 public:
  GridMap() = default;

  GridMap(std::string name, int width, int height, std::vector<std::uint8_t> open)
      : name_(std::move(name)), width_(width), height_(height), open_(std::move(open)) {
    if (width_ < 1 || height_ < 1)
      throw Error(Errc::DimensionMismatch, "map dimensions must be positive");
    if (open_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
      throw Error(Errc::DimensionMismatch, "cell count does not match width x height");
    for (auto v : open_) num_open_ += v ? 1 : 0;
    if (num_open_ == 0) throw Error(Errc::NoTraversableCell, "map has no traversable cell");
  }

  /// All-open map, handy for fixtures.
  static GridMap empty(std::string name, int width, int height) {
    return GridMap(std::move(name), width, height,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 1));
  }

  const std::string& name() const noexcept { return name_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return open_.size(); }
  std::size_t open_count() const noexcept { return num_open_; }

  bool in_bounds(Cell c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  bool passable(Cell c) const noexcept { return in_bounds(c) && open_[index(c)] != 0; }

  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell(std::size_t index) const noexcept {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)),
            static_cast<int>(index / static_cast<std::size_t>(width_))};
  }

  const std::vector<std::uint8_t>& cells() const noexcept { return open_; }

  /// Traversability equality; the name is not compared.
  bool same_layout(const GridMap& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && open_ == other.open_;
  }

 private:
  std::string name_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> open_;
  std::size_t num_open_ = 0;
};

/// '.' and 'G' are open; every other character is blocked.
constexpr bool is_passable_char(char c) noexcept { return c == '.' || c == 'G'; }

/// Parses the benchmark map grammar:
///   type <word> / height <H> / width <W> / map / H rows of W characters.
inline GridMap parse_map(std::string_view text, std::string name = {}) {
  const auto lines = detail::split_lines(text);
  if (lines.size() < 4) throw Error(Errc::MalformedHeader, "map header needs 4 lines");

  std::string_view rest;
  if (!detail::starts_with_word(lines[0], "type", rest) || rest.empty())
    throw Error(Errc::MalformedHeader, "expected 'type <word>'", 0);

  auto header_int = [&](std::size_t i, std::string_view key) {
    std::string_view value;
    if (!detail::starts_with_word(lines[i], key, value))
      throw Error(Errc::MalformedHeader, "expected '" + std::string(key) + " <int>'",
                  static_cast<std::int64_t>(i));
    auto n = detail::parse_int<int>(value);
    if (!n || *n < 1)
      throw Error(Errc::MalformedHeader, "bad " + std::string(key) + " value",
                  static_cast<std::int64_t>(i));
    return *n;
  };
  const int height = header_int(1, "height");
  const int width = header_int(2, "width");
  if (detail::trim(lines[3]) != "map") throw Error(Errc::MalformedHeader, "expected 'map'", 3);

  // Trailing blank lines after the body are tolerated.
  std::size_t rows_end = lines.size();
  while (rows_end > 4 && lines[rows_end - 1].empty()) --rows_end;
  const std::size_t rows = rows_end - 4;
  if (rows != static_cast<std::size_t>(height))
    throw Error(Errc::DimensionMismatch,
                "header declares height " + std::to_string(height) + " but " +
                    std::to_string(rows) + " rows follow");

  std::vector<std::uint8_t> open;
  open.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const auto row = lines[4 + static_cast<std::size_t>(y)];
    if (row.size() != static_cast<std::size_t>(width))
      throw Error(Errc::DimensionMismatch,
                  "row " + std::to_string(y) + " has " + std::to_string(row.size()) +
                      " characters, expected " + std::to_string(width),
                  y);
    for (char c : row) open.push_back(is_passable_char(c) ? 1 : 0);
  }
  return GridMap(std::move(name), width, height, std::move(open));
}

/// Canonical rendering: open cells as '.', blocked as '@'.
inline std::string serialize_map(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                    std::to_string(map.width()) + "\nmap\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out += map.passable({x, y}) ? '.' : '@';
    out += '\n';
  }
  return out;
}

}  // namespace mapft
