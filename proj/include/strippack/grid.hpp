#pragma once

// Integer geometry of the discretized bin: skyline, Tetris-style drop,
// feasibility masks and lost-area accounting.
//
// Conventions: column 0 is the left wall, row 0 the floor. A placement is
// anchored at the item's left edge column and bottom edge row.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace strippack {

struct BinConfig {
  int width = 125;
  int height = 150;

  void validate() const {
    if (width < 1 || height < 1) {
      throw ContractViolation("bin dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
  }

  std::int64_t area() const noexcept { return std::int64_t{width} * height; }

  friend bool operator==(const BinConfig&, const BinConfig&) = default;
};

enum class Rotation : std::uint8_t { Deg0 = 0, Deg90 = 1 };

inline constexpr Rotation kRotations[] = {Rotation::Deg0, Rotation::Deg90};

inline const char* to_string(Rotation r) noexcept { return r == Rotation::Deg0 ? "deg0" : "deg90"; }

struct Extent {
  int width = 0;
  int height = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

struct Item {
  int id = 0;
  int width = 1;
  int height = 1;

  std::int64_t area() const noexcept { return std::int64_t{width} * height; }

  // Deg90 swaps the sides.
  Extent extent(Rotation r) const noexcept {
    return r == Rotation::Deg0 ? Extent{width, height} : Extent{height, width};
  }

  void validate() const {
    if (id < 0) throw ContractViolation("item id must be non-negative");
    if (width < 1 || height < 1) {
      throw ContractViolation("item " + std::to_string(id) + " must have positive sides, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
  }

  friend bool operator==(const Item&, const Item&) = default;
};

inline bool fits_empty_bin(const Item& item, Rotation r, const BinConfig& cfg) noexcept {
  const Extent e = item.extent(r);
  return e.width <= cfg.width && e.height <= cfg.height;
}

inline bool fits_empty_bin(const Item& item, const BinConfig& cfg) noexcept {
  return fits_empty_bin(item, Rotation::Deg0, cfg) || fits_empty_bin(item, Rotation::Deg90, cfg);
}

// Per-column skyline. Entries are the unnormalized occupation level M.
class HeightMap {
 public:
  HeightMap() = default;
  explicit HeightMap(int width) : heights_(static_cast<std::size_t>(std::max(width, 0)), 0) {}
  explicit HeightMap(std::vector<int> heights) : heights_(std::move(heights)) {}

  int width() const noexcept { return static_cast<int>(heights_.size()); }
  int operator[](int x) const { return heights_[static_cast<std::size_t>(x)]; }
  std::span<const int> heights() const noexcept { return heights_; }

  std::int64_t sum() const noexcept {
    return std::accumulate(heights_.begin(), heights_.end(), std::int64_t{0});
  }
  int max() const noexcept {
    return heights_.empty() ? 0 : *std::max_element(heights_.begin(), heights_.end());
  }

  // Raises every column in [x, x+width) to `level`. No validation; callers go
  // through apply_placement.
  void raise(int x, int width, int level) {
    std::fill_n(heights_.begin() + x, width, level);
  }

  friend bool operator==(const HeightMap&, const HeightMap&) = default;

 private:
  std::vector<int> heights_;
};

struct Placement {
  int item_id = 0;
  int x = 0;
  int y = 0;
  Rotation rotation = Rotation::Deg0;
  int effective_width = 0;
  int effective_height = 0;

  std::int64_t area() const noexcept { return std::int64_t{effective_width} * effective_height; }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct FeasibilityMask {
  std::vector<std::uint8_t> bits;

  bool operator[](int x) const { return bits[static_cast<std::size_t>(x)] != 0; }
  bool any() const noexcept {
    return std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
  }
  int count() const noexcept {
    return static_cast<int>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
  }

  friend bool operator==(const FeasibilityMask&, const FeasibilityMask&) = default;
};

// Resting row of an item of `width` columns dropped with its left edge at x:
// the highest skyline cell under its footprint.
inline int rest_height(const HeightMap& map, int x, int width) {
  if (width < 1 || x < 0 || x + width > map.width()) {
    throw ContractViolation("rest_height: footprint [" + std::to_string(x) + ", " +
                            std::to_string(x + width) + ") outside bin of width " +
                            std::to_string(map.width()));
  }
  const auto h = map.heights();
  return *std::max_element(h.begin() + x, h.begin() + x + width);
}

inline FeasibilityMask feasibility_map(const HeightMap& map, const Item& item, Rotation rot,
                                       const BinConfig& cfg) {
  const Extent e = item.extent(rot);
  FeasibilityMask mask{std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.width), 0)};
  if (e.width > cfg.width || e.height > cfg.height) return mask;
  for (int x = 0; x + e.width <= cfg.width; ++x) {
    if (rest_height(map, x, e.width) + e.height <= cfg.height) mask.bits[static_cast<std::size_t>(x)] = 1;
  }
  return mask;
}

// Cells sealed under an item resting at rest_y over [x, x+width). Side gaps are
// not charged; a narrower item can still reach them.
inline std::int64_t lost_area(const HeightMap& map, int x, int width, int rest_y) {
  std::int64_t lost = 0;
  for (int c = x; c < x + width; ++c) lost += rest_y - map[c];
  return lost;
}

// Resolves the drop of `item` at column x without checking the ceiling.
inline Placement drop(const HeightMap& map, const Item& item, Rotation rot, int x) {
  const Extent e = item.extent(rot);
  return Placement{item.id, x, rest_height(map, x, e.width), rot, e.width, e.height};
}

struct PlacementResult {
  HeightMap map;
  std::int64_t lost = 0;
};

// Applies a dropped placement. The placement must sit exactly at the resting
// height of its footprint and stay below the ceiling; anything else throws
// InfeasibleAction and `map` is not touched.
inline PlacementResult apply_placement(const HeightMap& map, const Placement& p, const BinConfig& cfg) {
  const auto describe = [&p] {
    return "placement of item " + std::to_string(p.item_id) + " (" + std::to_string(p.effective_width) +
           "x" + std::to_string(p.effective_height) + ") at x=" + std::to_string(p.x) +
           ", y=" + std::to_string(p.y);
  };
  if (map.width() != cfg.width) throw ContractViolation("apply_placement: height map width differs from bin");
  if (p.effective_width < 1 || p.effective_height < 1) throw InfeasibleAction(describe() + ": degenerate extent");
  if (p.x < 0 || p.x + p.effective_width > cfg.width) throw InfeasibleAction(describe() + ": exceeds side walls");
  const int rest = rest_height(map, p.x, p.effective_width);
  if (p.y != rest) {
    throw InfeasibleAction(describe() + ": not resting on the skyline (rest height " + std::to_string(rest) + ")");
  }
  if (p.y + p.effective_height > cfg.height) throw InfeasibleAction(describe() + ": exceeds bin height");

  PlacementResult out{map, lost_area(map, p.x, p.effective_width, rest)};
  out.map.raise(p.x, p.effective_width, p.y + p.effective_height);
  return out;
}

}  // namespace strippack
