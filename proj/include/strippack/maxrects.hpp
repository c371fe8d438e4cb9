#pragma once

// MaxRects with best-short-side-fit scoring (Jylanki, "A Thousand Ways to Pack
// the Bin"). Items go to the bottom-left corner of the chosen free rectangle;
// this is free (x, y) placement, not the drop mechanics of the environment.

#include <algorithm>
#include <optional>
#include <tuple>
#include <vector>

#include "grid.hpp"

namespace strippack {

struct FreeRectangle {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  int right() const noexcept { return x + width; }
  int top() const noexcept { return y + height; }

  bool contains(const FreeRectangle& o) const noexcept {
    return o.x >= x && o.y >= y && o.right() <= right() && o.top() <= top();
  }
  bool intersects(const FreeRectangle& o) const noexcept {
    return o.x < right() && x < o.right() && o.y < top() && y < o.top();
  }

  friend auto operator<=>(const FreeRectangle&, const FreeRectangle&) = default;
};

// Maximal free rectangles of one bin, kept sorted and containment-free.
class FreeRectSet {
 public:
  explicit FreeRectSet(const BinConfig& cfg) : bin_(cfg), rects_{{0, 0, cfg.width, cfg.height}} {}
  FreeRectSet(const BinConfig& cfg, std::vector<FreeRectangle> rects) : bin_(cfg), rects_(std::move(rects)) {
    normalize();
  }

  const std::vector<FreeRectangle>& rects() const noexcept { return rects_; }
  const BinConfig& bin() const noexcept { return bin_; }

  // Carves `used` out of every free rectangle it touches.
  void occupy(const FreeRectangle& used) {
    std::vector<FreeRectangle> next;
    next.reserve(rects_.size() + 4);
    for (const FreeRectangle& fr : rects_) {
      if (!fr.intersects(used)) {
        next.push_back(fr);
        continue;
      }
      if (used.x > fr.x) next.push_back({fr.x, fr.y, used.x - fr.x, fr.height});
      if (used.right() < fr.right()) next.push_back({used.right(), fr.y, fr.right() - used.right(), fr.height});
      if (used.y > fr.y) next.push_back({fr.x, fr.y, fr.width, used.y - fr.y});
      if (used.top() < fr.top()) next.push_back({fr.x, used.top(), fr.width, fr.top() - used.top()});
    }
    rects_ = std::move(next);
    normalize();
  }

  // True when no rectangle lies inside another and all lie inside the bin.
  bool invariants_hold() const {
    for (const auto& r : rects_) {
      if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 || r.right() > bin_.width || r.top() > bin_.height) {
        return false;
      }
    }
    for (std::size_t i = 0; i < rects_.size(); ++i) {
      for (std::size_t j = 0; j < rects_.size(); ++j) {
        if (i != j && rects_[i].contains(rects_[j])) return false;
      }
    }
    return true;
  }

 private:
  void normalize() {
    std::sort(rects_.begin(), rects_.end(), [](const FreeRectangle& a, const FreeRectangle& b) {
      return std::tie(a.y, a.x, a.width, a.height) < std::tie(b.y, b.x, b.width, b.height);
    });
    rects_.erase(std::unique(rects_.begin(), rects_.end()), rects_.end());
    std::vector<FreeRectangle> kept;
    kept.reserve(rects_.size());
    for (std::size_t i = 0; i < rects_.size(); ++i) {
      bool inside = false;
      for (std::size_t j = 0; j < rects_.size() && !inside; ++j) inside = j != i && rects_[j].contains(rects_[i]);
      if (!inside) kept.push_back(rects_[i]);
    }
    rects_ = std::move(kept);
  }

  BinConfig bin_;
  std::vector<FreeRectangle> rects_;
};

// BSSF choice: minimal short-side leftover, then minimal long-side leftover,
// then lower y, lower x, Deg0 before Deg90. Returns nullopt when neither
// rotation fits any free rectangle; `free` is untouched in that case.
inline std::optional<Placement> maxrects_place(FreeRectSet& free, const Item& item) {
  struct Candidate {
    int short_fit, long_fit, y, x, rot;
    auto key() const { return std::tie(short_fit, long_fit, y, x, rot); }
  };
  std::optional<Candidate> best;
  for (const FreeRectangle& fr : free.rects()) {
    for (Rotation r : kRotations) {
      const Extent e = item.extent(r);
      if (e.width > fr.width || e.height > fr.height) continue;
      const int dw = fr.width - e.width;
      const int dh = fr.height - e.height;
      const Candidate c{std::min(dw, dh), std::max(dw, dh), fr.y, fr.x, static_cast<int>(r)};
      if (!best || c.key() < best->key()) best = c;
    }
  }
  if (!best) return std::nullopt;
  const Rotation rot = static_cast<Rotation>(best->rot);
  const Extent e = item.extent(rot);
  const Placement p{item.id, best->x, best->y, rot, e.width, e.height};
  free.occupy({p.x, p.y, e.width, e.height});
  return p;
}

}  // namespace strippack
