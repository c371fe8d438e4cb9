#pragma once

// SVG renders of an episode: bin outline, placed items (white), optional
// skyline trace and feasibility strips for the next item drawn above the bin.
// All coordinates are integer multiples of the cell size, so output bytes are
// a pure function of the log and options.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "episode_log.hpp"
#include "grid.hpp"

namespace strippack {

struct RenderOptions {
  int cell = 4;                       // pixels per grid cell
  std::optional<std::size_t> after;   // render the state after this many placements (default: all)
  bool height_map = false;            // skyline trace
  bool feasibility = false;           // Deg0 / Deg90 strips for the next item
};

struct RenderLayout {
  static constexpr int kMargin = 8;
  static constexpr int kStrip = 6;
  static constexpr int kStripGap = 2;

  int cell = 4;
  BinConfig bin;

  int bin_left() const noexcept { return kMargin; }
  int bin_top() const noexcept { return kMargin + 2 * (kStrip + kStripGap); }
  int bin_bottom() const noexcept { return bin_top() + bin.height * cell; }
  int image_width() const noexcept { return 2 * kMargin + bin.width * cell; }
  int image_height() const noexcept { return bin_bottom() + kMargin; }

  // Grid cell (x, y) with y counted upward from the floor -> SVG pixel of its top-left corner.
  int px(int x) const noexcept { return bin_left() + x * cell; }
  int py(int y_top) const noexcept { return bin_bottom() - y_top * cell; }
};

// Skyline implied by a set of placements (highest occupied row per column).
inline HeightMap skyline_of(const std::vector<Placement>& placements, std::size_t count, const BinConfig& bin) {
  std::vector<int> h(static_cast<std::size_t>(bin.width), 0);
  for (std::size_t i = 0; i < count && i < placements.size(); ++i) {
    const Placement& p = placements[i];
    for (int c = p.x; c < p.x + p.effective_width && c < bin.width; ++c) {
      h[static_cast<std::size_t>(c)] = std::max(h[static_cast<std::size_t>(c)], p.y + p.effective_height);
    }
  }
  return HeightMap(std::move(h));
}

inline std::string render_svg(const EpisodeLog& log, const RenderOptions& opt = {}) {
  const RenderLayout L{opt.cell, log.bin};
  const std::size_t shown = std::min(opt.after.value_or(log.placements.size()), log.placements.size());
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << L.image_width() << "\" height=\"" << L.image_height()
    << "\" viewBox=\"0 0 " << L.image_width() << ' ' << L.image_height() << "\">\n";
  o << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << L.image_width() << "\" height=\"" << L.image_height()
    << "\" fill=\"#26303f\"/>\n";
  o << "<rect class=\"bin\" x=\"" << L.bin_left() << "\" y=\"" << L.bin_top() << "\" width=\"" << log.bin.width * L.cell
    << "\" height=\"" << log.bin.height * L.cell << "\" fill=\"#3b5b8c\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  for (std::size_t i = 0; i < shown; ++i) {
    const Placement& p = log.placements[i];
    o << "<rect class=\"item\" data-item=\"" << p.item_id << "\" x=\"" << L.px(p.x) << "\" y=\""
      << L.py(p.y + p.effective_height) << "\" width=\"" << p.effective_width * L.cell << "\" height=\""
      << p.effective_height * L.cell << "\" fill=\"#ffffff\" stroke=\"#808080\" stroke-width=\"1\"/>\n";
  }

  const HeightMap sky = skyline_of(log.placements, shown, log.bin);
  if (opt.height_map) {
    o << "<polyline class=\"height-map\" fill=\"none\" stroke=\"#f2c230\" stroke-width=\"2\" points=\"";
    for (int x = 0; x < log.bin.width; ++x) {
      if (x) o << ' ';
      o << L.px(x) << ',' << L.py(sky[x]) << ' ' << L.px(x + 1) << ',' << L.py(sky[x]);
    }
    o << "\"/>\n";
  }

  if (opt.feasibility && shown < log.items.size()) {
    const Item& next = log.items[shown];
    for (Rotation r : kRotations) {
      const FeasibilityMask m = feasibility_map(sky, next, r, log.bin);
      // Deg0 strip sits directly above the bin, Deg90 above that.
      const int row = r == Rotation::Deg0 ? 1 : 2;
      const int top = L.bin_top() - row * (RenderLayout::kStrip + RenderLayout::kStripGap);
      for (int x = 0; x < log.bin.width; ++x) {
        if (!m[x]) continue;
        o << "<rect class=\"feasible-" << to_string(r) << "\" x=\"" << L.px(x) << "\" y=\"" << top << "\" width=\""
          << L.cell << "\" height=\"" << RenderLayout::kStrip << "\" fill=\"#4caf50\"/>\n";
      }
    }
  }
  o << "</svg>\n";
  return o.str();
}

inline void render_episode(const EpisodeLog& log, const std::filesystem::path& path, const RenderOptions& opt = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << render_svg(log, opt);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// <root>/<experiment>/<policy>/<episode>.svg
inline std::filesystem::path render_path(const std::filesystem::path& root, const std::string& experiment,
                                         const EpisodeLog& log) {
  return root / experiment / log.policy / (std::to_string(log.episode) + ".svg");
}

}  // namespace strippack
