#pragma once

// The packing MDP: a 5 x w observation, a 2 x w action space, Tetris-drop
// transitions and the terminal-only / lost-area-penalized reward functions.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "instances.hpp"

namespace strippack {

// V1 pays only the terminal density; V2 also charges the lost area on every
// non-terminal step.
enum class RewardMode : std::uint8_t { V1, V2 };

// How the V2 penalty is scaled: lost cells divided by the bin area, or raw cells.
enum class PenaltyScale : std::uint8_t { Normalized, RawCells };

inline const char* to_string(RewardMode m) noexcept { return m == RewardMode::V1 ? "v1" : "v2"; }
inline const char* to_string(PenaltyScale s) noexcept { return s == PenaltyScale::Normalized ? "normalized" : "raw"; }

inline std::optional<RewardMode> parse_reward_mode(std::string_view s) {
  if (s == "v1" || s == "V1") return RewardMode::V1;
  if (s == "v2" || s == "V2") return RewardMode::V2;
  return std::nullopt;
}

struct EnvConfig {
  BinConfig bin;
  RewardMode mode = RewardMode::V1;
  PenaltyScale penalty_scale = PenaltyScale::Normalized;
};

// Aborted is only recorded by episode runners when a policy fails mid-episode.
enum class Termination : std::uint8_t { Running, ItemsExhausted, NoFeasiblePlacement, Aborted };

inline const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::ItemsExhausted: return "items_exhausted";
    case Termination::NoFeasiblePlacement: return "no_feasible_placement";
    case Termination::Aborted: return "aborted";
  }
  return "unknown";
}

// Observation, channel-major: [0] height map / h, [1] Deg0 mask, [2] Deg90
// mask, [3] item width / w broadcast, [4] item height / h broadcast.
struct StateTensor {
  static constexpr int kChannels = 5;

  int width = 0;
  std::vector<double> values;

  std::span<const double> channel(int c) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(c) * width, static_cast<std::size_t>(width));
  }
  std::size_t size() const noexcept { return values.size(); }

  friend bool operator==(const StateTensor&, const StateTensor&) = default;
};

// Flat index into the 2 x w action space: a < w is (Deg0, x=a), otherwise (Deg90, x=a-w).
struct Action {
  int index = 0;

  static Action from(Rotation r, int x, int bin_width) noexcept {
    return Action{r == Rotation::Deg0 ? x : bin_width + x};
  }
  Rotation rotation(int bin_width) const noexcept { return index < bin_width ? Rotation::Deg0 : Rotation::Deg90; }
  int column(int bin_width) const noexcept { return index < bin_width ? index : index - bin_width; }

  friend bool operator==(const Action&, const Action&) = default;
};

struct StepInfo {
  Placement placement;
  std::int64_t lost_area = 0;
  int y_max = 0;
  // Reward components: `penalty` is the (non-positive) lost-area term, `terminal`
  // the density paid on the final step. reward == penalty + terminal.
  double penalty = 0.0;
  double terminal = 0.0;
  std::optional<double> density;  // set on the terminal step
};

struct StepOutcome {
  StateTensor state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

class PackingEnv {
 public:
  explicit PackingEnv(EnvConfig cfg = {}) : cfg_(cfg), map_(cfg.bin.width) { cfg_.bin.validate(); }

  const EnvConfig& config() const noexcept { return cfg_; }

  // Starts an episode. Items must be in non-increasing area order. If the
  // first item fits in neither rotation the episode is done immediately.
  StateTensor reset(std::vector<Item> items) {
    if (items.empty()) throw ContractViolation("reset: item list is empty");
    for (const Item& it : items) it.validate();
    if (!is_area_sorted(items)) throw ContractViolation("reset: items must be sorted by non-increasing area");
    items_ = std::move(items);
    map_ = HeightMap(cfg_.bin.width);
    next_ = 0;
    placed_area_ = 0;
    placements_.clear();
    lost_areas_.clear();
    termination_ = Termination::Running;
    started_ = true;
    update_termination();
    return encode_state();
  }

  StepOutcome step(Action action) {
    if (!started_) throw ContractViolation("step: reset() has not been called");
    if (done()) throw ContractViolation("step: episode is already finished");
    const int w = cfg_.bin.width;
    if (action.index < 0 || action.index >= 2 * w) {
      throw InfeasibleAction("action " + std::to_string(action.index) + " outside [0, " + std::to_string(2 * w) + ")");
    }
    const Item& item = items_[next_];
    const Rotation rot = action.rotation(w);
    const int x = action.column(w);
    const Extent e = item.extent(rot);
    if (x + e.width > w || rest_height(map_, x, e.width) + e.height > cfg_.bin.height) {
      throw InfeasibleAction("action " + std::to_string(action.index) + " (" + to_string(rot) + ", x=" +
                             std::to_string(x) + ") is masked for item " + std::to_string(item.id));
    }

    const Placement p = drop(map_, item, rot, x);
    PlacementResult res = apply_placement(map_, p, cfg_.bin);
    map_ = std::move(res.map);
    placed_area_ += p.area();
    placements_.push_back(p);
    lost_areas_.push_back(res.lost);
    ++next_;
    update_termination();

    StepOutcome out;
    out.done = done();
    out.info.placement = p;
    out.info.lost_area = res.lost;
    out.info.y_max = map_.max();
    if (out.done) {
      out.info.terminal = terminal_density();
      out.info.density = out.info.terminal;
    } else if (cfg_.mode == RewardMode::V2) {
      out.info.penalty = penalty(res.lost);
    }
    out.reward = out.info.penalty + out.info.terminal;
    out.state = encode_state();
    return out;
  }

  // Placed area over the region (0, w, 0, y_max). Zero when nothing was placed.
  double terminal_density() const {
    if (!done()) throw ContractViolation("terminal_density: episode still running");
    const int y_max = map_.max();
    if (placements_.empty() || y_max == 0) return 0.0;
    return static_cast<double>(placed_area_) / static_cast<double>(std::int64_t{cfg_.bin.width} * y_max);
  }

  // Masks are recomputed from the current skyline. Once the items are
  // exhausted, channels 1-4 are zero.
  StateTensor encode_state() const {
    const int w = cfg_.bin.width;
    const double h = cfg_.bin.height;
    StateTensor s{w, std::vector<double>(static_cast<std::size_t>(StateTensor::kChannels) * w, 0.0)};
    auto at = [&](int c, int x) -> double& { return s.values[static_cast<std::size_t>(c) * w + x]; };
    for (int x = 0; x < w; ++x) at(0, x) = map_[x] / h;
    if (const Item* item = current_item()) {
      const auto m0 = feasibility_map(map_, *item, Rotation::Deg0, cfg_.bin);
      const auto m90 = feasibility_map(map_, *item, Rotation::Deg90, cfg_.bin);
      const double iw = static_cast<double>(item->width) / w;
      const double ih = item->height / h;
      for (int x = 0; x < w; ++x) {
        at(1, x) = m0[x] ? 1.0 : 0.0;
        at(2, x) = m90[x] ? 1.0 : 0.0;
        at(3, x) = iw;
        at(4, x) = ih;
      }
    }
    return s;
  }

  // Flat 2 x w action mask for the current item (all zero when none).
  std::vector<std::uint8_t> action_mask() const {
    const int w = cfg_.bin.width;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(2 * w), 0);
    if (const Item* item = current_item()) {
      const auto m0 = feasibility_map(map_, *item, Rotation::Deg0, cfg_.bin);
      const auto m90 = feasibility_map(map_, *item, Rotation::Deg90, cfg_.bin);
      std::copy(m0.bits.begin(), m0.bits.end(), mask.begin());
      std::copy(m90.bits.begin(), m90.bits.end(), mask.begin() + w);
    }
    return mask;
  }

  bool done() const noexcept { return termination_ != Termination::Running; }
  Termination termination() const noexcept { return termination_; }
  const Item* current_item() const noexcept { return next_ < items_.size() ? &items_[next_] : nullptr; }
  const HeightMap& height_map() const noexcept { return map_; }
  const std::vector<Item>& items() const noexcept { return items_; }
  const std::vector<Placement>& placements() const noexcept { return placements_; }
  const std::vector<std::int64_t>& lost_areas() const noexcept { return lost_areas_; }
  std::int64_t placed_area() const noexcept { return placed_area_; }
  std::size_t steps_taken() const noexcept { return placements_.size(); }

 private:
  double penalty(std::int64_t lost) const noexcept {
    if (lost == 0) return 0.0;
    if (cfg_.penalty_scale == PenaltyScale::RawCells) return -static_cast<double>(lost);
    return -static_cast<double>(lost) / static_cast<double>(cfg_.bin.area());
  }

  void update_termination() {
    if (next_ >= items_.size()) {
      termination_ = Termination::ItemsExhausted;
      return;
    }
    const Item& item = items_[next_];
    const bool any = feasibility_map(map_, item, Rotation::Deg0, cfg_.bin).any() ||
                     feasibility_map(map_, item, Rotation::Deg90, cfg_.bin).any();
    termination_ = any ? Termination::Running : Termination::NoFeasiblePlacement;
  }

  EnvConfig cfg_;
  HeightMap map_;
  std::vector<Item> items_;
  std::size_t next_ = 0;
  std::int64_t placed_area_ = 0;
  std::vector<Placement> placements_;
  std::vector<std::int64_t> lost_areas_;
  Termination termination_ = Termination::Running;
  bool started_ = false;
};

}  // namespace strippack
