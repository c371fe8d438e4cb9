#pragma once

// Scripted policies and the episode runners that turn a policy plus an item
// list into an EpisodeLog.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "environment.hpp"
#include "episode_log.hpp"
#include "grid.hpp"
#include "maxrects.hpp"
#include "rng.hpp"

namespace strippack {

// Lowest resting height; ties by least lost area, then leftmost, then Deg0.
inline std::optional<Action> greedy_skyline(const HeightMap& map, const Item& item, const BinConfig& cfg) {
  std::optional<std::tuple<int, std::int64_t, int, int>> best;
  for (Rotation r : kRotations) {
    const Extent e = item.extent(r);
    const FeasibilityMask mask = feasibility_map(map, item, r, cfg);
    for (int x = 0; x < cfg.width; ++x) {
      if (!mask[x]) continue;
      const int rest = rest_height(map, x, e.width);
      const auto key = std::make_tuple(rest, lost_area(map, x, e.width, rest), x, static_cast<int>(r));
      if (!best || key < *best) best = key;
    }
  }
  if (!best) return std::nullopt;
  return Action::from(static_cast<Rotation>(std::get<3>(*best)), std::get<2>(*best), cfg.width);
}

// Uniform over the set bits of a flat action mask.
inline std::optional<Action> random_masked(std::span<const std::uint8_t> mask, SplitMix64& rng) {
  std::vector<int> feasible;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) feasible.push_back(static_cast<int>(i));
  }
  if (feasible.empty()) return std::nullopt;
  return Action{feasible[static_cast<std::size_t>(rng.below(feasible.size()))]};
}

inline std::optional<Action> random_masked(std::span<const std::uint8_t> mask, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_masked(mask, rng);
}

// A decision rule that drives the environment through its action space.
class EnvPolicy {
 public:
  virtual ~EnvPolicy() = default;
  virtual std::string name() const = 0;
  // Called at the start of every episode with that episode's seed.
  virtual void begin_episode(std::uint64_t /*seed*/) {}
  // Returns nullopt when the policy has no move; may throw to abort the episode.
  virtual std::optional<Action> act(const PackingEnv& env) = 0;
};

class GreedySkylinePolicy final : public EnvPolicy {
 public:
  std::string name() const override { return "greedy"; }
  std::optional<Action> act(const PackingEnv& env) override {
    const Item* item = env.current_item();
    if (!item) return std::nullopt;
    return greedy_skyline(env.height_map(), *item, env.config().bin);
  }
};

class RandomMaskedPolicy final : public EnvPolicy {
 public:
  static constexpr std::uint64_t kStream = 0x52414E44;

  std::string name() const override { return "random"; }
  void begin_episode(std::uint64_t seed) override { rng_ = SplitMix64(mix_seed(seed, kStream)); }
  std::optional<Action> act(const PackingEnv& env) override {
    const auto mask = env.action_mask();
    return random_masked(mask, rng_);
  }

 private:
  SplitMix64 rng_{0};
};

// Metadata stamped into every log a runner produces.
struct EpisodeContext {
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::RandomSet;
};

namespace detail {

inline EpisodeLog log_header(std::string policy, const EpisodeContext& ctx, const EnvConfig& cfg,
                             const std::vector<Item>& items) {
  EpisodeLog log;
  log.episode = ctx.episode;
  log.policy = std::move(policy);
  log.seed = ctx.seed;
  log.scenario = ctx.scenario;
  log.bin = cfg.bin;
  log.reward_mode = cfg.mode;
  log.penalty_scale = cfg.penalty_scale;
  log.items = items;
  return log;
}

}  // namespace detail

// Steps the environment with `policy` until done. A policy exception or a
// missing move on a live episode aborts it; the error is kept in the log.
inline EpisodeLog run_env_episode(EnvPolicy& policy, const std::vector<Item>& items, const EnvConfig& cfg,
                                  const EpisodeContext& ctx) {
  EpisodeLog log = detail::log_header(policy.name(), ctx, cfg, items);
  PackingEnv env(cfg);
  try {
    policy.begin_episode(ctx.seed);
    env.reset(items);
    while (!env.done()) {
      const std::optional<Action> a = policy.act(env);
      if (!a) throw InfeasibleAction("policy returned no move while feasible placements exist");
      const StepOutcome o = env.step(*a);
      log.actions.push_back(a->index);
      log.placements.push_back(o.info.placement);
      log.rewards.push_back(o.reward);
      log.lost_areas.push_back(o.info.lost_area);
    }
    log.density = env.terminal_density();
    log.termination = env.termination();
  } catch (const std::exception& e) {
    log.termination = Termination::Aborted;
    log.density = 0.0;
    log.error = e.what();
  }
  return log;
}

// MaxRects over the same ordered items; stops at the first item that fits
// nowhere, matching the environment's stopping rule. Density uses the same
// w * y_max denominator.
inline EpisodeLog run_maxrects_episode(const std::vector<Item>& items, const EnvConfig& cfg,
                                       const EpisodeContext& ctx) {
  EpisodeLog log = detail::log_header("maxrects", ctx, cfg, items);
  FreeRectSet free(cfg.bin);
  int y_max = 0;
  std::int64_t placed = 0;
  log.termination = Termination::ItemsExhausted;
  for (const Item& item : items) {
    const auto p = maxrects_place(free, item);
    if (!p) {
      log.termination = Termination::NoFeasiblePlacement;
      break;
    }
    log.placements.push_back(*p);
    y_max = std::max(y_max, p->y + p->effective_height);
    placed += p->area();
  }
  log.density = y_max == 0 ? 0.0 : static_cast<double>(placed) / static_cast<double>(std::int64_t{cfg.bin.width} * y_max);
  return log;
}

inline bool is_builtin_policy(std::string_view name) {
  return name == "maxrects" || name == "greedy" || name == "random";
}

inline std::unique_ptr<EnvPolicy> make_env_policy(std::string_view name) {
  if (name == "greedy") return std::make_unique<GreedySkylinePolicy>();
  if (name == "random") return std::make_unique<RandomMaskedPolicy>();
  return nullptr;
}

}  // namespace strippack
