#pragma once

// EpisodeLog: the unit of evaluation, persistence and regression testing.
//
// Line format (one JSON object per line, keys in this order):
//   episode, policy, seed, scenario, bin{width,height}, reward_mode,
//   penalty_scale, items[{id,width,height}], actions[],
//   placements[{item,x,y,rotation,width,height}], rewards[], lost_areas[],
//   density, termination, error (present only for aborted episodes)
// Integers print plainly; reals print in the shortest decimal form that
// round-trips to the same double, so a parsed log replays bit-exactly.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "environment.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "instances.hpp"
#include "json.hpp"

namespace strippack {

struct EpisodeLog {
  std::size_t episode = 0;
  std::string policy;
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::RandomSet;
  BinConfig bin;
  RewardMode reward_mode = RewardMode::V1;
  PenaltyScale penalty_scale = PenaltyScale::Normalized;
  std::vector<Item> items;
  // Action indices fed to the environment; empty for free-placement policies (MaxRects).
  std::vector<int> actions;
  std::vector<Placement> placements;
  std::vector<double> rewards;
  std::vector<std::int64_t> lost_areas;
  double density = 0.0;
  Termination termination = Termination::Running;
  std::optional<std::string> error;

  std::int64_t placed_area() const noexcept {
    std::int64_t a = 0;
    for (const auto& p : placements) a += p.area();
    return a;
  }

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

inline std::optional<Termination> parse_termination(std::string_view s) {
  for (Termination t : {Termination::Running, Termination::ItemsExhausted, Termination::NoFeasiblePlacement,
                        Termination::Aborted}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

inline nlohmann::ordered_json to_json(const EpisodeLog& log) {
  nlohmann::ordered_json j;
  j["episode"] = log.episode;
  j["policy"] = log.policy;
  j["seed"] = log.seed;
  j["scenario"] = to_string(log.scenario);
  j["bin"] = {{"width", log.bin.width}, {"height", log.bin.height}};
  j["reward_mode"] = to_string(log.reward_mode);
  j["penalty_scale"] = to_string(log.penalty_scale);
  j["items"] = detail::items_to_json(log.items);
  j["actions"] = log.actions;
  auto pl = nlohmann::ordered_json::array();
  for (const auto& p : log.placements) {
    pl.push_back({{"item", p.item_id},
                  {"x", p.x},
                  {"y", p.y},
                  {"rotation", to_string(p.rotation)},
                  {"width", p.effective_width},
                  {"height", p.effective_height}});
  }
  j["placements"] = std::move(pl);
  j["rewards"] = log.rewards;
  j["lost_areas"] = log.lost_areas;
  j["density"] = log.density;
  j["termination"] = to_string(log.termination);
  if (log.error) j["error"] = *log.error;
  return j;
}

inline std::string to_json_line(const EpisodeLog& log) { return to_json(log).dump(); }

inline EpisodeLog episode_from_json_line(const std::string& text, std::size_t line = 0) {
  using detail::require;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
  EpisodeLog log;
  log.episode = require<std::size_t>(j, "episode", line);
  log.policy = require<std::string>(j, "policy", line);
  log.seed = require<std::uint64_t>(j, "seed", line);
  const auto scen = parse_scenario(require<std::string>(j, "scenario", line));
  if (!scen) throw ParseError("expected 'fixed' or 'random'", line, "scenario");
  log.scenario = *scen;
  if (!j.contains("bin")) throw ParseError("missing field", line, "bin");
  log.bin.width = require<int>(j["bin"], "width", line, "bin");
  log.bin.height = require<int>(j["bin"], "height", line, "bin");
  if (log.bin.width < 1 || log.bin.height < 1) throw ParseError("must be positive", line, "bin");
  const auto mode = parse_reward_mode(require<std::string>(j, "reward_mode", line));
  if (!mode) throw ParseError("expected 'v1' or 'v2'", line, "reward_mode");
  log.reward_mode = *mode;
  const auto scale = require<std::string>(j, "penalty_scale", line);
  if (scale != "normalized" && scale != "raw") throw ParseError("expected 'normalized' or 'raw'", line, "penalty_scale");
  log.penalty_scale = scale == "raw" ? PenaltyScale::RawCells : PenaltyScale::Normalized;
  if (!j.contains("items")) throw ParseError("missing field", line, "items");
  log.items = detail::items_from_json(j["items"], line, "items");
  log.actions = require<std::vector<int>>(j, "actions", line);
  if (!j.contains("placements") || !j["placements"].is_array()) throw ParseError("expected an array", line, "placements");
  for (std::size_t i = 0; i < j["placements"].size(); ++i) {
    const auto& pj = j["placements"][i];
    const std::string path = "placements[" + std::to_string(i) + "]";
    Placement p;
    p.item_id = require<int>(pj, "item", line, path);
    p.x = require<int>(pj, "x", line, path);
    p.y = require<int>(pj, "y", line, path);
    const auto rot = require<std::string>(pj, "rotation", line, path);
    if (rot != "deg0" && rot != "deg90") throw ParseError("expected 'deg0' or 'deg90'", line, path + ".rotation");
    p.rotation = rot == "deg0" ? Rotation::Deg0 : Rotation::Deg90;
    p.effective_width = require<int>(pj, "width", line, path);
    p.effective_height = require<int>(pj, "height", line, path);
    if (p.effective_width < 1 || p.effective_height < 1) throw ParseError("must be positive", line, path);
    log.placements.push_back(p);
  }
  log.rewards = require<std::vector<double>>(j, "rewards", line);
  log.lost_areas = require<std::vector<std::int64_t>>(j, "lost_areas", line);
  log.density = require<double>(j, "density", line);
  const auto term = parse_termination(require<std::string>(j, "termination", line));
  if (!term) throw ParseError("unknown termination cause", line, "termination");
  log.termination = *term;
  if (j.contains("error")) log.error = require<std::string>(j, "error", line);
  return log;
}

inline void store_episodes(const std::string& path, const std::vector<EpisodeLog>& logs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& log : logs) out << to_json_line(log) << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<EpisodeLog> load_episodes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<EpisodeLog> out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(episode_from_json_line(text, line));
  }
  return out;
}

// Re-executes the logged actions in a fresh environment and returns the log
// that run produces. Only meaningful for environment-driven policies.
inline EpisodeLog replay(const EpisodeLog& log) {
  PackingEnv env(EnvConfig{log.bin, log.reward_mode, log.penalty_scale});
  EpisodeLog out = log;
  out.placements.clear();
  out.rewards.clear();
  out.lost_areas.clear();
  env.reset(log.items);
  for (int a : log.actions) {
    const StepOutcome o = env.step(Action{a});
    out.placements.push_back(o.info.placement);
    out.rewards.push_back(o.reward);
    out.lost_areas.push_back(o.info.lost_area);
  }
  if (env.done()) {
    out.density = env.terminal_density();
    out.termination = env.termination();
  } else {
    out.termination = Termination::Aborted;
  }
  return out;
}

}  // namespace strippack
