#pragma once

// Line-delimited JSON protocol that lets an out-of-process trainer drive the
// environment over stdio.
//
// On start the server writes one handshake line:
//   {"protocol":"strippack-env","version":1,"w":125,"h":150}
// and then answers every request line with exactly one response line.
//
// Requests:
//   {"cmd":"reset","seed":42,"scenario":"random","reward_mode":"v1","n_items":15}
//   {"cmd":"step","action":17}
//   {"cmd":"close"}
// Observation responses (reset and step):
//   {"state":[5*w reals],"mask":[2*w 0/1],"reward":r,"done":false,
//    "info":{"lost":0,"y_max":0,"density":d}}
// `state` is channel-major, column-minor; `mask` is the Deg0 row followed by
// the Deg90 row. `density` is present only once the episode is done. Reals
// are printed with 9 significant digits ("%.9g"). Errors carry an "error"
// string; a rejected step also re-sends the unchanged observation.

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "environment.hpp"
#include "instances.hpp"
#include "json.hpp"

namespace strippack::protocol {

inline constexpr int kVersion = 1;
inline constexpr const char* kName = "strippack-env";

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string handshake_line(const BinConfig& bin) {
  return std::string("{\"protocol\":\"") + kName + "\",\"version\":" + std::to_string(kVersion) +
         ",\"w\":" + std::to_string(bin.width) + ",\"h\":" + std::to_string(bin.height) + "}";
}

inline std::string error_line(const std::string& message) { return "{\"error\":" + quote(message) + "}"; }

struct ObservationFields {
  double reward = 0.0;
  bool done = false;
  std::int64_t lost = 0;
  std::optional<double> density;
  std::optional<std::string> error;
};

inline std::string observation_line(const PackingEnv& env, const ObservationFields& f) {
  const StateTensor s = env.encode_state();
  const auto mask = env.action_mask();
  std::string out;
  out.reserve(s.size() * 12 + mask.size() * 2 + 96);
  out += "{\"state\":[";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (i) out += ',';
    out += format_real(s.values[i]);
  }
  out += "],\"mask\":[";
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (i) out += ',';
    out += mask[i] ? '1' : '0';
  }
  out += "],\"reward\":" + format_real(f.reward);
  out += ",\"done\":";
  out += f.done ? "true" : "false";
  out += ",\"info\":{\"lost\":" + std::to_string(f.lost) + ",\"y_max\":" + std::to_string(env.height_map().max());
  if (f.density) out += ",\"density\":" + format_real(*f.density);
  out += '}';
  if (f.error) out += ",\"error\":" + quote(*f.error);
  out += '}';
  return out;
}

// Parsed form of an observation response, for clients written against this
// header (the external-policy bridge and the conformance tests).
struct Observation {
  std::vector<double> state;
  std::vector<std::uint8_t> mask;
  double reward = 0.0;
  bool done = false;
  std::int64_t lost = 0;
  int y_max = 0;
  std::optional<double> density;
  std::optional<std::string> error;
};

inline Observation parse_observation(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  Observation o;
  if (j.contains("error")) o.error = j.at("error").get<std::string>();
  if (!j.contains("state")) return o;
  o.state = j.at("state").get<std::vector<double>>();
  for (int b : j.at("mask").get<std::vector<int>>()) o.mask.push_back(static_cast<std::uint8_t>(b));
  o.reward = j.at("reward").get<double>();
  o.done = j.at("done").get<bool>();
  o.lost = j.at("info").at("lost").get<std::int64_t>();
  o.y_max = j.at("info").at("y_max").get<int>();
  if (j.at("info").contains("density")) o.density = j.at("info").at("density").get<double>();
  return o;
}

struct ServeConfig {
  BinConfig bin;
  PenaltyScale penalty_scale = PenaltyScale::Normalized;
  InstanceSpec defaults;  // scenario bounds and item count used when a reset omits them
};

// Handles one request line; returns the response line and sets `closed` on "close".
class Session {
 public:
  explicit Session(ServeConfig cfg) : cfg_(std::move(cfg)) {}

  std::string handle(const std::string& line, bool& closed) {
    closed = false;
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      return error_line("malformed request: not valid JSON");
    }
    if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
      return error_line("malformed request: missing string field 'cmd'");
    }
    const std::string cmd = req["cmd"].get<std::string>();
    try {
      if (cmd == "reset") return reset(req);
      if (cmd == "step") return step(req);
      if (cmd == "close") {
        closed = true;
        return "{\"closed\":true}";
      }
    } catch (const nlohmann::json::exception& e) {
      return error_line(std::string("malformed request: ") + e.what());
    }
    return error_line("unknown cmd '" + cmd + "'");
  }

 private:
  std::string reset(const nlohmann::json& req) {
    InstanceSpec spec = cfg_.defaults;
    spec.seed = req.value("seed", std::uint64_t{0});
    if (req.contains("scenario")) {
      const auto s = parse_scenario(req["scenario"].get<std::string>());
      if (!s) return error_line("reset: scenario must be 'fixed' or 'random'");
      spec.scenario = *s;
    }
    RewardMode mode = RewardMode::V1;
    if (req.contains("reward_mode")) {
      const auto m = parse_reward_mode(req["reward_mode"].get<std::string>());
      if (!m) return error_line("reset: reward_mode must be 'v1' or 'v2'");
      mode = *m;
    }
    if (req.contains("n_items")) spec.n_items = req["n_items"].get<int>();
    std::vector<Item> items;
    try {
      items = generate(spec, cfg_.bin);
    } catch (const std::exception& e) {
      return error_line(std::string("reset: ") + e.what());
    }
    env_.emplace(EnvConfig{cfg_.bin, mode, cfg_.penalty_scale});
    env_->reset(std::move(items));
    ObservationFields f;
    f.done = env_->done();
    if (f.done) f.density = env_->terminal_density();
    return observation_line(*env_, f);
  }

  std::string step(const nlohmann::json& req) {
    if (!env_) return error_line("step: no episode; send reset first");
    if (!req.contains("action") || !req["action"].is_number_integer()) {
      return rejected("step: missing integer field 'action'");
    }
    if (env_->done()) return rejected("step: episode is finished; send reset");
    const int a = req["action"].get<int>();
    const auto mask = env_->action_mask();
    if (a < 0 || static_cast<std::size_t>(a) >= mask.size() || !mask[static_cast<std::size_t>(a)]) {
      return rejected("step: action " + std::to_string(a) + " is infeasible");
    }
    const StepOutcome o = env_->step(Action{a});
    ObservationFields f;
    f.reward = o.reward;
    f.done = o.done;
    f.lost = o.info.lost_area;
    f.density = o.info.density;
    return observation_line(*env_, f);
  }

  std::string rejected(const std::string& why) {
    ObservationFields f;
    f.done = env_->done();
    f.error = why;
    return observation_line(*env_, f);
  }

  ServeConfig cfg_;
  std::optional<PackingEnv> env_;
};

// Runs until "close" or end of input. Returns the number of requests handled.
inline std::size_t serve(std::istream& in, std::ostream& out, const ServeConfig& cfg) {
  Session session(cfg);
  out << handshake_line(cfg.bin) << '\n' << std::flush;
  std::size_t handled = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    bool closed = false;
    out << session.handle(line, closed) << '\n' << std::flush;
    ++handled;
    if (closed) break;
  }
  return handled;
}

}  // namespace strippack::protocol
