#pragma once

// Seeded problem instances: the fixed element set and the random element set,
// both delivered in the descending-area order the episodes consume, plus the
// JSON-lines instance file format.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace strippack {

enum class Scenario : std::uint8_t { FixedSet, RandomSet };

inline const char* to_string(Scenario s) noexcept { return s == Scenario::FixedSet ? "fixed" : "random"; }

inline std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "fixed") return Scenario::FixedSet;
  if (s == "random") return Scenario::RandomSet;
  return std::nullopt;
}

// Canonical fixed element set: 15 items from 60x36 down to 16x12, total area
// 15768 cells (about 84% of a 125x150 bin).
inline std::vector<Item> default_fixed_items() {
  return {
      {0, 60, 36}, {1, 48, 40}, {2, 50, 32}, {3, 40, 40}, {4, 45, 30},
      {5, 36, 36}, {6, 40, 28}, {7, 30, 32}, {8, 35, 24}, {9, 28, 28},
      {10, 30, 20}, {11, 24, 24}, {12, 25, 18}, {13, 20, 16}, {14, 16, 12},
  };
}

struct InstanceSpec {
  Scenario scenario = Scenario::RandomSet;
  int n_items = 15;
  std::uint64_t seed = 0;
  // RandomSet: both sides drawn independently and uniformly from [min_side, max_side].
  int min_side = 12;
  int max_side = 60;
  // FixedSet: explicit items; empty means default_fixed_items().
  std::vector<Item> items;

  void validate(const BinConfig& cfg) const {
    if (n_items < 1) throw ContractViolation("instance spec: n_items must be positive");
    if (scenario == Scenario::RandomSet) {
      if (min_side < 1 || max_side < min_side) {
        throw ContractViolation("instance spec: invalid side bounds [" + std::to_string(min_side) + ", " +
                                std::to_string(max_side) + "]");
      }
      if (max_side > std::min(cfg.width, cfg.height)) {
        throw ContractViolation("instance spec: max side " + std::to_string(max_side) +
                                " exceeds bin dimensions " + std::to_string(cfg.width) + "x" +
                                std::to_string(cfg.height));
      }
    }
  }
};

// Non-increasing area; equal areas by wider first, then lower id.
inline bool placement_order(const Item& a, const Item& b) noexcept {
  if (a.area() != b.area()) return a.area() > b.area();
  if (a.width != b.width) return a.width > b.width;
  return a.id < b.id;
}

inline void sort_for_placement(std::vector<Item>& items) {
  std::stable_sort(items.begin(), items.end(), placement_order);
}

inline bool is_area_sorted(const std::vector<Item>& items) noexcept {
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].area() > items[i - 1].area()) return false;
  }
  return true;
}

inline std::vector<Item> generate(const InstanceSpec& spec, const BinConfig& cfg) {
  cfg.validate();
  spec.validate(cfg);

  std::vector<Item> items;
  if (spec.scenario == Scenario::FixedSet) {
    items = spec.items.empty() ? default_fixed_items() : spec.items;
    for (const Item& it : items) {
      it.validate();
      if (!fits_empty_bin(it, cfg)) {
        throw ContractViolation("fixed item " + std::to_string(it.id) + " does not fit the bin in any rotation");
      }
    }
    sort_for_placement(items);
    if (static_cast<std::size_t>(spec.n_items) > items.size()) {
      throw ContractViolation("instance spec: fixed set has only " + std::to_string(items.size()) + " items");
    }
    items.resize(static_cast<std::size_t>(spec.n_items));
    return items;
  }

  SplitMix64 rng(mix_seed(spec.seed, 0x1457));
  items.reserve(static_cast<std::size_t>(spec.n_items));
  for (int i = 0; i < spec.n_items; ++i) {
    const int w = static_cast<int>(rng.uniform(spec.min_side, spec.max_side));
    const int h = static_cast<int>(rng.uniform(spec.min_side, spec.max_side));
    items.push_back({i, w, h});
  }
  sort_for_placement(items);
  return items;
}

// One materialized instance, as stored in an instance file.
struct InstanceRecord {
  static constexpr int kSchemaVersion = 1;

  std::size_t index = 0;
  Scenario scenario = Scenario::RandomSet;
  std::uint64_t seed = 0;
  BinConfig bin;
  std::vector<Item> items;

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

// Builds `count` records with seeds seed_base, seed_base+1, ...
inline std::vector<InstanceRecord> generate_batch(InstanceSpec spec, const BinConfig& cfg, std::size_t count,
                                                  std::uint64_t seed_base) {
  std::vector<InstanceRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    spec.seed = seed_base + i;
    out.push_back({i, spec.scenario, spec.seed, cfg, generate(spec, cfg)});
  }
  return out;
}

namespace detail {

inline nlohmann::ordered_json items_to_json(const std::vector<Item>& items) {
  auto arr = nlohmann::ordered_json::array();
  for (const Item& it : items) arr.push_back({{"id", it.id}, {"width", it.width}, {"height", it.height}});
  return arr;
}

// Fetches a required field, converting type errors into ParseError.
template <typename T, typename Json>
T require(const Json& obj, const std::string& key, std::size_t line, const std::string& path = {}) {
  const std::string field = path.empty() ? key : path + "." + key;
  if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field", line, field);
  try {
    return obj.at(key).template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("wrong type", line, field);
  }
}

inline std::vector<Item> items_from_json(const nlohmann::json& arr, std::size_t line, const std::string& path) {
  if (!arr.is_array()) throw ParseError("expected an array", line, path);
  std::vector<Item> items;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    Item it{require<int>(arr[i], "id", line, p), require<int>(arr[i], "width", line, p),
            require<int>(arr[i], "height", line, p)};
    if (it.id < 0) throw ParseError("must be non-negative", line, p + ".id");
    if (it.width < 1) throw ParseError("must be positive", line, p + ".width");
    if (it.height < 1) throw ParseError("must be positive", line, p + ".height");
    items.push_back(it);
  }
  return items;
}

}  // namespace detail

inline std::string to_json_line(const InstanceRecord& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = InstanceRecord::kSchemaVersion;
  j["instance"] = r.index;
  j["scenario"] = to_string(r.scenario);
  j["seed"] = r.seed;
  j["bin"] = {{"width", r.bin.width}, {"height", r.bin.height}};
  j["items"] = detail::items_to_json(r.items);
  return j.dump();
}

inline InstanceRecord instance_from_json_line(const std::string& text, std::size_t line = 0) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line);
  }
  using detail::require;
  const int version = require<int>(j, "schema_version", line);
  if (version != InstanceRecord::kSchemaVersion) {
    throw ParseError("unsupported schema version " + std::to_string(version), line, "schema_version");
  }
  InstanceRecord r;
  r.index = require<std::size_t>(j, "instance", line);
  const auto scen = parse_scenario(require<std::string>(j, "scenario", line));
  if (!scen) throw ParseError("expected 'fixed' or 'random'", line, "scenario");
  r.scenario = *scen;
  r.seed = require<std::uint64_t>(j, "seed", line);
  if (!j.contains("bin")) throw ParseError("missing field", line, "bin");
  r.bin.width = require<int>(j["bin"], "width", line, "bin");
  r.bin.height = require<int>(j["bin"], "height", line, "bin");
  if (r.bin.width < 1) throw ParseError("must be positive", line, "bin.width");
  if (r.bin.height < 1) throw ParseError("must be positive", line, "bin.height");
  if (!j.contains("items")) throw ParseError("missing field", line, "items");
  r.items = detail::items_from_json(j["items"], line, "items");
  if (r.items.empty()) throw ParseError("instance has no items", line, "items");
  if (!is_area_sorted(r.items)) throw ParseError("items not in non-increasing area order", line, "items");
  return r;
}

inline void store_instances(const std::string& path, const std::vector<InstanceRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Blank lines are skipped; every other line must be a valid record.
inline std::vector<InstanceRecord> load_instances(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<InstanceRecord> out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(instance_from_json_line(text, line));
  }
  return out;
}

}  // namespace strippack
