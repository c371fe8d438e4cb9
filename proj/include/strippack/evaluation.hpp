#pragma once

// Paired-seed batch experiments: every policy plays episode e on the instance
// generated with seed_base + e. Results are independent of the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "environment.hpp"
#include "episode_log.hpp"
#include "external_policy.hpp"
#include "instances.hpp"
#include "json.hpp"
#include "policies.hpp"

namespace strippack {

struct Histogram {
  std::vector<double> edges;  // bin_count + 1 uniform edges over [0, 1]
  std::vector<std::size_t> counts;

  std::size_t total() const noexcept {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
};

// Uniform bins over [0, 1]; bin i covers [i/n, (i+1)/n), the last bin is closed.
inline Histogram histogram(std::span<const double> values, int bin_count) {
  if (bin_count < 1) throw ContractViolation("histogram: bin_count must be positive");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bin_count) + 1);
  for (int i = 0; i <= bin_count; ++i) h.edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / bin_count;
  h.counts.assign(static_cast<std::size_t>(bin_count), 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractViolation("histogram: value outside [0, 1]");
    const int bin = std::min(static_cast<int>(v * bin_count), bin_count - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  return h;
}

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, n - 1 denominator; 0 for fewer than two samples
  double min = 0.0;
  double max = 0.0;
};

inline SampleStats sample_stats(std::span<const double> v) {
  SampleStats s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(v.size() - 1);
  }
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

struct ExperimentConfig {
  std::vector<std::string> policies{"maxrects", "greedy", "random"};
  InstanceSpec scenario;
  std::size_t episodes = 500;
  EnvConfig env;
  std::uint64_t seed_base = 0;
  unsigned jobs = 1;  // does not affect results
  int histogram_bins = 20;
  std::string external_command;  // used by the "external" policy
};

struct PolicySummary {
  std::string policy;
  std::vector<double> densities;  // completed episodes, in episode order
  SampleStats stats;
  Histogram histogram;
  std::vector<std::size_t> failed_episodes;
};

struct ComparisonReport {
  ExperimentConfig config;
  std::vector<PolicySummary> summaries;
  std::vector<EpisodeLog> logs;  // policy-major, then episode index
  bool complete = true;

  const PolicySummary* summary(const std::string& policy) const {
    for (const auto& s : summaries) {
      if (s.policy == policy) return &s;
    }
    return nullptr;
  }
};

inline void validate(const ExperimentConfig& cfg) {
  cfg.env.bin.validate();
  cfg.scenario.validate(cfg.env.bin);
  if (cfg.policies.empty()) throw ContractViolation("experiment: no policies given");
  if (cfg.histogram_bins < 1) throw ContractViolation("experiment: histogram bins must be positive");
  for (const auto& p : cfg.policies) {
    if (!is_builtin_policy(p) && p != "external") throw ContractViolation("experiment: unknown policy '" + p + "'");
    if (p == "external" && cfg.external_command.empty()) {
      throw ContractViolation("experiment: policy 'external' needs an external command");
    }
  }
}

inline EpisodeLog run_policy_episode(const std::string& policy, EnvPolicy* env_policy, const std::vector<Item>& items,
                                     const EnvConfig& env, const EpisodeContext& ctx) {
  if (policy == "maxrects") return run_maxrects_episode(items, env, ctx);
  return run_env_episode(*env_policy, items, env, ctx);
}

inline ComparisonReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t n_policies = cfg.policies.size();
  const std::size_t n_tasks = n_policies * cfg.episodes;
  std::vector<EpisodeLog> logs(n_tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    // Each worker owns its policy instances (and, for "external", its own child process).
    std::map<std::string, std::unique_ptr<EnvPolicy>> owned;
    for (const auto& p : cfg.policies) {
      if (p == "external") owned[p] = std::make_unique<ExternalPolicy>(cfg.external_command);
      else if (p != "maxrects") owned[p] = make_env_policy(p);
    }
    for (std::size_t t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) {
      const std::string& policy = cfg.policies[t / cfg.episodes];
      const std::size_t episode = t % cfg.episodes;
      InstanceSpec spec = cfg.scenario;
      spec.seed = cfg.seed_base + episode;
      const EpisodeContext ctx{episode, spec.seed, spec.scenario};
      auto it = owned.find(policy);
      logs[t] = run_policy_episode(policy, it == owned.end() ? nullptr : it->second.get(), generate(spec, cfg.env.bin),
                                   cfg.env, ctx);
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(std::max<std::size_t>(n_tasks, 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }

  ComparisonReport report;
  report.config = cfg;
  for (std::size_t p = 0; p < n_policies; ++p) {
    PolicySummary s;
    s.policy = cfg.policies[p];
    for (std::size_t e = 0; e < cfg.episodes; ++e) {
      const EpisodeLog& log = logs[p * cfg.episodes + e];
      if (log.termination == Termination::Aborted) s.failed_episodes.push_back(e);
      else s.densities.push_back(log.density);
    }
    s.stats = sample_stats(s.densities);
    s.histogram = histogram(s.densities, cfg.histogram_bins);
    if (!s.failed_episodes.empty()) report.complete = false;
    report.summaries.push_back(std::move(s));
  }
  report.logs = std::move(logs);
  return report;
}

// Report text. The worker count is deliberately absent so reports compare
// byte-for-byte across --jobs values. `logs_ref` names where episode logs
// were written, if anywhere.
inline std::string report_to_json(const ComparisonReport& r, const std::string& logs_ref = {}) {
  using nlohmann::ordered_json;
  const ExperimentConfig& c = r.config;
  ordered_json j;
  j["report_version"] = 1;
  ordered_json cfg;
  cfg["bin"] = {{"width", c.env.bin.width}, {"height", c.env.bin.height}};
  cfg["scenario"] = to_string(c.scenario.scenario);
  cfg["n_items"] = c.scenario.n_items;
  if (c.scenario.scenario == Scenario::RandomSet) cfg["side_bounds"] = {c.scenario.min_side, c.scenario.max_side};
  cfg["episodes"] = c.episodes;
  cfg["seed_base"] = c.seed_base;
  cfg["reward_mode"] = to_string(c.env.mode);
  cfg["penalty_scale"] = to_string(c.env.penalty_scale);
  cfg["histogram_bins"] = c.histogram_bins;
  cfg["policies"] = c.policies;
  if (!c.external_command.empty()) cfg["external_command"] = c.external_command;
  j["config"] = std::move(cfg);
  j["complete"] = r.complete;
  if (!logs_ref.empty()) j["episode_logs"] = logs_ref;

  if (!r.summaries.empty()) j["histogram_edges"] = r.summaries.front().histogram.edges;
  auto pols = ordered_json::array();
  for (const auto& s : r.summaries) {
    ordered_json p;
    p["policy"] = s.policy;
    p["episodes_completed"] = s.stats.count;
    p["mean"] = s.stats.mean;
    p["variance"] = s.stats.variance;
    p["min"] = s.stats.min;
    p["max"] = s.stats.max;
    p["histogram"] = s.histogram.counts;
    p["failed_episodes"] = s.failed_episodes;
    p["densities"] = s.densities;
    pols.push_back(std::move(p));
  }
  j["policies"] = std::move(pols);
  return j.dump(2) + "\n";
}

}  // namespace strippack
