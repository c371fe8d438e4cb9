// strippack: generate instances, run policies, compare them, render episodes
// and serve the environment protocol on stdio.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strippack/strippack.hpp"

namespace fs = std::filesystem;
using namespace strippack;

namespace {

constexpr int kUsageError = 2;
constexpr int kEpisodeErrors = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BinFlags {
  int width = 125;
  int height = 150;

  void add(CLI::App* app) {
    app->add_option("--width", width, "Bin width in columns")->capture_default_str();
    app->add_option("--height", height, "Bin height in rows")->capture_default_str();
  }
  BinConfig config() const {
    BinConfig b{width, height};
    if (width < 1 || height < 1) throw UsageError("bin dimensions must be positive");
    return b;
  }
};

struct SpecFlags {
  std::string scenario = "random";
  int n_items = 15;
  int min_side = 12;
  int max_side = 60;

  void add(CLI::App* app) {
    app->add_option("--scenario", scenario, "Element set: fixed | random")
        ->check(CLI::IsMember({"fixed", "random"}))
        ->capture_default_str();
    app->add_option("--n", n_items, "Items per instance")->capture_default_str();
    app->add_option("--min-side", min_side, "Random set: smallest side")->capture_default_str();
    app->add_option("--max-side", max_side, "Random set: largest side")->capture_default_str();
  }
  InstanceSpec spec(const BinConfig& bin) const {
    InstanceSpec s;
    s.scenario = *parse_scenario(scenario);
    s.n_items = n_items;
    s.min_side = min_side;
    s.max_side = max_side;
    try {
      s.validate(bin);
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

struct RewardFlags {
  std::string reward = "v1";
  std::string penalty = "normalized";

  void add(CLI::App* app) {
    app->add_option("--reward", reward, "Reward function: v1 | v2")
        ->check(CLI::IsMember({"v1", "v2", "V1", "V2"}))
        ->capture_default_str();
    app->add_option("--penalty", penalty, "V2 lost-area scale: normalized | raw")
        ->check(CLI::IsMember({"normalized", "raw"}))
        ->capture_default_str();
  }
  EnvConfig config(const BinConfig& bin) const {
    return EnvConfig{bin, *parse_reward_mode(reward),
                     penalty == "raw" ? PenaltyScale::RawCells : PenaltyScale::Normalized};
  }
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

void check_policy(const std::string& name, const std::string& external_cmd) {
  if (name == "external") {
    if (external_cmd.empty()) throw UsageError("policy 'external' requires --external-cmd");
    return;
  }
  if (!is_builtin_policy(name)) throw UsageError("unknown policy '" + name + "' (maxrects | greedy | random | external)");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced 1D strip-packing environment, heuristics and experiment runner"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance file");
  BinFlags gen_bin;
  SpecFlags gen_spec;
  std::uint64_t gen_seed = 0;
  std::size_t gen_count = 1;
  std::string gen_out;
  gen_bin.add(gen);
  gen_spec.add(gen);
  gen->add_option("--seed", gen_seed, "Seed of the first instance")->capture_default_str();
  gen->add_option("--count", gen_count, "Number of instances (seeds seed, seed+1, ...)")->capture_default_str();
  gen->add_option("--out", gen_out, "Output instance file")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one policy over an instance file");
  std::string run_policy = "maxrects";
  std::string run_instances;
  std::string run_logs;
  std::string run_external;
  RewardFlags run_reward;
  run->add_option("--policy", run_policy, "maxrects | greedy | random | external")->capture_default_str();
  run->add_option("--instances", run_instances, "Instance file")->required();
  run->add_option("--logs", run_logs, "Directory for episode logs")->envname("STRIPPACK_LOG_DIR");
  run->add_option("--external-cmd", run_external, "Command for the external policy");
  run_reward.add(run);

  // compare
  auto* compare = app.add_subcommand("compare", "Paired-seed comparison of several policies");
  BinFlags cmp_bin;
  SpecFlags cmp_spec;
  RewardFlags cmp_reward;
  std::string cmp_policies = "maxrects,greedy,random";
  std::size_t cmp_episodes = 500;
  std::uint64_t cmp_seed_base = 0;
  std::string cmp_report;
  std::string cmp_logs;
  std::string cmp_render;
  std::string cmp_name = "compare";
  std::string cmp_external;
  unsigned cmp_jobs = 1;
  int cmp_bins = 20;
  cmp_bin.add(compare);
  cmp_spec.add(compare);
  cmp_reward.add(compare);
  compare->add_option("--policies", cmp_policies, "Comma-separated policy names")->capture_default_str();
  compare->add_option("--episodes", cmp_episodes, "Episodes per policy")->capture_default_str();
  compare->add_option("--seed-base", cmp_seed_base, "Episode e uses seed seed-base + e")->capture_default_str();
  compare->add_option("--report", cmp_report, "Report output file")->required();
  compare->add_option("--logs", cmp_logs, "Directory for episode logs")->envname("STRIPPACK_LOG_DIR");
  compare->add_option("--render-dir", cmp_render, "Write <dir>/<name>/<policy>/<episode>.svg for every episode");
  compare->add_option("--name", cmp_name, "Experiment name used in render paths")->capture_default_str();
  compare->add_option("--external-cmd", cmp_external, "Command for the external policy");
  compare->add_option("--jobs", cmp_jobs, "Worker threads (does not change results)")->capture_default_str();
  compare->add_option("--bins", cmp_bins, "Histogram bins over [0, 1]")->capture_default_str();

  // render
  auto* render = app.add_subcommand("render", "Render an episode log as SVG");
  std::string rnd_log;
  std::string rnd_out;
  std::size_t rnd_episode = 0;
  std::optional<std::size_t> rnd_after;
  RenderOptions rnd_opts;
  render->add_option("--log", rnd_log, "Episode log file (JSON lines)")->required();
  render->add_option("--out", rnd_out, "Output SVG")->required();
  render->add_option("--index", rnd_episode, "Line index of the episode within the log")->capture_default_str();
  render->add_option("--after", rnd_after, "Show the state after this many placements");
  render->add_option("--cell", rnd_opts.cell, "Pixels per cell")->capture_default_str();
  render->add_flag("--heights", rnd_opts.height_map, "Draw the skyline");
  render->add_flag("--feasibility", rnd_opts.feasibility, "Draw feasibility strips for the next item");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the environment protocol on stdin/stdout");
  BinFlags srv_bin;
  SpecFlags srv_spec;
  std::string srv_penalty = "normalized";
  srv_bin.add(serve);
  srv_spec.add(serve);
  serve->add_option("--penalty", srv_penalty, "V2 lost-area scale: normalized | raw")
      ->check(CLI::IsMember({"normalized", "raw"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help goes to stdout, real parse errors to stderr with the usage status.
    const int rc = app.exit(e, std::cout, std::cerr);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen) {
      const BinConfig bin = gen_bin.config();
      const InstanceSpec spec = gen_spec.spec(bin);
      if (gen_count < 1) throw UsageError("--count must be positive");
      store_instances(gen_out, generate_batch(spec, bin, gen_count, gen_seed));
      std::cerr << "wrote " << gen_count << " instance(s) to " << gen_out << "\n";
      return 0;
    }

    if (*run) {
      check_policy(run_policy, run_external);
      if (run_logs.empty()) throw UsageError("no log directory: pass --logs or set STRIPPACK_LOG_DIR");
      const auto records = load_instances(run_instances);
      if (records.empty()) throw UsageError("instance file '" + run_instances + "' contains no instances");
      std::unique_ptr<EnvPolicy> policy;
      if (run_policy == "external") policy = std::make_unique<ExternalPolicy>(run_external);
      else if (run_policy != "maxrects") policy = make_env_policy(run_policy);
      std::vector<EpisodeLog> logs;
      std::size_t errors = 0;
      for (const auto& r : records) {
        const EnvConfig env = run_reward.config(r.bin);
        const EpisodeContext ctx{r.index, r.seed, r.scenario};
        logs.push_back(run_policy_episode(run_policy, policy.get(), r.items, env, ctx));
        if (logs.back().termination == Termination::Aborted) {
          ++errors;
          std::cerr << "episode " << r.index << ": " << logs.back().error.value_or("aborted") << "\n";
        }
      }
      fs::create_directories(run_logs);
      const fs::path out = fs::path(run_logs) / (run_policy + ".jsonl");
      store_episodes(out, logs);
      std::cerr << "wrote " << logs.size() << " episode log(s) to " << out.string() << "\n";
      return errors == 0 ? 0 : kEpisodeErrors;
    }

    if (*compare) {
      ExperimentConfig cfg;
      cfg.env = cmp_reward.config(cmp_bin.config());
      cfg.scenario = cmp_spec.spec(cfg.env.bin);
      cfg.policies = split_csv(cmp_policies);
      if (cfg.policies.empty()) throw UsageError("--policies is empty");
      for (const auto& p : cfg.policies) check_policy(p, cmp_external);
      if (cmp_episodes < 1) throw UsageError("--episodes must be positive");
      if (cmp_bins < 1) throw UsageError("--bins must be positive");
      cfg.episodes = cmp_episodes;
      cfg.seed_base = cmp_seed_base;
      cfg.jobs = std::max(1u, cmp_jobs);
      cfg.histogram_bins = cmp_bins;
      cfg.external_command = cmp_external;

      const ComparisonReport report = run_experiment(cfg);
      std::string logs_ref;
      if (!cmp_logs.empty()) {
        fs::create_directories(cmp_logs);
        for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
          const auto first = report.logs.begin() + static_cast<std::ptrdiff_t>(p * cfg.episodes);
          store_episodes(fs::path(cmp_logs) / (cfg.policies[p] + ".jsonl"),
                         std::vector<EpisodeLog>(first, first + static_cast<std::ptrdiff_t>(cfg.episodes)));
        }
        logs_ref = "<logs>/<policy>.jsonl";
      }
      if (!cmp_render.empty()) {
        for (const auto& log : report.logs) render_episode(log, render_path(cmp_render, cmp_name, log));
      }
      write_text(cmp_report, report_to_json(report, logs_ref));
      for (const auto& s : report.summaries) {
        std::cout << s.policy << ": mean " << s.stats.mean << ", variance " << s.stats.variance << ", n "
                  << s.stats.count << "\n";
      }
      if (!report.complete) {
        for (const auto& s : report.summaries) {
          if (!s.failed_episodes.empty()) {
            std::cerr << s.policy << ": " << s.failed_episodes.size() << " episode(s) failed\n";
          }
        }
        return kEpisodeErrors;
      }
      return 0;
    }

    if (*render) {
      const auto logs = load_episodes(rnd_log);
      if (rnd_episode >= logs.size()) {
        throw UsageError("--index " + std::to_string(rnd_episode) + " out of range (log has " +
                         std::to_string(logs.size()) + " episode(s))");
      }
      if (rnd_opts.cell < 1) throw UsageError("--cell must be positive");
      rnd_opts.after = rnd_after;
      render_episode(logs[rnd_episode], rnd_out, rnd_opts);
      return 0;
    }

    if (*serve) {
      protocol::ServeConfig cfg;
      cfg.bin = srv_bin.config();
      cfg.defaults = srv_spec.spec(cfg.bin);
      cfg.penalty_scale = srv_penalty == "raw" ? PenaltyScale::RawCells : PenaltyScale::Normalized;
      std::ios::sync_with_stdio(false);
      protocol::serve(std::cin, std::cout, cfg);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEpisodeErrors;
  }
  return 0;
}
