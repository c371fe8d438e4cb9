#include <gtest/gtest.h>

#include <filesystem>
#include <unistd.h>

#include "strippack/episode_log.hpp"
#include "strippack/policies.hpp"

namespace strippack {
namespace {

EpisodeLog tiny_episode() {
  GreedySkylinePolicy greedy;
  return run_env_episode(greedy, {{0, 2, 3}, {1, 2, 2}, {2, 3, 1}}, EnvConfig{{5, 5}, RewardMode::V2},
                         EpisodeContext{3, 77, Scenario::FixedSet});
}

TEST(EpisodeLog, GoldenLine) {
  // Greedy: 2x3 at x=0, 2x2 at x=2, 3x1 rotated (1x3) at x=4 -> skyline [3,3,2,2,3].
  const std::string expected =
      R"({"episode":3,"policy":"greedy","seed":77,"scenario":"fixed","bin":{"width":5,"height":5},)"
      R"("reward_mode":"v2","penalty_scale":"normalized",)"
      R"("items":[{"id":0,"width":2,"height":3},{"id":1,"width":2,"height":2},{"id":2,"width":3,"height":1}],)"
      R"("actions":[0,2,9],)"
      R"("placements":[{"item":0,"x":0,"y":0,"rotation":"deg0","width":2,"height":3},)"
      R"({"item":1,"x":2,"y":0,"rotation":"deg0","width":2,"height":2},)"
      R"({"item":2,"x":4,"y":0,"rotation":"deg90","width":1,"height":3}],)"
      R"("rewards":[0.0,0.0,0.8666666666666667],"lost_areas":[0,0,0],"density":0.8666666666666667,)"
      R"("termination":"items_exhausted"})";
  EXPECT_EQ(to_json_line(tiny_episode()), expected);
}

TEST(EpisodeLog, RoundTripAndReplayAreExact) {
  InstanceSpec spec;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    spec.seed = seed;
    const auto items = generate(spec, BinConfig{});
    for (RewardMode mode : {RewardMode::V1, RewardMode::V2}) {
      RandomMaskedPolicy policy;
      const EpisodeLog log = run_env_episode(policy, items, EnvConfig{{}, mode}, {seed, seed, spec.scenario});
      const EpisodeLog parsed = episode_from_json_line(to_json_line(log));
      ASSERT_EQ(parsed, log);
      ASSERT_EQ(replay(parsed), log);
    }
  }
}

TEST(EpisodeLog, ReplayReproducesObservations) {
  const EpisodeLog log = tiny_episode();
  PackingEnv a(EnvConfig{log.bin, log.reward_mode});
  PackingEnv b(EnvConfig{log.bin, log.reward_mode});
  EXPECT_EQ(a.reset(log.items), b.reset(log.items));
  for (int action : log.actions) {
    const StepOutcome oa = a.step(Action{action});
    const StepOutcome ob = b.step(Action{action});
    EXPECT_EQ(oa.state, ob.state);
    EXPECT_EQ(oa.reward, ob.reward);
  }
}

TEST(EpisodeLog, FileRoundTripWithAbortedEpisode) {
  EpisodeLog aborted = tiny_episode();
  aborted.termination = Termination::Aborted;
  aborted.error = "external policy: timed out";
  const std::vector<EpisodeLog> logs{tiny_episode(), aborted};
  const auto path = std::filesystem::temp_directory_path() / ("strippack_logs_" + std::to_string(::getpid()) + ".jsonl");
  store_episodes(path, logs);
  EXPECT_EQ(load_episodes(path), logs);
  std::filesystem::remove(path);
}

TEST(EpisodeLog, MalformedLinesReportTheField) {
  std::string line = to_json_line(tiny_episode());
  line.replace(line.find("\"deg90\""), 7, "\"deg45\"");
  try {
    episode_from_json_line(line, 4);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.field(), "placements[2].rotation");
  }
  EXPECT_THROW(episode_from_json_line("[]"), ParseError);
}

}  // namespace
}  // namespace strippack
