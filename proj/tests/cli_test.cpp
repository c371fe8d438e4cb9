#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "strippack/episode_log.hpp"
#include "strippack/instances.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("strippack_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI with `args` through the shell and returns its exit status.
  int cli(const std::string& args, const std::string& prefix = {}) const {
    const std::string cmd = prefix + " '" + std::string(STRIPPACK_CLI) + "' " + args + " >'" + (dir_ / "stdout").string() +
                            "' 2>'" + (dir_ / "stderr").string() + "'";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, GenRunRender) {
  ASSERT_EQ(cli("gen --scenario random --seed 1000 --n 15 --count 5 --out " + path("inst.jsonl")), 0);
  const auto records = strippack::load_instances(path("inst.jsonl"));
  ASSERT_EQ(records.size(), 5u);
  EXPECT_EQ(records[4].seed, 1004u);

  ASSERT_EQ(cli("run --policy greedy --instances " + path("inst.jsonl") + " --reward v2 --logs " + path("logs")), 0);
  const auto logs = strippack::load_episodes(path("logs/greedy.jsonl"));
  ASSERT_EQ(logs.size(), 5u);
  EXPECT_EQ(logs[0].reward_mode, strippack::RewardMode::V2);

  ASSERT_EQ(cli("render --log " + path("logs/greedy.jsonl") + " --index 2 --heights --feasibility --after 3 --out " +
                path("ep.svg")),
            0);
  EXPECT_EQ(slurp(path("ep.svg")).rfind("<svg", 0), 0u);
  EXPECT_EQ(cli("render --log " + path("logs/greedy.jsonl") + " --index 9 --out " + path("x.svg")), 2);
}

TEST_F(Cli, RunUsesLogDirFromEnvironment) {
  ASSERT_EQ(cli("gen --scenario fixed --out " + path("fixed.jsonl")), 0);
  ASSERT_EQ(cli("run --policy maxrects --instances " + path("fixed.jsonl"), "STRIPPACK_LOG_DIR='" + path("envlogs") + "'"), 0);
  EXPECT_TRUE(fs::exists(path("envlogs/maxrects.jsonl")));
  EXPECT_EQ(cli("run --policy maxrects --instances " + path("fixed.jsonl"), "env -u STRIPPACK_LOG_DIR"), 2);
}

TEST_F(Cli, UsageErrors) {
  { std::ofstream(path("empty.jsonl")); }
  EXPECT_EQ(cli("run --policy greedy --instances " + path("empty.jsonl") + " --logs " + path("l")), 2);
  EXPECT_NE(slurp(path("stderr")).find("no instances"), std::string::npos);
  EXPECT_EQ(cli("compare --policies maxrects,bogus --report " + path("r.json")), 2);
  EXPECT_EQ(cli("compare --policies external --report " + path("r.json")), 2);
  EXPECT_EQ(cli("compare --episodes 0 --report " + path("r.json")), 2);
  EXPECT_EQ(cli("compare --scenario random --max-side 200 --report " + path("r.json")), 2);
  EXPECT_EQ(cli("gen --out"), 2);
  EXPECT_EQ(cli(""), 2);
  EXPECT_FALSE(fs::exists(path("r.json")));
  EXPECT_TRUE(slurp(path("stdout")).empty());
}

TEST_F(Cli, CompareDefaultsAndDeterminism) {
  ASSERT_EQ(cli("compare --scenario random --seed-base 7 --report " + path("a.json")), 0);
  ASSERT_EQ(cli("compare --scenario random --seed-base 7 --jobs 8 --report " + path("b.json")), 0);
  ASSERT_EQ(cli("compare --scenario random --seed-base 7 --report " + path("c.json")), 0);
  const std::string a = slurp(path("a.json"));
  EXPECT_EQ(a, slurp(path("b.json")));
  EXPECT_EQ(a, slurp(path("c.json")));
  const auto j = nlohmann::json::parse(a);
  EXPECT_EQ(j["config"]["episodes"], 500);
  EXPECT_EQ(j["config"]["bin"]["width"], 125);
  EXPECT_EQ(j["config"]["bin"]["height"], 150);
  EXPECT_EQ(j["config"]["n_items"], 15);
  EXPECT_EQ(j["policies"].size(), 3u);
  EXPECT_EQ(j["policies"][0]["densities"].size(), 500u);
}

TEST_F(Cli, CompareWritesLogsAndRenders) {
  ASSERT_EQ(cli("compare --policies greedy,maxrects --episodes 3 --logs " + path("logs") + " --render-dir " +
                path("svg") + " --name exp --report " + path("r.json")),
            0);
  EXPECT_EQ(strippack::load_episodes(path("logs/greedy.jsonl")).size(), 3u);
  EXPECT_TRUE(fs::exists(path("svg/exp/maxrects/2.svg")));
  EXPECT_TRUE(fs::exists(path("svg/exp/greedy/0.svg")));
}

TEST_F(Cli, CompareWithFailingExternalPolicyExitsNonZero) {
  EXPECT_EQ(cli("compare --policies greedy,external --external-cmd 'exit 3' --episodes 2 --report " + path("r.json")), 1);
  const auto j = nlohmann::json::parse(slurp(path("r.json")));
  EXPECT_EQ(j["complete"], false);
  EXPECT_EQ(j["policies"][1]["failed_episodes"].size(), 2u);
}

TEST_F(Cli, ConfigFilePrecedence) {
  {
    std::ofstream cfg(path("cfg.toml"));
    cfg << "[compare]\nepisodes = 7\npolicies = \"greedy\"\n";
  }
  ASSERT_EQ(cli("--config " + path("cfg.toml") + " compare --report " + path("a.json")), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("a.json")))["config"]["episodes"], 7);
  ASSERT_EQ(cli("--config " + path("cfg.toml") + " compare --episodes 4 --report " + path("b.json")), 0);
  const auto b = nlohmann::json::parse(slurp(path("b.json")));
  EXPECT_EQ(b["config"]["episodes"], 4);
  EXPECT_EQ(b["config"]["policies"], nlohmann::json::array({"greedy"}));
}

TEST_F(Cli, ServeSpeaksTheProtocol) {
  {
    std::ofstream req(path("req.jsonl"));
    req << R"({"cmd":"reset","seed":42,"scenario":"random","reward_mode":"v1"})" << "\n"
        << R"({"cmd":"step","action":0})" << "\n"
        << R"({"cmd":"close"})" << "\n";
  }
  ASSERT_EQ(cli("serve < '" + path("req.jsonl") + "'"), 0);
  const std::string first = slurp(path("stdout"));
  ASSERT_EQ(cli("serve < '" + path("req.jsonl") + "'"), 0);
  EXPECT_EQ(slurp(path("stdout")), first);
  std::istringstream lines(first);
  std::vector<std::string> out;
  for (std::string l; std::getline(lines, l);) out.push_back(l);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0], R"({"protocol":"strippack-env","version":1,"w":125,"h":150})");
  EXPECT_EQ(nlohmann::json::parse(out[1])["state"].size(), 625u);
  EXPECT_EQ(out[3], R"({"closed":true})");
  EXPECT_TRUE(slurp(path("stderr")).empty());
}

}  // namespace
