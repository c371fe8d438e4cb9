#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "strippack/instances.hpp"

namespace strippack {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("strippack_" + std::to_string(::getpid()) + "_" + name);
}

const std::vector<std::vector<int>> kPinnedSeed42{
    {1, 36, 59}, {7, 41, 51}, {6, 60, 32}, {2, 44, 42}, {14, 33, 54}, {11, 32, 46}, {4, 33, 38}, {9, 18, 37},
    {5, 13, 44}, {12, 18, 26}, {10, 23, 19}, {0, 14, 20}, {13, 23, 12}, {8, 12, 20}, {3, 15, 12}};

TEST(SplitMix64, ReferenceVector) {
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(g.next(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(g.next(), 0x06C45D188009454Full);
}

TEST(SplitMix64, UniformStaysInRange) {
  SplitMix64 g(5);
  std::vector<int> seen(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const auto v = g.uniform(10, 15);
    ASSERT_GE(v, 10);
    ASSERT_LE(v, 15);
    ++seen[static_cast<std::size_t>(v - 10)];
  }
  for (int c : seen) EXPECT_GT(c, 800);
  EXPECT_THROW(g.uniform(3, 2), ContractViolation);
}

TEST(Generate, FixedSetIsStableAndSorted) {
  InstanceSpec spec;
  spec.scenario = Scenario::FixedSet;
  const auto a = generate(spec, BinConfig{});
  const auto b = generate(spec, BinConfig{});
  ASSERT_EQ(a.size(), 15u);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(is_area_sorted(a));
  std::int64_t total = 0;
  for (const Item& it : a) {
    EXPECT_LE(std::max(it.width, it.height), 60);
    total += it.area();
  }
  EXPECT_EQ(total, 15768);
}

TEST(Generate, FixedSetTiesBreakByWidth) {
  InstanceSpec spec;
  spec.scenario = Scenario::FixedSet;
  spec.items = {{0, 2, 6}, {1, 3, 4}, {2, 4, 3}, {3, 4, 3}};
  spec.n_items = 4;
  const auto items = generate(spec, BinConfig{10, 10});
  ASSERT_EQ(items.size(), 4u);
  EXPECT_EQ(items[0].id, 2);
  EXPECT_EQ(items[1].id, 3);
  EXPECT_EQ(items[2].id, 1);
  EXPECT_EQ(items[3].id, 0);
}

TEST(Generate, RandomSetIsDeterministicPerSeed) {
  InstanceSpec spec;
  spec.seed = 42;
  EXPECT_EQ(generate(spec, BinConfig{}), generate(spec, BinConfig{}));
  spec.seed = 43;
  InstanceSpec other = spec;
  other.seed = 42;
  EXPECT_NE(generate(spec, BinConfig{}), generate(other, BinConfig{}));
}

TEST(Generate, RandomSetPinnedSequence) {
  // Regression: SplitMix64-driven draws are platform independent.
  InstanceSpec spec;
  spec.seed = 42;
  const auto items = generate(spec, BinConfig{});
  ASSERT_EQ(items.size(), 15u);
  std::vector<std::vector<int>> got;
  for (const Item& it : items) got.push_back({it.id, it.width, it.height});
  EXPECT_EQ(got, kPinnedSeed42) << ::testing::PrintToString(got);
}

TEST(Generate, RandomSetPropertiesOverManySeeds) {
  const BinConfig bin{};
  InstanceSpec spec;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    spec.seed = seed;
    const auto items = generate(spec, bin);
    ASSERT_EQ(items.size(), 15u);
    ASSERT_TRUE(is_area_sorted(items));
    for (const Item& it : items) {
      ASSERT_TRUE(fits_empty_bin(it, bin));
      ASSERT_GE(it.width, 12);
      ASSERT_LE(it.width, 60);
      ASSERT_GE(it.height, 12);
      ASSERT_LE(it.height, 60);
    }
  }
}

TEST(Generate, RejectsBoundsBeyondBin) {
  InstanceSpec spec;
  spec.max_side = 61;
  EXPECT_THROW(generate(spec, BinConfig{60, 150}), ContractViolation);
  spec.max_side = 10;
  spec.min_side = 11;
  EXPECT_THROW(generate(spec, BinConfig{}), ContractViolation);
  InstanceSpec fixed;
  fixed.scenario = Scenario::FixedSet;
  fixed.n_items = 16;
  EXPECT_THROW(generate(fixed, BinConfig{}), ContractViolation);
}

TEST(InstanceFile, RoundTripsDefaultFixedSet) {
  InstanceSpec spec;
  spec.scenario = Scenario::FixedSet;
  const auto records = generate_batch(spec, BinConfig{}, 1, 0);
  const auto path = temp_file("fixed.jsonl");
  store_instances(path, records);
  EXPECT_EQ(load_instances(path), records);
  std::filesystem::remove(path);
}

TEST(InstanceFile, BatchOfFiveHundredDistinctSeeds) {
  const auto records = generate_batch(InstanceSpec{}, BinConfig{}, 500, 1000);
  const auto path = temp_file("batch.jsonl");
  store_instances(path, records);
  const auto loaded = load_instances(path);
  ASSERT_EQ(loaded.size(), 500u);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].seed, 1000 + i);
    EXPECT_EQ(loaded[i].index, i);
    seeds.insert(loaded[i].seed);
  }
  EXPECT_EQ(seeds.size(), 500u);
  EXPECT_EQ(loaded, records);
  std::filesystem::remove(path);
}

TEST(InstanceFile, ZeroWidthItemIsAParseErrorWithLocation) {
  const auto path = temp_file("bad.jsonl");
  {
    std::ofstream out(path);
    out << to_json_line(generate_batch(InstanceSpec{}, BinConfig{}, 1, 0).front()) << "\n";
    out << R"({"schema_version":1,"instance":1,"scenario":"fixed","seed":0,"bin":{"width":5,"height":5},)"
        << R"("items":[{"id":0,"width":2,"height":2},{"id":1,"width":0,"height":3}]})" << "\n";
  }
  try {
    load_instances(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "items[1].width");
  }
  std::filesystem::remove(path);
}

TEST(InstanceFile, OtherMalformedRecords) {
  EXPECT_THROW(instance_from_json_line("{not json"), ParseError);
  EXPECT_THROW(instance_from_json_line(R"({"schema_version":2})"), ParseError);
  EXPECT_THROW(instance_from_json_line(
                   R"({"schema_version":1,"instance":0,"scenario":"fixed","seed":0,"bin":{"width":5,"height":5},"items":[]})"),
               ParseError);
  // Areas 4 then 9: not in placement order.
  EXPECT_THROW(instance_from_json_line(
                   R"({"schema_version":1,"instance":0,"scenario":"fixed","seed":0,"bin":{"width":5,"height":5},)"
                   R"("items":[{"id":0,"width":2,"height":2},{"id":1,"width":3,"height":3}]})"),
               ParseError);
}

}  // namespace
}  // namespace strippack
