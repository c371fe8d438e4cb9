#include <gtest/gtest.h>

#include <vector>

#include "strippack/instances.hpp"
#include "strippack/maxrects.hpp"
#include "strippack/policies.hpp"
#include "strippack/rng.hpp"
#include "support/oracles.hpp"

namespace strippack {
namespace {

using Rects = std::vector<FreeRectangle>;

TEST(MaxRects, FirstPlacementSplitsEmptyBin) {
  FreeRectSet free(BinConfig{5, 5});
  const auto p = maxrects_place(free, Item{0, 2, 3});
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->x, 0);
  EXPECT_EQ(p->y, 0);
  EXPECT_EQ(p->rotation, Rotation::Deg0);
  EXPECT_EQ(free.rects(), (Rects{{2, 0, 3, 5}, {0, 3, 5, 2}}));
}

TEST(MaxRects, OversizedItemDoesNotFit) {
  FreeRectSet free(BinConfig{5, 5});
  EXPECT_FALSE(maxrects_place(free, Item{0, 6, 6}).has_value());
  EXPECT_EQ(free.rects(), (Rects{{0, 0, 5, 5}}));
}

TEST(MaxRects, TwoSquaresDoNotOverlap) {
  const BinConfig bin{4, 4};
  FreeRectSet free(bin);
  std::vector<Placement> placed;
  for (int id = 0; id < 2; ++id) {
    const auto p = maxrects_place(free, Item{id, 2, 2});
    ASSERT_TRUE(p.has_value());
    placed.push_back(*p);
  }
  EXPECT_EQ(oracle::overlap_violations(placed, bin), 0);
}

TEST(MaxRects, RotatesWhenOnlyTheRotationFits) {
  FreeRectSet free(BinConfig{3, 6});
  const auto p = maxrects_place(free, Item{0, 5, 2});
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->rotation, Rotation::Deg90);
  EXPECT_EQ(p->effective_width, 2);
  EXPECT_EQ(p->effective_height, 5);
}

TEST(MaxRects, PruningDropsContainedRectangles) {
  FreeRectSet free(BinConfig{10, 10}, {{0, 0, 10, 10}, {2, 2, 3, 3}, {0, 0, 10, 10}});
  EXPECT_EQ(free.rects(), (Rects{{0, 0, 10, 10}}));
}

// Free set must cover exactly the unoccupied cells, and every rectangle must be
// maximal (no side can grow by one cell without hitting an item or the wall).
void expect_free_set_exact(const FreeRectSet& free, const std::vector<Placement>& placed, const BinConfig& bin) {
  oracle::PixelGrid used(bin.width, bin.height);
  for (const auto& p : placed) used.paint(p.x, p.y, p.effective_width, p.effective_height);
  oracle::PixelGrid covered(bin.width, bin.height);
  for (const auto& r : free.rects()) {
    ASSERT_TRUE(used.rect_free(r.x, r.y, r.width, r.height)) << "free rect overlaps an item";
    covered.paint(r.x, r.y, r.width, r.height);
    EXPECT_FALSE(used.rect_free(r.x - 1, r.y, r.width + 1, r.height));
    EXPECT_FALSE(used.rect_free(r.x, r.y, r.width + 1, r.height));
    EXPECT_FALSE(used.rect_free(r.x, r.y - 1, r.width, r.height + 1));
    EXPECT_FALSE(used.rect_free(r.x, r.y, r.width, r.height + 1));
  }
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) ASSERT_NE(used.at(x, y) == 0, covered.at(x, y) == 0) << x << "," << y;
  }
}

TEST(MaxRects, InvariantsAndCoverageOnRandomSmallBins) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const BinConfig bin{static_cast<int>(rng.uniform(2, 16)), static_cast<int>(rng.uniform(2, 16))};
    FreeRectSet free(bin);
    std::vector<Placement> placed;
    for (int id = 0; id < 30; ++id) {
      const Item item{id, static_cast<int>(rng.uniform(1, 6)), static_cast<int>(rng.uniform(1, 6))};
      const auto p = maxrects_place(free, item);
      if (!p) continue;
      placed.push_back(*p);
      ASSERT_TRUE(free.invariants_hold());
      ASSERT_EQ(oracle::overlap_violations(placed, bin), 0);
    }
    expect_free_set_exact(free, placed, bin);
  }
}

TEST(MaxRects, DeterministicEpisodes) {
  InstanceSpec spec;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto items = generate(spec, BinConfig{});
    const EpisodeContext ctx{0, seed, spec.scenario};
    const EpisodeLog a = run_maxrects_episode(items, EnvConfig{}, ctx);
    const EpisodeLog b = run_maxrects_episode(items, EnvConfig{}, ctx);
    EXPECT_EQ(a, b);
    EXPECT_EQ(oracle::overlap_violations(a.placements, BinConfig{}), 0);
    EXPECT_GE(a.density, 0.0);
    EXPECT_LE(a.density, 1.0);
  }
}

TEST(MaxRects, EpisodeStopsAtFirstMisfit) {
  const EpisodeLog log = run_maxrects_episode({{0, 5, 5}, {1, 1, 1}}, EnvConfig{{5, 5}}, {});
  EXPECT_EQ(log.placements.size(), 1u);
  EXPECT_EQ(log.termination, Termination::NoFeasiblePlacement);
  EXPECT_EQ(log.density, 1.0);
}

}  // namespace
}  // namespace strippack
