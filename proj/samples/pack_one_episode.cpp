// Packs one random instance with the greedy skyline policy and MaxRects, then
// prints both densities and writes an SVG of the greedy episode.

#include <iostream>

#include "strippack/strippack.hpp"

int main() {
  using namespace strippack;

  const EnvConfig env{BinConfig{125, 150}, RewardMode::V1};
  InstanceSpec spec;
  spec.seed = 2024;
  const std::vector<Item> items = generate(spec, env.bin);

  GreedySkylinePolicy greedy;
  const EpisodeContext ctx{0, spec.seed, spec.scenario};
  const EpisodeLog g = run_env_episode(greedy, items, env, ctx);
  const EpisodeLog m = run_maxrects_episode(items, env, ctx);

  std::cout << "greedy:   " << g.placements.size() << " placed, density " << g.density << "\n";
  std::cout << "maxrects: " << m.placements.size() << " placed, density " << m.density << "\n";

  RenderOptions opt;
  opt.height_map = true;
  render_episode(g, "greedy_episode.svg", opt);
  return 0;
}
