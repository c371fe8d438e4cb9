// Minimal external policy for tests: answers every observation with the first
// feasible action index. `--garbage` replies with non-JSON instead.

#include <iostream>
#include <string>

#include "json.hpp"

int main(int argc, char** argv) {
  const bool garbage = argc > 1 && std::string(argv[1]) == "--garbage";
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("mask")) continue;  // handshake or noise
    if (garbage) {
      std::cout << "no idea" << std::endl;
      continue;
    }
    const auto mask = j["mask"].get<std::vector<int>>();
    int action = -1;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) {
        action = static_cast<int>(i);
        break;
      }
    }
    std::cout << "{\"action\":" << action << "}" << std::endl;
  }
  return 0;
}
