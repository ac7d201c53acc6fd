#pragma once

#include <span>
#include <string>
#include <vector>

namespace archie::reward {

struct RewardBreakdown {
  std::vector<double> components;  // ordered as the spec's components
  double shaping_sum = 0.0;
  double bonus_sum = 0.0;
  double terminal = 0.0;
  double total = 0.0;
};

// Terminal multiplier: R_F = kTerminalScale * T * max(bonus_sum, 1).
inline constexpr double kTerminalScale = 10.0;

// Sums are accumulated left to right in component order, so
// total == shaping_sum + terminal holds bit-exactly.
// Throws Error(kInvalidConfig) when horizon < 1.
RewardBreakdown assemble_reward(std::span<const double> components, bool phi_next, int horizon);

}  // namespace archie::reward
