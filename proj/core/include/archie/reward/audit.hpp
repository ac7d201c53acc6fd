#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "archie/reward/assembly.hpp"

namespace archie::reward {

struct MonotonicityViolation {
  std::size_t component;
  std::size_t t;
  std::size_t t_later;
  double magnitude;  // r_t - r_t_later, always > 0
};

struct MonotonicityReport {
  // First `kMaxListed` violations in (component, t, t_later) order.
  std::vector<MonotonicityViolation> violations;
  std::size_t violation_count = 0;
  double max_magnitude = 0.0;

  static constexpr std::size_t kMaxListed = 100;
  bool monotone() const { return violation_count == 0; }
};

// A pair t < t' violates monotonicity for component k when r_t > 0 and
// r_t' < r_t. Diagnostic only. Throws Error(kInvalidConfig) on an empty
// trajectory or ragged component vectors.
MonotonicityReport audit_monotonicity(std::span<const RewardBreakdown> trajectory);

struct DominanceReport {
  bool solved = false;
  // Meaningful only when solved.
  bool pass = false;
  // Set when the monotonicity audit failed, so the guarantee does not apply.
  bool conditional = false;
  double terminal = 0.0;
  double cumulative_bonus = 0.0;    // sum over steps of bonus_sum
  double cumulative_shaping = 0.0;  // sum over steps of shaping_sum
  double ratio = 0.0;               // terminal / max(|cumulative_shaping|, kRatioEpsilon)

  static constexpr double kRatioEpsilon = 1e-9;
};

// Checks terminal >= 10 * cumulative_bonus on a solved episode. Throws
// Error(kInconsistentEpisode) when solved but the last terminal is 0, and
// Error(kInvalidConfig) on an empty episode.
DominanceReport audit_dominance(std::span<const RewardBreakdown> episode, bool solved);

}  // namespace archie::reward
