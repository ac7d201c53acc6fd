#include "archie/reward/audit.hpp"

#include <algorithm>
#include <cmath>

#include "archie/common/error.hpp"

namespace archie::reward {

MonotonicityReport audit_monotonicity(std::span<const RewardBreakdown> trajectory) {
  if (trajectory.empty()) throw Error(ErrorCode::kInvalidConfig, "trajectory is empty");
  const std::size_t k_count = trajectory.front().components.size();
  for (const auto& b : trajectory) {
    if (b.components.size() != k_count) {
      throw Error(ErrorCode::kInvalidConfig, "trajectory has ragged component vectors");
    }
  }
  MonotonicityReport report;
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t t = 0; t < trajectory.size(); ++t) {
      const double r = trajectory[t].components[k];
      if (!(r > 0.0)) continue;
      for (std::size_t u = t + 1; u < trajectory.size(); ++u) {
        const double later = trajectory[u].components[k];
        if (later >= r) continue;
        const double magnitude = r - later;
        ++report.violation_count;
        report.max_magnitude = std::max(report.max_magnitude, magnitude);
        if (report.violations.size() < MonotonicityReport::kMaxListed) {
          report.violations.push_back({k, t, u, magnitude});
        }
      }
    }
  }
  return report;
}

DominanceReport audit_dominance(std::span<const RewardBreakdown> episode, bool solved) {
  if (episode.empty()) throw Error(ErrorCode::kInvalidConfig, "episode is empty");
  DominanceReport report;
  report.solved = solved;
  for (const auto& b : episode) {
    report.cumulative_bonus += b.bonus_sum;
    report.cumulative_shaping += b.shaping_sum;
  }
  report.terminal = episode.back().terminal;
  report.conditional = !audit_monotonicity(episode).monotone();
  if (!solved) return report;
  if (report.terminal == 0.0) {
    throw Error(ErrorCode::kInconsistentEpisode, "episode is marked solved but its terminal reward is 0");
  }
  report.ratio =
      report.terminal / std::max(std::abs(report.cumulative_shaping), DominanceReport::kRatioEpsilon);
  report.pass = report.terminal >= kTerminalScale * report.cumulative_bonus;
  return report;
}

}  // namespace archie::reward
