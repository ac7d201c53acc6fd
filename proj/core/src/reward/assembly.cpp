#include "archie/reward/assembly.hpp"

#include <algorithm>

#include "archie/common/error.hpp"

namespace archie::reward {

RewardBreakdown assemble_reward(std::span<const double> components, bool phi_next, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  RewardBreakdown b;
  b.components.assign(components.begin(), components.end());
  for (double r : components) {
    b.shaping_sum += r;
    b.bonus_sum += std::max(r, 0.0);
  }
  const double r_f = kTerminalScale * static_cast<double>(horizon) * std::max(b.bonus_sum, 1.0);
  b.terminal = phi_next ? r_f : 0.0;
  b.total = b.shaping_sum + b.terminal;
  return b;
}

}  // namespace archie::reward
