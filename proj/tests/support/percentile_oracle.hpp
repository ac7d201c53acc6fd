#pragma once

#include <algorithm>
#include <vector>

namespace archie::test {

// Inclusive-method percentile by brute force: sorted samples sit at plotting
// positions i / (n - 1); scan for the segment holding p and interpolate on it.
inline double brute_force_percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 1) return values[0];
  const long double step = 1.0L / static_cast<long double>(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const long double lo = step * static_cast<long double>(i);
    const long double hi = step * static_cast<long double>(i + 1);
    if (p <= hi || i + 2 == n) {
      const long double w = (static_cast<long double>(p) - lo) / step;
      return static_cast<double>(values[i] + w * (static_cast<long double>(values[i + 1]) - values[i]));
    }
  }
  return values.back();
}

}  // namespace archie::test
