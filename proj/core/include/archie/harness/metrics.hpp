#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "archie/rl/trainer.hpp"

namespace archie::harness {

inline constexpr std::string_view kMetricsHeader =
    "step,seed,env_id,success_rate,critic_loss,actor_loss,alpha,episode_return,episodes_done";

std::string metrics_csv_line(const rl::MetricsRow& row);
std::string metrics_to_csv(std::span<const rl::MetricsRow> rows);
// Throws Error(kParse) naming the file and line on any deviation from the
// column contract.
std::vector<rl::MetricsRow> metrics_from_csv(const std::string& text, const std::string& source = "<csv>");
std::vector<rl::MetricsRow> read_metrics_csv(const std::filesystem::path& path);

// Inclusive linear-interpolation percentile of ascending-sorted values:
// position p * (n - 1), interpolated between the neighbouring ranks.
double percentile_sorted(std::span<const double> sorted, double p);

struct CurveStats {
  std::vector<std::int64_t> steps;
  std::vector<double> p25;
  std::vector<double> median;
  std::vector<double> p75;
};

// One curve per run, each a list of (step, success_rate). All curves must
// share the same step grid (Error(kRaggedGrid) otherwise) and contain at
// least one point.
using Curve = std::vector<std::pair<std::int64_t, double>>;
CurveStats aggregate_percentiles(std::span<const Curve> curves);

Curve success_curve(std::span<const rl::MetricsRow> rows);

// Success-rate plot: median polyline over a shaded 25-75 band.
std::string render_svg(const CurveStats& stats, const std::string& title);

}  // namespace archie::harness
