#include "archie/harness/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "archie/common/error.hpp"
#include "archie/common/text.hpp"

namespace archie::harness {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, where + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string metrics_csv_line(const rl::MetricsRow& r) {
  return std::to_string(r.step) + "," + std::to_string(r.seed) + "," + r.env_id + "," +
         format_double(r.success_rate) + "," + format_double(r.critic_loss) + "," + format_double(r.actor_loss) +
         "," + format_double(r.alpha) + "," + format_double(r.episode_return) + "," +
         std::to_string(r.episodes_done);
}

std::string metrics_to_csv(std::span<const rl::MetricsRow> rows) {
  std::string out(kMetricsHeader);
  out += "\n";
  for (const auto& r : rows) out += metrics_csv_line(r) + "\n";
  return out;
}

std::vector<rl::MetricsRow> metrics_from_csv(const std::string& text, const std::string& source) {
  std::vector<rl::MetricsRow> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = source + ":" + std::to_string(line_no);
    if (!header) {
      if (line != kMetricsHeader) throw Error(ErrorCode::kParse, where + ": unexpected metrics header");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw Error(ErrorCode::kParse, where + ": expected 9 columns");
    rl::MetricsRow r;
    r.step = parse_number<std::int64_t>(f[0], where);
    r.seed = parse_number<std::uint64_t>(f[1], where);
    r.env_id = std::string(f[2]);
    r.success_rate = parse_number<double>(f[3], where);
    r.critic_loss = parse_number<double>(f[4], where);
    r.actor_loss = parse_number<double>(f[5], where);
    r.alpha = parse_number<double>(f[6], where);
    r.episode_return = parse_number<double>(f[7], where);
    r.episodes_done = parse_number<std::int64_t>(f[8], where);
    if (!(r.success_rate >= 0.0 && r.success_rate <= 1.0)) {
      throw Error(ErrorCode::kParse, where + ": success_rate outside [0, 1]");
    }
    rows.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorCode::kParse, source + ": empty metrics file");
  return rows;
}

std::vector<rl::MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  return metrics_from_csv(read_file(path), path.string());
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kInvalidConfig, "percentile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CurveStats aggregate_percentiles(std::span<const Curve> curves) {
  if (curves.empty()) throw Error(ErrorCode::kInvalidConfig, "no curves to aggregate");
  const Curve& first = curves.front();
  if (first.empty()) throw Error(ErrorCode::kRaggedGrid, "curve has no evaluation points");
  for (const auto& c : curves) {
    bool same = c.size() == first.size();
    for (std::size_t i = 0; same && i < c.size(); ++i) same = c[i].first == first[i].first;
    if (!same) throw Error(ErrorCode::kRaggedGrid, "curves do not share an evaluation step grid");
  }
  CurveStats s;
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t k = 0; k < curves.size(); ++k) column[k] = curves[k][i].second;
    std::sort(column.begin(), column.end());
    s.steps.push_back(first[i].first);
    s.p25.push_back(percentile_sorted(column, 0.25));
    s.median.push_back(percentile_sorted(column, 0.5));
    s.p75.push_back(percentile_sorted(column, 0.75));
  }
  return s;
}

Curve success_curve(std::span<const rl::MetricsRow> rows) {
  Curve c;
  for (const auto& r : rows) c.emplace_back(r.step, r.success_rate);
  return c;
}

std::string render_svg(const CurveStats& s, const std::string& title) {
  constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  const double x_max = s.steps.empty() ? 1.0 : static_cast<double>(std::max<std::int64_t>(s.steps.back(), 1));
  const auto sx = [&](std::int64_t step) { return kLeft + pw * static_cast<double>(step) / x_max; };
  const auto sy = [&](double v) { return kTop + ph * (1.0 - v); };

  std::string escaped;
  for (char ch : title) {
    switch (ch) {
      case '<': escaped += "&lt;"; break;
      case '>': escaped += "&gt;"; break;
      case '&': escaped += "&amp;"; break;
      default: escaped += ch;
    }
  }

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_number(kW) + "\" height=\"" +
                    svg_number(kH) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_number(kW / 2) + "\" y=\"24\" text-anchor=\"middle\">" + escaped + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    out += "<line x1=\"" + svg_number(kLeft) + "\" x2=\"" + svg_number(kLeft + pw) + "\" y1=\"" + svg_number(sy(v)) +
           "\" y2=\"" + svg_number(sy(v)) + "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + svg_number(kLeft - 8) + "\" y=\"" + svg_number(sy(v) + 4) + "\" text-anchor=\"end\">" +
           svg_number(v) + "</text>\n";
  }
  out += "<text x=\"" + svg_number(kLeft + pw / 2) + "\" y=\"" + svg_number(kH - 12) +
         "\" text-anchor=\"middle\">env steps (max " + std::to_string(static_cast<std::int64_t>(x_max)) +
         ")</text>\n";
  out += "<text x=\"16\" y=\"" + svg_number(kTop + ph / 2) + "\" transform=\"rotate(-90 16 " +
         svg_number(kTop + ph / 2) + ")\" text-anchor=\"middle\">success rate</text>\n";

  if (!s.steps.empty()) {
    std::string band;
    for (std::size_t i = 0; i < s.steps.size(); ++i) band += svg_number(sx(s.steps[i])) + "," + svg_number(sy(s.p75[i])) + " ";
    for (std::size_t i = s.steps.size(); i-- > 0;) band += svg_number(sx(s.steps[i])) + "," + svg_number(sy(s.p25[i])) + " ";
    out += "<polygon points=\"" + band + "\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    std::string line;
    for (std::size_t i = 0; i < s.steps.size(); ++i) line += svg_number(sx(s.steps[i])) + "," + svg_number(sy(s.median[i])) + " ";
    out += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  out += "<rect x=\"" + svg_number(kLeft) + "\" y=\"" + svg_number(kTop) + "\" width=\"" + svg_number(pw) +
         "\" height=\"" + svg_number(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace archie::harness
