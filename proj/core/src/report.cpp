#include "mdp/report.hpp"

#include <fmt/format.h>

namespace mdp::report {

std::string timeline_csv(const localize::ForgeryActivationSequence& fas) {
  std::string out = "t,start_s,end_s,p_genuine,p_forged\n";
  const double step = fas.step_seconds();
  for (std::size_t t = 0; t < fas.steps(); ++t) {
    out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f}\n", t, static_cast<double>(t) * step,
                       static_cast<double>(t + 1) * step, fas.probs(t, 0), fas.probs(t, 1));
  }
  return out;
}

namespace {
constexpr double kWidth = 800.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 20.0;
constexpr double kLane = 22.0;
constexpr double kPlotTop = 90.0;
constexpr double kPlotHeight = 100.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace

std::string timeline_svg(const std::string& video_id,
                         const localize::ForgeryActivationSequence& fas,
                         std::span<const corpus::SegmentSpan> ground_truth,
                         std::span<const corpus::SegmentSpan> predicted) {
  const double duration = fas.duration_s > 0.0 ? fas.duration_s : 1.0;
  const double span_w = kWidth - kLeft - kRight;
  auto x = [&](double seconds) { return kLeft + span_w * seconds / duration; };
  const double height = kPlotTop + kPlotHeight + 40.0;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, height);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"16\">{}</text>\n", kLeft, escape(video_id));

  auto lane = [&](double y, const char* label, const char* color,
                  std::span<const corpus::SegmentSpan> spans) {
    svg += fmt::format("<text x=\"4\" y=\"{:.1f}\">{}</text>\n", y + 15, label);
    svg += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"#eeeeee\"/>\n",
        kLeft, y, span_w, kLane - 4);
    for (const auto& s : spans) {
      svg += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n",
          x(s.start_s), y, x(s.end_s) - x(s.start_s), kLane - 4, color);
    }
  };
  lane(28.0, "ground truth", "#d62728", ground_truth);
  lane(28.0 + kLane, "predicted", "#1f77b4", predicted);

  // Forged-probability step plot with a 0.5 guide.
  const double base = kPlotTop + kPlotHeight;
  svg += fmt::format("<text x=\"4\" y=\"{:.1f}\">p(forged)</text>\n", kPlotTop + 12);
  svg += fmt::format(
      "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#999\" "
      "stroke-dasharray=\"4 3\"/>\n",
      kLeft, base - 0.5 * kPlotHeight, kLeft + span_w, base - 0.5 * kPlotHeight);
  std::string points;
  const double step = fas.step_seconds();
  for (std::size_t t = 0; t < fas.steps(); ++t) {
    const double y = base - fas.forged(t) * kPlotHeight;
    points += fmt::format("{:.1f},{:.1f} {:.1f},{:.1f} ", x(static_cast<double>(t) * step), y,
                          x(static_cast<double>(t + 1) * step), y);
  }
  svg += fmt::format("<polyline fill=\"none\" stroke=\"#2ca02c\" points=\"{}\"/>\n", points);

  // Time axis.
  svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
                     kLeft, base, kLeft + span_w, base);
  const int ticks = 8;
  for (int i = 0; i <= ticks; ++i) {
    const double s = duration * i / ticks;
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>"
        "<text x=\"{0:.1f}\" y=\"{3:.1f}\" text-anchor=\"middle\">{4:.1f}s</text>\n",
        x(s), base, base + 4, base + 18, s);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace mdp::report
