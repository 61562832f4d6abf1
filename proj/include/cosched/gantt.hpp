#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cosched/model.hpp"
#include "cosched/timeline.hpp"

namespace cosched {

/// Renders a timeline as a static SVG Gantt chart: one 100 px row per
/// accelerator, one colored span per executed group, diagonal hatching over
/// spans whose slowdown factor exceeds 1.05. Output contains no timestamps
/// or other run-dependent content.
inline std::string render_gantt_svg(const Scenario& scenario, const Timeline& tl) {
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                  "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};
  const int row_h = 100;
  const int left = 90;
  const int top = 30;
  const double content_w = 1000.0;
  const double span = std::max(tl.makespan_ms, 1e-9);
  const double scale = content_w / span;
  const int width = left + int(content_w) + 20;
  const int height = top + row_h * scenario.accel_count() + 30;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  svg << "  <defs><pattern id=\"slow\" width=\"6\" height=\"6\" "
         "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">"
         "<rect width=\"6\" height=\"6\" fill=\"none\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"black\" "
         "stroke-opacity=\"0.35\" stroke-width=\"2\"/></pattern></defs>\n";

  for (int a = 0; a < scenario.accel_count(); ++a) {
    int y = top + a * row_h;
    svg << "  <rect x=\"" << left << "\" y=\"" << y << "\" width=\"" << content_w
        << "\" height=\"" << row_h << "\" fill=\"" << (a % 2 ? "#f7f7f7" : "#ffffff")
        << "\" stroke=\"#cccccc\"/>\n";
    svg << "  <text x=\"8\" y=\"" << y + row_h / 2 + 4 << "\" font-size=\"14\">"
        << scenario.accelerators[std::size_t(a)].name << "</text>\n";
  }

  // Time axis: ~10 ticks rounded to a power of ten times 1, 2 or 5.
  double raw_step = span / 10.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  if (raw_step / mag > 5.0)
    step = 5.0 * mag;
  else if (raw_step / mag > 2.0)
    step = 2.0 * mag;
  for (double t = 0.0; t <= span * (1.0 + 1e-12); t += step) {
    double x = left + t * scale;
    svg << "  <line x1=\"" << x << "\" y1=\"" << top - 4 << "\" x2=\"" << x
        << "\" y2=\"" << top << "\" stroke=\"#444444\"/>\n";
    svg << "  <text x=\"" << x << "\" y=\"" << top - 8
        << "\" font-size=\"10\" text-anchor=\"middle\">" << t << "</text>\n";
  }

  for (const auto& g : tl.groups) {
    int y = top + g.accel * row_h + 15;
    double x = left + g.start_ms * scale;
    double w = std::max((g.end_ms - g.start_ms) * scale, 0.5);
    const char* color = palette[std::size_t(g.dnn) % 8];
    svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
        << "\" height=\"" << row_h - 30 << "\" fill=\"" << color
        << "\" stroke=\"#222222\" stroke-width=\"0.5\"><title>dnn " << g.dnn
        << " group " << g.group << " [" << g.start_ms << ", " << g.end_ms
        << "] ms</title></rect>\n";
    for (const auto& seg : g.segments) {
      if (seg.factor <= 1.05) continue;
      double sx = left + seg.start_ms * scale;
      double sw = std::max((seg.end_ms - seg.start_ms) * scale, 0.5);
      svg << "  <rect x=\"" << sx << "\" y=\"" << y << "\" width=\"" << sw
          << "\" height=\"" << row_h - 30 << "\" fill=\"url(#slow)\"/>\n";
    }
    if (w > 30.0) {
      svg << "  <text x=\"" << x + w / 2 << "\" y=\"" << y + (row_h - 30) / 2 + 4
          << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#ffffff\">" << g.dnn
          << "." << g.group << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cosched
