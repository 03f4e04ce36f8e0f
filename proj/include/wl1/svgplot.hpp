#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace wl1 {

// Minimal line-plot emitter: polylines with axes, ticks, and a legend.
// CSV files remain the authoritative output; the SVG is a convenience view.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

struct SvgPlot {
  std::string title, xlabel, ylabel;
  std::vector<SvgSeries> series;
  int width = 800, height = 560;

  void write(std::ostream& os) const {
    const double ml = 70, mr = 160, mt = 48, mb = 56;
    const double pw = width - ml - mr, ph = height - mt - mb;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    char buf[512];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"16\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  ml + pw / 2, mt - 18, title.c_str());
    os << buf;

    // axes with 6 ticks per side
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#333\"/>\n", ml, mt, pw, ph);
    os << buf;
    for (int t = 0; t <= 5; ++t) {
      double xv = xmin + (xmax - xmin) * t / 5.0;
      double yv = ymin + (ymax - ymin) * t / 5.0;
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                    px(xv), mt + ph, px(xv), mt + ph + 5);
      os << buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                    "text-anchor=\"middle\">%.3g</text>\n", px(xv), mt + ph + 18, xv);
      os << buf;
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                    ml - 5, py(yv), ml, py(yv));
      os << buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                    "text-anchor=\"end\">%.3g</text>\n", ml - 8, py(yv) + 4, yv);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" "
                  "text-anchor=\"middle\">%s</text>\n", ml + pw / 2, height - 14.0, xlabel.c_str());
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" "
                  "text-anchor=\"middle\" transform=\"rotate(-90 %.1f %.1f)\">%s</text>\n",
                  18.0, mt + ph / 2, 18.0, mt + ph / 2, ylabel.c_str());
    os << buf;

    for (std::size_t si = 0; si < series.size(); ++si) {
      const auto& s = series[si];
      const char* color = palette[si % 8];
      std::string pts;
      char pb[64];
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        std::snprintf(pb, sizeof(pb), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        pts += pb;
      }
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
         << pts << "\"/>\n";
      double ly = mt + 16 + 20.0 * si;
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                    "stroke-width=\"2\"/>\n", ml + pw + 12, ly, ml + pw + 36, ly, color);
      os << buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\">%s"
                    "</text>\n", ml + pw + 42, ly + 4, s.label.c_str());
      os << buf;
    }
    os << "</svg>\n";
  }
};

}  // namespace wl1
