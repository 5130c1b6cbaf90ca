#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace conslaw {

// Minimal static SVG line plots for the scaling curves; log axes
// supported by transforming the data and labeling ticks in powers.

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<SvgSeries>& series, bool logx = false,
                           bool logy = false) {
  const int W = 640, H = 440, ml = 70, mr = 20, mt = 40, mb = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if ((logx && x <= 0) || (logy && y <= 0)) continue;
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
     << "</text>\n";

  // frame and ticks
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << (W - ml - mr) << "' height='"
     << (H - mt - mb) << "' fill='none' stroke='#444'/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    double fx = xmin + (xmax - xmin) * i / nticks;
    double fy = ymin + (ymax - ymin) * i / nticks;
    double X = ml + (W - ml - mr) * static_cast<double>(i) / nticks;
    double Y = H - mb - (H - mt - mb) * static_cast<double>(i) / nticks;
    std::ostringstream lx, ly;
    lx.precision(3);
    ly.precision(3);
    if (logx) lx << "1e" << fx;
    else lx << fx;
    if (logy) ly << "1e" << fy;
    else ly << fy;
    os << "<line x1='" << X << "' y1='" << (H - mb) << "' x2='" << X << "' y2='" << (H - mb + 5)
       << "' stroke='#444'/>\n";
    os << "<text x='" << X << "' y='" << (H - mb + 18) << "' text-anchor='middle' font-size='11'>"
       << lx.str() << "</text>\n";
    os << "<line x1='" << (ml - 5) << "' y1='" << Y << "' x2='" << ml << "' y2='" << Y
       << "' stroke='#444'/>\n";
    os << "<text x='" << (ml - 8) << "' y='" << (Y + 4) << "' text-anchor='end' font-size='11'>"
       << ly.str() << "</text>\n";
  }
  os << "<text x='" << W / 2 << "' y='" << (H - 12) << "' text-anchor='middle' font-size='13'>"
     << xlabel << "</text>\n";
  os << "<text x='16' y='" << H / 2 << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
     << H / 2 << ")'>" << ylabel << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 6];
    std::ostringstream pts;
    for (auto [x, y] : series[k].points) {
      if ((logx && x <= 0) || (logy && y <= 0)) continue;
      pts << px(x) << ',' << py(y) << ' ';
    }
    os << "<polyline points='" << pts.str() << "' fill='none' stroke='" << c
       << "' stroke-width='1.5'/>\n";
    for (auto [x, y] : series[k].points) {
      if ((logx && x <= 0) || (logy && y <= 0)) continue;
      os << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='2.5' fill='" << c << "'/>\n";
    }
    os << "<text x='" << (W - mr - 8) << "' y='" << (mt + 16 + 16 * k)
       << "' text-anchor='end' font-size='12' fill='" << c << "'>" << series[k].name
       << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream f(path);
  f << os.str();
}

}  // namespace conslaw
