#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "fluxkit/csv.hpp"
#include "fluxkit/error.hpp"

namespace fluxkit::cli {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

// Minimal polyline plot; enough to eyeball the CSV output.
inline void write_line_svg(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<SvgSeries>& series) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("svg: cannot open " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "' viewBox='0 0 " << w << " " << h << "'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n"
     << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>"
     << title << "</text>\n";
  // axes
  os << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
     << "' y2='" << h - mb << "' stroke='black'/>\n"
     << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << h - mb << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 4;
    const double yv = ymin + i * (ymax - ymin) / 4;
    os << "<text x='" << px(xv) << "' y='" << h - mb + 18
       << "' text-anchor='middle' font-size='11'>" << CsvWriter::format_double(xv)
       << "</text>\n";
    os << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
       << "' text-anchor='end' font-size='11'>" << CsvWriter::format_double(yv)
       << "</text>\n";
  }
  os << "<text x='" << (ml + w - mr) / 2 << "' y='" << h - 12
     << "' text-anchor='middle' font-size='13'>" << xlabel << "</text>\n";
  os << "<text x='18' y='" << (mt + h - mb) / 2
     << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
     << (mt + h - mb) / 2 << ")'>" << ylabel << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << colors[ci % 6]
       << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "'/>\n";
    os << "<text x='" << w - mr - 6 << "' y='" << mt + 16 + 16 * ci
       << "' text-anchor='end' font-size='12' fill='" << colors[ci % 6] << "'>"
       << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace fluxkit::cli
