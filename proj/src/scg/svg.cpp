#include "scg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace scg {

void write_svg_lines(const std::string& path, const std::vector<double>& x,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series,
                     const std::string& title) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  const int W = 720, H = 420, ML = 60, MR = 140, MT = 40, MB = 40;
  double xmin = x.empty() ? 0 : x.front(), xmax = x.empty() ? 1 : x.back();
  double ymin = 1e300, ymax = -1e300;
  for (const auto& [name, ys] : series)
    for (double v : ys) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (ymax == ymin) { ymax += 1; ymin -= 1; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double v) { return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  f << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
    << H - MB << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
    << "\" stroke=\"black\"/>\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", xmin);
  f << "<text x=\"" << ML << "\" y=\"" << H - MB + 16 << "\" font-size=\"11\">" << buf
    << "</text>\n";
  std::snprintf(buf, sizeof(buf), "%.3g", xmax);
  f << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 16
    << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof(buf), "%.3g", ymin);
  f << "<text x=\"" << ML - 6 << "\" y=\"" << H - MB
    << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
  std::snprintf(buf, sizeof(buf), "%.3g", ymax);
  f << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 4
    << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
  int ci = 0;
  for (const auto& [name, ys] : series) {
    const char* color = colors[ci % 6];
    f << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    const size_t n = std::min(x.size(), ys.size());
    for (size_t i = 0; i < n; ++i) f << px(x[i]) << "," << py(ys[i]) << " ";
    f << "\"/>\n";
    f << "<text x=\"" << W - MR + 8 << "\" y=\"" << MT + 16 * ci + 12
      << "\" font-size=\"12\" fill=\"" << color << "\">" << name << "</text>\n";
    ++ci;
  }
  f << "</svg>\n";
}

}  // namespace scg
