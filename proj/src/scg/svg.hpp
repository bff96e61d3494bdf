#pragma once

#include <string>
#include <vector>

namespace scg {

// Minimal hand-emitted line plot: one polyline per series over a shared
// abscissa.  Diagnostics only.
void write_svg_lines(const std::string& path, const std::vector<double>& x,
                     const std::vector<std::pair<std::string, std::vector<double>>>& series,
                     const std::string& title);

}  // namespace scg
