#include "scg/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace scg {

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\n";
  f.precision(12);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << "\n";
  }
}

void append_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace scg
