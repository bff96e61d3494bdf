#pragma once

#include <string>
#include <vector>

namespace scg {

// Header row plus numeric columns; '.' decimal separator, UTF-8.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void append_text_file(const std::string& path, const std::string& text);

}  // namespace scg
