#pragma once

#include <istream>
#include <string>
#include <vector>

namespace kscdf {

// Nine significant digits, the fixed precision of every CSV/JSON output.
std::string format_number(double v);

// Newline-separated decimal numbers. Blank lines and lines starting with '#'
// are skipped; CRLF endings are accepted. Throws std::runtime_error naming
// the line number of the first non-numeric line.
std::vector<double> read_values(std::istream& in);
std::vector<double> read_values_file(const std::string& path);

}  // namespace kscdf
