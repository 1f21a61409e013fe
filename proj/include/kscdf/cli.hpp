#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kscdf::cli {

enum class Format { csv, json };

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  std::vector<double> points() const;
};

// "lo:hi:count" with lo < hi and count >= 1 (count = 1 gives lo).
Grid parse_grid(const std::string& text);

// Thrown for anything that should end with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandConfig {
  std::string subcommand;  // estimate | band | maxsmooth | simulate | theory
  std::string help;        // non-empty when --help was requested
  Format format = Format::csv;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty means stdout

  std::string input;
  std::string kernel = "gaussian";
  std::string bandwidth;
  std::optional<Grid> grid;

  // band
  std::string band_type = "ks";
  double level = 0.95;
  std::optional<double> constant;
  std::optional<double> h1;
  std::optional<double> h2;
  bool at_jumps = false;
  std::string truth;

  // maxsmooth
  bool full_scan = false;

  // simulate
  std::string config;
  std::string density = "normal";
  std::vector<std::string> bands;
  std::vector<std::string> rules;
  std::vector<std::size_t> n_list;
  std::size_t reps = 1000;
  std::vector<std::string> x;
  unsigned threads = 0;

  // theory
  int order = 1;
  double x_point = 1.0;
};

// Throws UsageError for unknown flags, missing required flags and malformed
// values, naming the offender.
CommandConfig parse_args(int argc, const char* const* argv);

// 0 on success, 1 on computation or data errors (message on err).
int run_command(const CommandConfig& cfg, std::ostream& out, std::ostream& err);

// parse_args + run_command with usage errors mapped to exit code 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kscdf::cli
