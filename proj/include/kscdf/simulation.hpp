#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kscdf/bands.hpp"
#include "kscdf/bandwidth.hpp"
#include "kscdf/densities.hpp"
#include "kscdf/kernels.hpp"
#include "kscdf/rng.hpp"

namespace kscdf {

struct StudyConfig {
  TestDensity density = TestDensity::std_normal();
  Kernel kernel = Kernel::gaussian();
  std::vector<BandSpec> bands;
  std::vector<BandwidthRule> rules;
  std::vector<std::size_t> n_list;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  std::vector<double> eval_points;
  bool global = false;  // also test membership at every jump candidate
  unsigned threads = 0;

  // Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

// Outcome of one replicate for one (n, rule) cell.
struct TrialRecord {
  bool ok = true;
  std::string error;
  double h = 0.0;
  std::vector<double> z_at;    // Z_n(x) per eval point
  std::vector<double> z_left;  // Z_n(x-) per eval point
  // inside[b * points + p]: Fhat_h in band b at point p on both sides.
  std::vector<std::uint8_t> inside;
  double z_max = 0.0;                        // global only
  std::vector<std::uint8_t> global_inside;  // per band, global only
};

// Independent stream for replicate `rep` of the (n, rule) cell. Adding rules
// or sample sizes leaves every other cell's stream unchanged.
RngStream replicate_stream(std::uint64_t seed, std::size_t n, const BandwidthRule& rule,
                           std::size_t rep);

// Draws a sample, resolves h, evaluates Z_n and band membership. Bandwidth
// failures are returned as ok = false, never thrown.
TrialRecord run_trial(const StudyConfig& cfg, std::size_t n, const BandwidthRule& rule,
                      RngStream& stream);

struct StudyRow {
  std::size_t n = 0;
  std::string rule;
  std::string band;
  std::optional<double> x;  // nullopt for the GLOBAL row
  std::size_t reps = 0;
  std::size_t failures = 0;
  double inclusion = 0.0;
  double mc_se = 0.0;
  std::optional<double> theory;
  double z_mean = 0.0;  // of Z_n(x), or of max|Z_n| for GLOBAL rows
  double z_var = 0.0;
  double h_mean = 0.0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
};

// Aggregates run_trial over n_list x rules x reps. Output depends only on
// the config, never on the thread schedule.
StudyResult run_study(const StudyConfig& cfg);

// CSV header: n,rule,band,x,reps,failures,inclusion,mc_se,theory,z_mean,z_var,h_mean
void write_csv(const StudyResult& result, std::ostream& out);
void write_json(const StudyResult& result, std::ostream& out);

struct KsTest {
  double statistic = 0.0;
  double p_value = 1.0;
};
// One-sample KS test against N(0, 1), asymptotic p-value with Stephens'
// small-sample correction.
KsTest ks_test_standard_normal(std::span<const double> values);

struct NormalityReport {
  std::size_t reps = 0;
  double scale = 0.0;  // sqrt(V f(x) h)
  double z_mean = 0.0;
  double z_var = 0.0;
  double standardized_var = 0.0;
  KsTest ks;
  bool pass = false;  // p >= 0.01
  std::vector<std::string> warnings;
};

// Standardizes Z_n(x) across replicates by the empirical mean and the
// theoretical scale sqrt(V f(x) h) and tests the result against N(0, 1).
// Throws std::invalid_argument("insufficient replicates") for reps < 100.
NormalityReport normality_diagnostic(const StudyConfig& cfg, std::size_t n, double h, double x);

struct CorrelationReport {
  std::size_t reps = 0;
  double correlation = 0.0;
  double standardized_var_x = 0.0;
  double standardized_var_y = 0.0;
  bool separated = false;  // |x - y| >= 3h
  bool asserted = false;   // separated and the kernel is compact
  bool pass = true;        // |corr| <= 0.1 whenever asserted
};

// Empirical correlation of Z_n(x) and Z_n(y) across replicates. Throws
// std::invalid_argument for reps < 500.
CorrelationReport correlation_diagnostic(const StudyConfig& cfg, std::size_t n, double h,
                                         double x, double y);

struct CoverageReport {
  std::size_t reps = 0;
  double coverage = 0.0;
  double mc_se = 0.0;
  double h1_mean = 0.0;
  double h2_mean = 0.0;
};

// Fraction of replicates whose bias-corrected band (plug-in h1, h2) contains
// the true F at every grid point.
CoverageReport corrected_band_coverage(const StudyConfig& cfg, std::size_t n, double level,
                                       std::span<const double> grid);

}  // namespace kscdf
