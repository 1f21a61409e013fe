#include "kscdf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "kscdf/estimators.hpp"
#include "kscdf/io.hpp"
#include "kscdf/normal.hpp"
#include "kscdf/parallel.hpp"
#include "kscdf/theory.hpp"

namespace kscdf {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments_of(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) {
    m.mean = std::numeric_limits<double>::quiet_NaN();
    m.var = m.mean;
    return m;
  }
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size() - 1);
  }
  return m;
}

// The bandwidth a deterministic rule would give, with sd-relative rates
// scaled by the population sd. nullopt for data-dependent rules.
std::optional<double> theory_bandwidth(const BandwidthRule& rule, const TestDensity& d,
                                       std::size_t n) {
  if (const auto* r = std::get_if<FixedRule>(&rule)) return r->h;
  if (const auto* r = std::get_if<RateRule>(&rule)) {
    const double scale = r->absolute ? 1.0 : d.stddev();
    return r->a * scale * std::pow(static_cast<double>(n), -r->eps);
  }
  return std::nullopt;
}

std::optional<double> theory_value(const StudyConfig& cfg, const BandSpec& band,
                                   const BandwidthRule& rule, std::size_t n, double x) {
  if (band.kind != BandKind::ks_simultaneous) return std::nullopt;
  const auto h = theory_bandwidth(rule, cfg.density, n);
  if (!h) return std::nullopt;
  try {
    const AsymptoticContext ctx(cfg.density, cfg.kernel, x, band.constant);
    return inclusion_prob_approx(ctx, static_cast<double>(n), *h);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Z_n(x) across replicates of a fixed-bandwidth study, one value per point.
std::vector<std::vector<double>> z_across_reps(const StudyConfig& cfg, std::size_t n, double h,
                                               const std::vector<double>& xs) {
  const BandwidthRule rule = FixedRule{h};
  std::vector<std::vector<double>> z(xs.size(), std::vector<double>(cfg.reps));
  parallel_for(cfg.reps, worker_count(cfg.threads), [&](std::size_t rep) {
    RngStream stream = replicate_stream(cfg.seed, n, rule, rep);
    const Sample s = sample(cfg.density, n, stream);
    const SmoothedEstimate e(s, cfg.kernel, h);
    for (std::size_t p = 0; p < xs.size(); ++p) z[p][rep] = z_process_eval(e, xs[p], Side::at);
  });
  return z;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

}  // namespace

void StudyConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (n_list.empty()) throw std::invalid_argument("n_list is empty");
  for (std::size_t n : n_list) {
    if (n < 1) throw std::invalid_argument("sample sizes must be positive");
  }
  if (rules.empty()) throw std::invalid_argument("no bandwidth rules");
  for (const auto& r : rules) kscdf::validate(r);
  if (bands.empty()) throw std::invalid_argument("no bands");
  for (const auto& b : bands) {
    if (b.kind == BandKind::bias_corrected) {
      throw std::invalid_argument(
          "bias_corrected bands target F; use corrected_band_coverage instead of run_study");
    }
  }
  if (eval_points.empty() && !global) {
    throw std::invalid_argument("no evaluation points and GLOBAL not requested");
  }
  for (double x : eval_points) {
    if (!std::isfinite(x)) throw std::invalid_argument("evaluation points must be finite");
  }
}

RngStream replicate_stream(std::uint64_t seed, std::size_t n, const BandwidthRule& rule,
                           std::size_t rep) {
  return RngStream(derive_seed(seed, n, hash_label(to_string(rule))), rep);
}

TrialRecord run_trial(const StudyConfig& cfg, std::size_t n, const BandwidthRule& rule,
                      RngStream& stream) {
  TrialRecord rec;
  const Sample s = sample(cfg.density, n, stream);
  try {
    rec.h = resolve(rule, s, cfg.kernel);
  } catch (const std::exception& ex) {
    rec.ok = false;
    rec.error = ex.what();
    return rec;
  }
  const SmoothedEstimate e(s, cfg.kernel, rec.h);
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::size_t points = cfg.eval_points.size();
  rec.z_at.resize(points);
  rec.z_left.resize(points);
  rec.inside.resize(cfg.bands.size() * points);
  for (std::size_t p = 0; p < points; ++p) {
    const double x = cfg.eval_points[p];
    const double value = smoothed_cdf_eval(e, x);
    rec.z_at[p] = root_n * (value - ecdf_eval(s, x, Side::at));
    rec.z_left[p] = root_n * (value - ecdf_eval(s, x, Side::left));
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
      const bool in = band_at(cfg.bands[b], s, x, Side::at).contains(value) &&
                      band_at(cfg.bands[b], s, x, Side::left).contains(value);
      rec.inside[b * points + p] = in ? 1 : 0;
    }
  }
  if (cfg.global) {
    const JumpProfile profile = jump_profile(e);
    rec.z_max = z_max_abs(profile).value;
    rec.global_inside.resize(cfg.bands.size());
    for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
      rec.global_inside[b] = all_jumps_inside(cfg.bands[b], s, profile) ? 1 : 0;
    }
  }
  return rec;
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  const unsigned workers = worker_count(cfg.threads);
  const std::size_t points = cfg.eval_points.size();
  StudyResult result;

  for (std::size_t n : cfg.n_list) {
    for (const auto& rule : cfg.rules) {
      std::vector<TrialRecord> records(cfg.reps);
      parallel_for(cfg.reps, workers, [&](std::size_t rep) {
        RngStream stream = replicate_stream(cfg.seed, n, rule, rep);
        records[rep] = run_trial(cfg, n, rule, stream);
      });

      std::size_t ok = 0;
      double h_sum = 0.0;
      for (const auto& r : records) {
        if (!r.ok) continue;
        ++ok;
        h_sum += r.h;
      }
      const double h_mean = ok ? h_sum / static_cast<double>(ok)
                               : std::numeric_limits<double>::quiet_NaN();

      auto make_row = [&](const BandSpec& band, std::optional<double> x, std::size_t hits,
                          const std::vector<double>& z) {
        StudyRow row;
        row.n = n;
        row.rule = to_string(rule);
        row.band = band.label();
        row.x = x;
        row.reps = cfg.reps;
        row.failures = cfg.reps - ok;
        if (ok > 0) {
          const double p = static_cast<double>(hits) / static_cast<double>(ok);
          row.inclusion = p;
          row.mc_se = std::sqrt(p * (1.0 - p) / static_cast<double>(ok));
        } else {
          row.inclusion = std::numeric_limits<double>::quiet_NaN();
          row.mc_se = row.inclusion;
        }
        const Moments m = moments_of(z);
        row.z_mean = m.mean;
        row.z_var = m.var;
        row.h_mean = h_mean;
        return row;
      };

      for (const auto& band : cfg.bands) {
        const std::size_t b = static_cast<std::size_t>(&band - cfg.bands.data());
        for (std::size_t p = 0; p < points; ++p) {
          std::size_t hits = 0;
          std::vector<double> z;
          z.reserve(ok);
          for (const auto& r : records) {
            if (!r.ok) continue;
            hits += r.inside[b * points + p];
            z.push_back(r.z_at[p]);
          }
          StudyRow row = make_row(band, cfg.eval_points[p], hits, z);
          row.theory = theory_value(cfg, band, rule, n, cfg.eval_points[p]);
          result.rows.push_back(std::move(row));
        }
        if (cfg.global) {
          std::size_t hits = 0;
          std::vector<double> z;
          z.reserve(ok);
          for (const auto& r : records) {
            if (!r.ok) continue;
            hits += r.global_inside[b];
            z.push_back(r.z_max);
          }
          result.rows.push_back(make_row(band, std::nullopt, hits, z));
        }
      }
    }
  }
  return result;
}

void write_csv(const StudyResult& result, std::ostream& out) {
  out << "n,rule,band,x,reps,failures,inclusion,mc_se,theory,z_mean,z_var,h_mean\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << csv_field(r.rule) << ',' << csv_field(r.band) << ','
        << (r.x ? format_number(*r.x) : std::string("GLOBAL")) << ',' << r.reps << ','
        << r.failures << ',' << format_number(r.inclusion) << ',' << format_number(r.mc_se)
        << ',' << (r.theory ? format_number(*r.theory) : std::string()) << ','
        << format_number(r.z_mean) << ',' << format_number(r.z_var) << ','
        << format_number(r.h_mean) << '\n';
  }
}

void write_json(const StudyResult& result, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    nlohmann::json j;
    j["n"] = r.n;
    j["rule"] = r.rule;
    j["band"] = r.band;
    j["x"] = r.x ? json_number(*r.x) : nlohmann::json("GLOBAL");
    j["reps"] = r.reps;
    j["failures"] = r.failures;
    j["inclusion"] = json_number(r.inclusion);
    j["mc_se"] = json_number(r.mc_se);
    j["theory"] = r.theory ? json_number(*r.theory) : nlohmann::json(nullptr);
    j["z_mean"] = json_number(r.z_mean);
    j["z_var"] = json_number(r.z_var);
    j["h_mean"] = json_number(r.h_mean);
    rows.push_back(std::move(j));
  }
  out << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
}

KsTest ks_test_standard_normal(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ks test on an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = normal_cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  KsTest t;
  t.statistic = d;
  t.p_value = std::clamp(1.0 - kolmogorov_cdf((root + 0.12 + 0.11 / root) * d), 0.0, 1.0);
  return t;
}

NormalityReport normality_diagnostic(const StudyConfig& cfg, std::size_t n, double h, double x) {
  if (cfg.reps < 100) throw std::invalid_argument("insufficient replicates");
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  NormalityReport report;
  report.reps = cfg.reps;
  const double nh = static_cast<double>(n) * h;
  if (nh < 10.0) {
    report.warnings.push_back("nh = " + format_number(nh) +
                              " is below 10; the normal limit is not expected to hold");
  }
  const double V = cfg.kernel.moments().V;
  report.scale = std::sqrt(V * cfg.density.pdf(x) * h);
  if (!(report.scale > 0.0)) throw std::domain_error("degenerate normalization");

  const auto z = z_across_reps(cfg, n, h, {x}).front();
  const Moments m = moments_of(z);
  report.z_mean = m.mean;
  report.z_var = m.var;
  report.standardized_var = m.var / (report.scale * report.scale);
  std::vector<double> standardized(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) standardized[i] = (z[i] - m.mean) / report.scale;
  report.ks = ks_test_standard_normal(standardized);
  report.pass = report.ks.p_value >= 0.01;
  return report;
}

CorrelationReport correlation_diagnostic(const StudyConfig& cfg, std::size_t n, double h,
                                         double x, double y) {
  if (cfg.reps < 500) throw std::invalid_argument("insufficient replicates");
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  CorrelationReport report;
  report.reps = cfg.reps;
  const auto z = z_across_reps(cfg, n, h, {x, y});
  const Moments mx = moments_of(z[0]);
  const Moments my = moments_of(z[1]);
  double cov = 0.0;
  for (std::size_t i = 0; i < cfg.reps; ++i) cov += (z[0][i] - mx.mean) * (z[1][i] - my.mean);
  cov /= static_cast<double>(cfg.reps - 1);
  report.correlation = cov / std::sqrt(mx.var * my.var);

  const double V = cfg.kernel.moments().V;
  report.standardized_var_x = mx.var / (V * cfg.density.pdf(x) * h);
  report.standardized_var_y = my.var / (V * cfg.density.pdf(y) * h);
  report.separated = std::abs(x - y) >= 3.0 * h;
  report.asserted = report.separated && cfg.kernel.compact();
  report.pass = !report.asserted || std::abs(report.correlation) <= 0.1;
  return report;
}

CoverageReport corrected_band_coverage(const StudyConfig& cfg, std::size_t n, double level,
                                       std::span<const double> grid) {
  if (cfg.reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (grid.empty()) throw std::invalid_argument("empty grid");
  const std::uint64_t key =
      derive_seed(cfg.seed, n, hash_label("corrected:" + format_number(level)));
  std::vector<std::uint8_t> covered(cfg.reps);
  std::vector<double> h1(cfg.reps);
  std::vector<double> h2(cfg.reps);
  parallel_for(cfg.reps, worker_count(cfg.threads), [&](std::size_t rep) {
    RngStream stream(key, rep);
    const Sample s = sample(cfg.density, n, stream);
    h1[rep] = corrected_band_h1(s, cfg.kernel);
    h2[rep] = corrected_band_h2(s);
    const BandSpec spec = BandSpec::corrected(level, h1[rep], h2[rep]);
    bool all = true;
    for (double x : grid) {
      if (!corrected_band_at(spec, s, cfg.kernel, x).band.contains(cfg.density.cdf(x))) {
        all = false;
        break;
      }
    }
    covered[rep] = all ? 1 : 0;
  });

  CoverageReport report;
  report.reps = cfg.reps;
  std::size_t hits = 0;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    hits += covered[rep];
    report.h1_mean += h1[rep];
    report.h2_mean += h2[rep];
  }
  const double reps = static_cast<double>(cfg.reps);
  report.coverage = static_cast<double>(hits) / reps;
  report.mc_se = std::sqrt(report.coverage * (1.0 - report.coverage) / reps);
  report.h1_mean /= reps;
  report.h2_mean /= reps;
  return report;
}

}  // namespace kscdf
