#include "kscdf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kscdf/bands.hpp"
#include "kscdf/bandwidth.hpp"
#include "kscdf/config.hpp"
#include "kscdf/estimators.hpp"
#include "kscdf/io.hpp"
#include "kscdf/simulation.hpp"
#include "kscdf/theory.hpp"

namespace kscdf::cli {

namespace {

struct Cell {
  enum class Kind { number, text, empty };
  Kind kind = Kind::empty;
  double number = 0.0;
  std::string text;

  static Cell num(double v) { return {Kind::number, v, {}}; }
  static Cell str(std::string s) { return {Kind::text, 0.0, std::move(s)}; }
  static Cell none() { return {}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_table(const Table& t, Format format, std::ostream& out) {
  if (format == Format::csv) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        switch (row[c].kind) {
          case Cell::Kind::number:
            out << format_number(row[c].number);
            break;
          case Cell::Kind::text:
            out << csv_text(row[c].text);
            break;
          case Cell::Kind::empty:
            break;
        }
      }
      out << '\n';
    }
    return;
  }
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json j;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (cell.kind == Cell::Kind::number && std::isfinite(cell.number)) {
        const double v = std::stod(format_number(cell.number));
        if (v == std::floor(v) && std::abs(v) < 1e15) {
          j[t.columns[c]] = static_cast<long long>(v);
        } else {
          j[t.columns[c]] = v;
        }
      } else if (cell.kind == Cell::Kind::text) {
        j[t.columns[c]] = cell.text;
      } else {
        j[t.columns[c]] = nullptr;
      }
    }
    rows.push_back(std::move(j));
  }
  out << nlohmann::ordered_json{{"rows", rows}}.dump(2) << '\n';
}

Sample load_sample(const std::string& path) {
  std::vector<double> values = read_values_file(path);
  if (values.empty()) throw std::runtime_error(path + ": empty dataset");
  return Sample(std::move(values));
}

// Default evaluation grid: the data range widened by three bandwidths.
std::vector<double> eval_grid(const CommandConfig& cfg, const Sample& s, double h) {
  if (cfg.grid) return cfg.grid->points();
  return Grid{s.min() - 3.0 * h, s.max() + 3.0 * h, 200}.points();
}

Table estimate_table(const CommandConfig& cfg) {
  const Sample s = load_sample(cfg.input);
  const Kernel kernel = Kernel::from_name(cfg.kernel);
  const double h = resolve(parse_rule(cfg.bandwidth), s, kernel);
  const SmoothedEstimate e(s, kernel, h);
  Table t{{"x", "fhat", "Fhat", "Fn"}, {}};
  for (double x : eval_grid(cfg, s, h)) {
    t.rows.push_back({Cell::num(x), Cell::num(kde_eval(e, x)), Cell::num(smoothed_cdf_eval(e, x)),
                      Cell::num(ecdf_eval(s, x, Side::at))});
  }
  return t;
}

BandSpec band_spec(const CommandConfig& cfg, const Sample& s, const Kernel& kernel) {
  BandKind kind;
  if (cfg.band_type == "ks") {
    kind = BandKind::ks_simultaneous;
  } else if (cfg.band_type == "pointwise") {
    kind = BandKind::pointwise_normal;
  } else if (cfg.band_type == "global") {
    kind = BandKind::global_normal;
  } else {
    const double h1 = cfg.h1 ? *cfg.h1 : corrected_band_h1(s, kernel);
    const double h2 = cfg.h2 ? *cfg.h2 : corrected_band_h2(s);
    BandSpec spec = BandSpec::corrected(cfg.level, h1, h2);
    if (cfg.constant) spec.constant = *cfg.constant;
    return spec;
  }
  if (cfg.constant) return BandSpec::with_constant(kind, cfg.level, *cfg.constant);
  if (kind == BandKind::ks_simultaneous) return BandSpec::ks(cfg.level);
  if (kind == BandKind::pointwise_normal) return BandSpec::pointwise(cfg.level);
  return BandSpec::global(cfg.level);
}

Table band_table(const CommandConfig& cfg, std::ostream& err) {
  const Sample s = load_sample(cfg.input);
  const Kernel kernel = Kernel::from_name(cfg.kernel);
  const BandSpec spec = band_spec(cfg, s, kernel);
  const bool corrected = spec.kind == BandKind::bias_corrected;
  const double h = cfg.bandwidth.empty() ? spec.h1 : resolve(parse_rule(cfg.bandwidth), s, kernel);
  const SmoothedEstimate e(s, kernel, h);

  std::vector<double> xs;
  if (cfg.at_jumps) {
    xs.assign(s.values().begin(), s.values().end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  } else {
    xs = eval_grid(cfg, s, h);
  }

  Table t{{"x", "fhat", "Fhat", "Fn", "lo", "hi", "contained"}, {}};
  if (corrected) {
    const std::optional<TestDensity> truth =
        cfg.truth.empty() ? std::nullopt : std::optional<TestDensity>(parse_density(cfg.truth));
    bool all = true;
    for (double x : xs) {
      const CorrectedBand cb = corrected_band_at(spec, s, kernel, x);
      Cell contained = Cell::none();
      if (truth) {
        const bool in = cb.band.contains(truth->cdf(x));
        all = all && in;
        contained = Cell::num(in ? 1 : 0);
      }
      t.rows.push_back({Cell::num(x), Cell::num(kde_eval(e, x)), Cell::num(smoothed_cdf_eval(e, x)),
                        Cell::num(ecdf_eval(s, x, Side::at)), Cell::num(cb.band.lo),
                        Cell::num(cb.band.hi), contained});
    }
    err << "corrected band: h1=" << format_number(spec.h1) << " h2=" << format_number(spec.h2)
        << " c=" << format_number(spec.constant);
    if (truth) err << " covers " << truth->describe() << ": " << (all ? "yes" : "no");
    err << '\n';
    return t;
  }

  // Per-row flags cover the requested points; the summary also covers every
  // jump candidate, where the ks band decision is exact.
  const MembershipReport report = contains(spec, e, EvalSet{xs, true});
  std::map<double, bool> inside;
  const MembershipReport rows = contains(spec, e, EvalSet::at(xs));
  for (const auto& p : rows.points) {
    auto [it, fresh] = inside.emplace(p.x, p.inside);
    if (!fresh) it->second = it->second && p.inside;
  }
  for (double x : xs) {
    const BandInterval b = band_at(spec, s, x, Side::at);
    const auto it = inside.find(x);
    t.rows.push_back({Cell::num(x), Cell::num(kde_eval(e, x)), Cell::num(smoothed_cdf_eval(e, x)),
                      Cell::num(ecdf_eval(s, x, Side::at)), Cell::num(b.lo), Cell::num(b.hi),
                      it == inside.end() ? Cell::none() : Cell::num(it->second ? 1 : 0)});
  }
  err << spec.label() << " h=" << format_number(h) << ": ";
  if (report.all_inside) {
    err << "contained at all " << report.points.size() << " checked points\n";
  } else {
    const auto& v = *report.first_violation;
    err << "first violation at x=" << format_number(v.x)
        << (v.side == Side::left ? " (left limit)" : "") << '\n';
  }
  return t;
}

Table maxsmooth_table(const CommandConfig& cfg) {
  const Sample s = load_sample(cfg.input);
  MaxSmoothOptions options;
  options.full_scan = cfg.full_scan;
  const MaxSmoothResult r =
      max_smoothing_bandwidth(s, Kernel::from_name(cfg.kernel), cfg.level, options);
  Table t{{"h_hat", "level", "c", "n", "max_abs_z", "argmax", "brackets"}, {}};
  t.rows.push_back({Cell::num(r.h), Cell::num(cfg.level), Cell::num(r.c),
                    Cell::num(static_cast<double>(s.size())), Cell::num(r.max_abs_z),
                    Cell::num(r.argmax), Cell::num(static_cast<double>(r.brackets.size()))});
  return t;
}

StudyConfig study_config(const CommandConfig& cfg) {
  StudyConfig study;
  if (!cfg.config.empty()) {
    study = load_study_config(cfg.config);
  } else {
    study.density = parse_density(cfg.density);
    study.kernel = Kernel::from_name(cfg.kernel);
    for (const auto& b : cfg.bands) study.bands.push_back(parse_band(b));
    if (study.bands.empty()) study.bands.push_back(BandSpec::ks(0.95));
    for (const auto& r : cfg.rules) study.rules.push_back(parse_rule(r));
    study.n_list = cfg.n_list;
    study.reps = cfg.reps;
    for (const auto& x : cfg.x) {
      if (x == "GLOBAL") {
        study.global = true;
      } else {
        study.eval_points.push_back(parse_number(x, "--x"));
      }
    }
    study.threads = cfg.threads;
  }
  if (cfg.seed) study.seed = *cfg.seed;
  study.validate();
  return study;
}

Table theory_table(const CommandConfig& cfg) {
  const TestDensity density = parse_density(cfg.density);
  const Kernel kernel = Kernel::from_name(cfg.kernel);
  const double c = cfg.constant ? *cfg.constant : ks_quantile(cfg.level);
  const AsymptoticContext ctx(density, kernel, cfg.x_point, c);
  const BandwidthRule rule = parse_rule(cfg.bandwidth);

  Table t{{"n", "h", "mean", "var", "pi"}, {}};
  for (std::size_t n : cfg.n_list) {
    double h = 0.0;
    if (const auto* r = std::get_if<FixedRule>(&rule)) {
      h = r->h;
    } else {
      const auto& rr = std::get<RateRule>(rule);
      h = rr.a * (rr.absolute ? 1.0 : density.stddev()) * std::pow(static_cast<double>(n), -rr.eps);
    }
    const double nd = static_cast<double>(n);
    t.rows.push_back({Cell::num(nd), Cell::num(h), Cell::num(mean_z_leading(ctx, nd, h)),
                      Cell::num(var_z_expansion(ctx, h, cfg.order)),
                      Cell::num(inclusion_prob_approx(ctx, nd, h))});
  }
  return t;
}

void check_choice(const std::string& value, std::initializer_list<const char*> choices,
                  const std::string& flag) {
  for (const char* c : choices) {
    if (value == c) return;
  }
  throw UsageError(flag + ": invalid value '" + value + "'");
}

// Parses rule/band/density strings up front so that bad values are usage errors.
void validate_strings(const CommandConfig& cfg) {
  try {
    if (!cfg.bandwidth.empty()) parse_rule(cfg.bandwidth);
    for (const auto& b : cfg.bands) parse_band(b);
    for (const auto& r : cfg.rules) parse_rule(r);
    if (cfg.subcommand == "simulate" || cfg.subcommand == "theory") parse_density(cfg.density);
    if (!cfg.truth.empty()) parse_density(cfg.truth);
    Kernel::from_name(cfg.kernel);
    for (const auto& x : cfg.x) {
      if (x != "GLOBAL") parse_number(x, "--x");
    }
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
}

}  // namespace

std::vector<double> Grid::points() const {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) {
    xs[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return xs;
}

Grid parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) throw UsageError("--grid: expected lo:hi:count, got '" + text + "'");
  Grid g;
  try {
    g.lo = parse_number(std::string_view(text).substr(0, first), text);
    g.hi = parse_number(std::string_view(text).substr(first + 1, second - first - 1), text);
    const double count = parse_number(std::string_view(text).substr(second + 1), text);
    if (count < 1 || count != std::floor(count) || count > 1e8) {
      throw std::invalid_argument("count must be a positive integer");
    }
    g.count = static_cast<std::size_t>(count);
  } catch (const std::invalid_argument& ex) {
    throw UsageError("--grid '" + text + "': " + ex.what());
  }
  if (!(g.lo < g.hi) && !(g.count == 1 && g.lo == g.hi)) {
    throw UsageError("--grid '" + text + "': need lo < hi");
  }
  return g;
}

namespace {

constexpr const char* kDensityHelp =
    "normal | normal:mu=,sigma= | uniform:a=,b= | mixture:w=,mu1=,s1=,mu2=,s2=";
constexpr const char* kRuleHelp =
    "fixed:H | rate:a=,eps=[,absolute] (a times sd unless absolute) | quick:L | maxsmooth:L | ccv:L";

}  // namespace

CommandConfig parse_args(int argc, const char* const* argv) {
  CommandConfig cfg;
  CLI::App app{"Smoothed empirical cdf estimates, confidence bands and bandwidths", "kscdf"};
  app.require_subcommand(1);
  std::string format = "csv";
  std::string grid;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output file (default stdout)");
  };
  auto data = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "data file, one number per line")->required();
    sub->add_option("--kernel", cfg.kernel, "gaussian or epanechnikov");
  };

  auto* estimate = app.add_subcommand("estimate", "kde, smoothed cdf and ecdf on a grid");
  data(estimate);
  common(estimate);
  estimate->add_option("--bandwidth", cfg.bandwidth, kRuleHelp)->required();
  estimate->add_option("--grid", grid, "lo:hi:count");

  auto* band = app.add_subcommand("band", "confidence band and membership of the smoothed cdf");
  data(band);
  common(band);
  band->add_option("--bandwidth", cfg.bandwidth, std::string(kRuleHelp) + "; defaults to h1 for corrected");
  band->add_option("--grid", grid, "lo:hi:count");
  band->add_option("--type", cfg.band_type, "ks, pointwise, global or corrected");
  band->add_option("--level", cfg.level, "confidence level");
  band->add_option("--constant", cfg.constant, "critical constant override");
  band->add_option("--h1", cfg.h1, "corrected band smoothing bandwidth");
  band->add_option("--h2", cfg.h2, "corrected band derivative bandwidth");
  band->add_flag("--at-jumps", cfg.at_jumps, "evaluate at every distinct observation");
  band->add_option("--truth", cfg.truth, std::string("density whose cdf the corrected band should cover: ") + kDensityHelp);

  auto* maxsmooth = app.add_subcommand("maxsmooth", "maximum smoothing bandwidth");
  data(maxsmooth);
  common(maxsmooth);
  maxsmooth->add_option("--level", cfg.level, "confidence level");
  maxsmooth->add_flag("--full-scan", cfg.full_scan, "report every sign change on the grid");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo inclusion study");
  common(simulate);
  simulate->add_option("--config", cfg.config, "JSON study config");
  simulate->add_option("--seed", cfg.seed, "64-bit seed (overrides the config)");
  simulate->add_option("--density", cfg.density, kDensityHelp);
  simulate->add_option("--kernel", cfg.kernel, "gaussian or epanechnikov");
  simulate->add_option("--band", cfg.bands, "ks:L | pointwise:L | global:L, optional ,c=C; repeatable");
  simulate->add_option("--rule", cfg.rules, std::string(kRuleHelp) + "; repeatable");
  simulate->add_option("--n", cfg.n_list, "sample size, repeatable");
  simulate->add_option("--reps", cfg.reps, "replicates per cell");
  simulate->add_option("--x", cfg.x, "evaluation point or GLOBAL, repeatable");
  simulate->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

  auto* theory = app.add_subcommand("theory", "asymptotic mean, variance and inclusion");
  common(theory);
  theory->add_option("--density", cfg.density, kDensityHelp);
  theory->add_option("--kernel", cfg.kernel, "gaussian or epanechnikov");
  theory->add_option("--x", cfg.x_point, "evaluation point");
  theory->add_option("--level", cfg.level, "confidence level");
  theory->add_option("--constant", cfg.constant, "critical constant override");
  theory->add_option("--n", cfg.n_list, "sample size, repeatable")->required();
  theory->add_option("--bandwidth", cfg.bandwidth, "fixed or rate rule")->required();
  theory->add_option("--order", cfg.order, "variance expansion order")->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cfg.help = app.help();
    for (auto* sub : app.get_subcommands()) cfg.help = sub->help();
    return cfg;
  } catch (const CLI::ParseError& ex) {
    throw UsageError(ex.what());
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::json : Format::csv;
  if (!grid.empty()) cfg.grid = parse_grid(grid);

  check_choice(cfg.band_type, {"ks", "pointwise", "global", "corrected"}, "--type");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  if (cfg.subcommand == "band" && cfg.band_type != "corrected" && cfg.bandwidth.empty()) {
    throw UsageError("--bandwidth is required for --type " + cfg.band_type);
  }
  if (cfg.subcommand == "simulate" && cfg.config.empty()) {
    if (cfg.rules.empty()) throw UsageError("simulate needs --config or at least one --rule");
    if (cfg.n_list.empty()) throw UsageError("simulate needs --config or at least one --n");
    if (cfg.x.empty()) throw UsageError("simulate needs --config or at least one --x");
  }
  if (cfg.subcommand == "theory") {
    validate_strings(cfg);
    const auto rule = parse_rule(cfg.bandwidth);
    if (!std::holds_alternative<FixedRule>(rule) && !std::holds_alternative<RateRule>(rule)) {
      throw UsageError("theory needs a fixed or rate bandwidth rule, got '" + cfg.bandwidth + "'");
    }
  }
  validate_strings(cfg);
  return cfg;
}

int run_command(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.help.empty()) {
    out << cfg.help;
    return 0;
  }
  try {
    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw std::runtime_error("cannot write " + cfg.out);
    }
    std::ostream& sink = cfg.out.empty() ? out : file;

    if (cfg.subcommand == "simulate") {
      const StudyResult result = run_study(study_config(cfg));
      if (cfg.format == Format::json) {
        write_json(result, sink);
      } else {
        write_csv(result, sink);
      }
      std::size_t failures = 0;
      for (const auto& r : result.rows) failures = std::max(failures, r.failures);
      if (failures > 0) {
        err << "warning: bandwidth resolution failed in up to " << failures
            << " replicates per cell\n";
      }
    } else {
      Table t;
      if (cfg.subcommand == "estimate") {
        t = estimate_table(cfg);
      } else if (cfg.subcommand == "band") {
        t = band_table(cfg, err);
      } else if (cfg.subcommand == "maxsmooth") {
        t = maxsmooth_table(cfg);
      } else {
        t = theory_table(cfg);
      }
      write_table(t, cfg.format, sink);
    }
    sink.flush();
    if (!sink) throw std::runtime_error("write failed");
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CommandConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return 2;
  }
  return run_command(cfg, out, err);
}

}  // namespace kscdf::cli
