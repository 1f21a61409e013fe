#include "kscdf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace kscdf {

namespace {

struct SpecText {
  std::string name;
  std::vector<std::string> args;  // comma-separated pieces after ':'
};

SpecText split_spec(std::string_view text) {
  SpecText out;
  const auto colon = text.find(':');
  out.name = std::string(text.substr(0, colon));
  if (colon == std::string_view::npos) return out;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.args.emplace_back(rest.substr(0, comma));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw std::invalid_argument(std::string(what) + ": '" + std::string(text) + "'");
}

// key=value pairs; bare words land in `flags`.
std::map<std::string, double> key_values(const std::vector<std::string>& args,
                                         std::string_view text,
                                         std::vector<std::string>* flags = nullptr) {
  std::map<std::string, double> kv;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      if (!flags) bad("expected key=value", text);
      flags->push_back(a);
      continue;
    }
    kv[a.substr(0, eq)] = parse_number(std::string_view(a).substr(eq + 1), text);
  }
  return kv;
}

void only_keys(const std::map<std::string, double>& kv,
               std::initializer_list<std::string_view> allowed, std::string_view text) {
  for (const auto& [k, v] : kv) {
    bool known = false;
    for (auto a : allowed) known = known || a == k;
    if (!known) bad("unknown parameter '" + k + "'", text);
  }
}

double get(const std::map<std::string, double>& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

// Non-negative JSON integer; nlohmann would otherwise wrap -1 silently.
std::uint64_t count_value(const nlohmann::json& v) {
  if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer, got " + v.dump());
  return v.get<std::uint64_t>();
}

const nlohmann::json& array_value(const nlohmann::json& v) {
  if (!v.is_array()) throw std::invalid_argument("expected an array, got " + v.dump());
  return v;
}

double level_arg(const SpecText& spec, std::string_view text) {
  if (spec.args.empty()) return 0.95;
  if (spec.args.size() != 1) bad("expected a single level", text);
  return parse_number(spec.args.front(), text);
}

}  // namespace

double parse_number(std::string_view text, std::string_view what) {
  std::string_view v = text;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "' in '" +
                                std::string(what) + "'");
  }
  return x;
}

TestDensity parse_density(std::string_view text) {
  const SpecText spec = split_spec(text);
  const auto kv = key_values(spec.args, text);
  if (spec.name == "std_normal" || (spec.name == "normal" && spec.args.empty())) {
    if (spec.name == "std_normal" && !spec.args.empty()) bad("std_normal takes no parameters", text);
    return TestDensity::std_normal();
  }
  if (spec.name == "normal") {
    only_keys(kv, {"mu", "sigma"}, text);
    return TestDensity::normal(get(kv, "mu", 0.0), get(kv, "sigma", 1.0));
  }
  if (spec.name == "uniform") {
    only_keys(kv, {"a", "b"}, text);
    return TestDensity::uniform(get(kv, "a", 0.0), get(kv, "b", 1.0));
  }
  if (spec.name == "mixture") {
    only_keys(kv, {"w", "mu1", "s1", "mu2", "s2"}, text);
    const NormalMixtureDensity d;
    return TestDensity::mixture(get(kv, "w", d.w), get(kv, "mu1", d.mu1), get(kv, "s1", d.s1),
                                get(kv, "mu2", d.mu2), get(kv, "s2", d.s2));
  }
  bad("unknown density", text);
}

BandwidthRule parse_rule(std::string_view text) {
  const SpecText spec = split_spec(text);
  BandwidthRule rule;
  if (spec.name == "fixed") {
    if (spec.args.size() != 1) bad("fixed rule needs one bandwidth", text);
    const std::string& a = spec.args.front();
    const std::string_view v = a.rfind("h=", 0) == 0 ? std::string_view(a).substr(2) : a;
    rule = FixedRule{parse_number(v, text)};
  } else if (spec.name == "rate") {
    std::vector<std::string> flags;
    const auto kv = key_values(spec.args, text, &flags);
    only_keys(kv, {"a", "eps"}, text);
    if (!kv.count("a") || !kv.count("eps")) bad("rate rule needs a= and eps=", text);
    RateRule r{kv.at("a"), kv.at("eps")};
    for (const auto& f : flags) {
      if (f != "absolute") bad("unknown flag '" + f + "'", text);
      r.absolute = true;
    }
    rule = r;
  } else if (spec.name == "quick") {
    rule = QuickRule{level_arg(spec, text)};
  } else if (spec.name == "maxsmooth") {
    rule = MaxSmoothRule{level_arg(spec, text)};
  } else if (spec.name == "ccv") {
    rule = ConstrainedCvRule{level_arg(spec, text)};
  } else {
    bad("unknown bandwidth rule", text);
  }
  validate(rule);
  return rule;
}

BandSpec parse_band(std::string_view text) {
  SpecText spec = split_spec(text);
  std::optional<double> constant;
  std::vector<std::string> rest;
  for (const auto& a : spec.args) {
    if (a.rfind("c=", 0) == 0) {
      constant = parse_number(std::string_view(a).substr(2), text);
    } else {
      rest.push_back(a);
    }
  }
  spec.args = rest;
  const double level = level_arg(spec, text);
  BandKind kind;
  if (spec.name == "ks") {
    kind = BandKind::ks_simultaneous;
  } else if (spec.name == "pointwise") {
    kind = BandKind::pointwise_normal;
  } else if (spec.name == "global") {
    kind = BandKind::global_normal;
  } else {
    bad("unknown band type", text);
  }
  if (constant) return BandSpec::with_constant(kind, level, *constant);
  switch (kind) {
    case BandKind::ks_simultaneous:
      return BandSpec::ks(level);
    case BandKind::pointwise_normal:
      return BandSpec::pointwise(level);
    default:
      return BandSpec::global(level);
  }
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("study config must be a JSON object");
  StudyConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "density") {
        cfg.density = parse_density(value.get<std::string>());
      } else if (key == "kernel") {
        cfg.kernel = Kernel::from_name(value.get<std::string>());
      } else if (key == "bands") {
        for (const auto& b : array_value(value)) cfg.bands.push_back(parse_band(b.get<std::string>()));
      } else if (key == "rules") {
        for (const auto& r : array_value(value)) cfg.rules.push_back(parse_rule(r.get<std::string>()));
      } else if (key == "n") {
        if (value.is_array()) {
          for (const auto& n : value) cfg.n_list.push_back(count_value(n));
        } else {
          cfg.n_list.push_back(count_value(value));
        }
      } else if (key == "reps") {
        cfg.reps = count_value(value);
      } else if (key == "seed") {
        cfg.seed = count_value(value);
      } else if (key == "x") {
        for (const auto& x : array_value(value)) {
          if (x.is_string()) {
            if (x.get<std::string>() != "GLOBAL") bad("unknown evaluation point", x.dump());
            cfg.global = true;
          } else {
            cfg.eval_points.push_back(x.get<double>());
          }
        }
      } else if (key == "global") {
        cfg.global = cfg.global || value.get<bool>();
      } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(count_value(value));
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const nlohmann::json::exception& ex) {
      throw std::invalid_argument("config key '" + key + "': " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw std::invalid_argument("config key '" + key + "': " + ex.what());
    }
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(path + ": " + ex.what());
  }
  return study_config_from_json(j);
}

}  // namespace kscdf
