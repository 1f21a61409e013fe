#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "kscdf/bands.hpp"
#include "kscdf/bandwidth.hpp"
#include "kscdf/densities.hpp"
#include "kscdf/simulation.hpp"

namespace kscdf {

// Text forms shared by the CLI and study config files. All throw
// std::invalid_argument naming the offending text.

// "normal", "std_normal", "normal:mu=0,sigma=1", "uniform:a=0,b=1",
// "mixture:w=0.5,mu1=-1,s1=0.5,mu2=1,s2=0.5". Omitted keys keep defaults.
TestDensity parse_density(std::string_view text);

// "fixed:0.3", "rate:a=1.059,eps=0.2[,absolute]", "quick:0.95",
// "maxsmooth:0.9", "ccv:0.9". The level may be omitted (0.95).
BandwidthRule parse_rule(std::string_view text);

// "ks:0.95", "pointwise:0.9", "global:0.95", each with an optional ",c=..."
// overriding the critical constant.
BandSpec parse_band(std::string_view text);

// Strict decimal parse of the whole string.
double parse_number(std::string_view text, std::string_view what);

// Study config from JSON:
//   {"density": "normal", "kernel": "gaussian", "bands": ["ks:0.95"],
//    "rules": ["rate:a=3,eps=0.2,absolute"], "n": [100, 1000], "reps": 2000,
//    "seed": 1, "x": [1.0, "GLOBAL"], "threads": 0}
// Unknown keys are rejected. The result is validated.
StudyConfig study_config_from_json(const nlohmann::json& j);
StudyConfig load_study_config(const std::string& path);

}  // namespace kscdf
