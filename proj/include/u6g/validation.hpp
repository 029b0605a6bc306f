// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "u6g/aggregator.hpp"

namespace u6g {

// In-memory fixtures shared by the validation suite and the tests.
GeoStats fixture_geostats();
ClutterTable fixture_clutter(const GeoStats& geo, std::size_t n_samples = 20000, std::uint64_t seed = 11);

// Q = 10 macro BSs with outdoor UEs, two modes (DP and GR). The GSMI variant
// fixes the occurrences at 0.8 and 0.3 so every count P*Q is an integer.
ScenarioConfig toy_scenario(Method m);
inline constexpr double kToyElevation = 40.0;
inline constexpr double kToySatGain = 20.0;

struct CheckResult {
    std::string name;
    std::string invariant;
    double metric = 0.0;
    double threshold = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

enum class ValidationLevel { Fast, Full };

struct ValidationOptions {
    ValidationLevel level = ValidationLevel::Fast;
    // use the principal branch for a high-order CF instead of unwrapping it
    bool inject_unwrap_fault = false;
    std::uint64_t seed = 1;
};

std::vector<CheckResult> run_validation(const ValidationOptions& opt);
std::string validation_report_json(const std::vector<CheckResult>& r);

// Individual checks, also used by the acceptance binary.
double gp_sup_error_exponential(double points_per_decade = 1024.0);
double gp_sup_error_gamma(double k, double points_per_decade = 1024.0);
// max over p of |mean(Phi^p) / (p mean(Phi)) - 1|
double cf_pow_mean_error(const std::vector<double>& ps);
// sup |Phi_gamma6^(1/6) - Phi_exp| with or without unwrapping
double unwrap_error(bool principal_branch_only);
// max |p_mode - raycast| over random sections and all five modes
double image_vs_raycast(std::size_t n_configs, std::size_t draws, std::uint64_t seed);

} // namespace u6g
