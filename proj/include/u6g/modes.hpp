// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "u6g/common.hpp"

namespace u6g {

struct GeoStats;

enum class ModeTag { DP, SB, DB, GR, GB };
enum class BsClass { Micro, Macro };
enum class ModeSign { Positive, Negative };

inline constexpr std::array<ModeTag, 5> kAllModes{ModeTag::DP, ModeTag::SB, ModeTag::DB, ModeTag::GR, ModeTag::GB};

std::string to_string(ModeTag m);
ModeTag mode_from_string(const std::string& s);
std::string to_string(BsClass b);
ModeSign mode_sign(ModeTag m);
// Modes that involve a ground or building reflection.
bool mode_reflects(ModeTag m);

struct Aod {
    double azimuth_deg = 0.0;   // clockwise from north, (-180, 180]
    double elevation_deg = 0.0; // (-90, 90], negative toward the ground
};

// Departure direction of a mode toward a satellite seen at (psi_s, phi_s).
Aod mode_aod(ModeTag m, double psi_s_deg, double phi_s_deg);

// Modes available to a BS class; rooftop macros see no building-first paths.
std::vector<ModeTag> mode_set(BsClass b);

// Two-building street section along the satellite azimuth. Building 1 sits
// d1 behind the BS, building 2 d2 in front (toward the satellite).
struct CrossSection {
    double d1 = 0.0;
    double d2 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double h_bs = 0.0;
    double psi_deg = 0.0;
};

// P(h <= v). Must be non-decreasing with F(v) = 0 for v < 0.
using HeightCdf = std::function<double(double)>;

double p_direct(const CrossSection& cs, const HeightCdf& F);
// Heights h1, h2 are integrated out through F.
double p_mode(ModeTag m, const CrossSection& cs, const HeightCdf& F);

struct OccurrenceOptions {
    std::size_t n_samples = 20000;
    std::uint64_t seed = 1;
    // draw d1 and d2 from separate streets instead of splitting one
    bool independent_streets = false;
    double micro_height = 6.0;
    double macro_min_height = 6.0;
};

// Samples h_BS for a class: micro fixed, macro the tallest of three draws.
double sample_bs_height(BsClass b, const GeoStats& geo, double phi_s_deg, Rng& rng, double micro_height = 6.0,
                        double macro_min_height = 6.0);

double mean_occurrence(ModeTag m, const GeoStats& geo, BsClass b, double psi_s_deg, double phi_s_deg,
                       const OccurrenceOptions& opt = {});

// Brute-force 2D ray construction: launches the mode's ray, reflects it off
// whatever it meets and checks that the bounce sequence matches the mode.
// Heights are drawn n times from `sample_height`.
double raycast_oracle(ModeTag m, const CrossSection& cs, const std::function<double(Rng&)>& sample_height,
                      std::size_t n, std::uint64_t seed);
// Single deterministic trace with the heights in cs.
bool raycast_path_exists(ModeTag m, const CrossSection& cs);

} // namespace u6g
