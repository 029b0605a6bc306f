// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "u6g/distengine.hpp"
#include "u6g/modes.hpp"

namespace u6g {

struct GeoStats;

struct ArrayConfig {
    int n_v = 8;
    int n_h = 8;
    int eta = 1;            // vertical sub-array size
    double pt_dbm = 25.0;   // per RF chain
    double feeder_loss_db = 3.0;
    double tilt_deg = -10.0;
    double ge_dbi = 8.0;
    double psi_3db_deg = 65.0;
    double phi_3db_deg = 65.0;
    double sla_v_db = 30.0;
    double am_db = 30.0;    // front-to-back floor
    double shield_deg = 60.0;
    double spacing = 0.5;   // wavelengths

    void validate() const;
    double eirp_dbm() const;
    // P_T less feeder loss and sub-array split, the power that multiplies |b^H a|^2.
    double effective_power_dbm() const;
    double max_gain_dbi() const;
};

// Table of the two reference configurations (1 or 2).
ArrayConfig reference_array(int config, BsClass b);

struct ServedUeModel {
    double cell_radius = 300.0;
    double micro_radius = 75.0;
    bool indoor = true;
    double outdoor_height = 1.5;
    double min_distance_macro = 10.0;
    double min_distance_micro = 5.0;
    // micro sites on the sector edge, azimuths relative to the macro panel
    std::vector<double> micro_offsets_deg{-40.0, 0.0, 40.0};
    double micro_height = 6.0;
    double macro_min_height = 6.0;
    // Degenerate placements for testing: steer fixed in the panel frame
    // (azimuth relative to the panel, world elevation) and panel facing the
    // mode azimuth minus fixed_panel_offset.
    std::optional<Aod> fixed_steer;
    std::optional<double> fixed_panel_offset;
};

// Element pattern, angles in the panel frame (azimuth off boresight,
// elevation above the tilted boresight).
double element_gain(const Aod& panel_aod, const ArrayConfig& cfg);

// Unit-modulus ULA response, half-wavelength spacing by default.
Eigen::VectorXcd steering_vector(int n, double spacing, double angle_deg);

// |b^H a|^2 of the horizontal and vertical ULAs, linear, in closed form.
// Angles in the panel frame.
double array_factor(const Aod& target_panel, const Aod& steer_panel, const ArrayConfig& cfg);

// Gain toward `target` while steering at `steer`, both in world angles.
// Returns -inf outside the shielding limit.
double beam_gain(const Aod& target, const Aod& steer, double orientation_deg, const ArrayConfig& cfg);

struct GainSample {
    double gain_db; // -inf when shielded
    double h_bs;
};

std::vector<GainSample> sample_gains(const Aod& mode, const ArrayConfig& cfg, const ServedUeModel& ue, BsClass b,
                                     const GeoStats& geo, std::size_t n, std::uint64_t seed);

DbDistribution gain_pdf(const Aod& mode, const ArrayConfig& cfg, const ServedUeModel& ue, BsClass b,
                        const GeoStats& geo, std::size_t n, std::uint64_t seed, double step = 0.25);

} // namespace u6g
