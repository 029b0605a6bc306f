// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace u6g {

struct SatGeometry {
    double longitude_deg = 5.0;
    double earth_radius_km = 6371.0;
    double orbit_radius_km = 42164.0;
    double max_gain_dbi = 22.0;
    double beamwidth_deg = 15.0;
    // Near-in sidelobe level relative to peak (single-feed circular beam).
    double sidelobe_ls_db = -20.0;
};

struct LinkTerms {
    double path_loss_db = 0.0;
    double pol_loss_db = 0.0;
    double sat_gain_dbi = 0.0;
    double alpha_db = 0.0;
};

struct SatView {
    double elevation_deg;
    double off_nadir_deg;
    double slant_range_m;
};

double fspl(double distance_m, double frequency_hz);

// Single-feed circular beam pattern, 0 dBi floor.
double sat_gain(double off_nadir_deg, const SatGeometry& geom);

SatView elevation_and_offnadir(double lat_deg, double lon_deg, const SatGeometry& geom);

double noise_floor(double t_sys_k, double bandwidth_hz);

LinkTerms compose_link(double sat_gain_dbi, double path_loss_db, double pol_loss_db);

// Peak EIRP of a panel (dBm).
double eirp_dbm(double pt_dbm, int n_v, int n_h, int eta, double feeder_loss_db);

} // namespace u6g
