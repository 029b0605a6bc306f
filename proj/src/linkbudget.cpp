// SPDX-License-Identifier: Apache-2.0
#include "u6g/linkbudget.hpp"

#include <algorithm>
#include <cmath>

#include "u6g/common.hpp"

namespace u6g {

double fspl(double distance_m, double frequency_hz)
{
    if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
        throw ValidationError("fspl: distance and frequency must be positive");
    return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kLightSpeed);
}

double sat_gain(double off_nadir_deg, const SatGeometry& geom)
{
    if (off_nadir_deg < 0.0 || off_nadir_deg > 90.0)
        throw ValidationError("sat_gain: off-nadir angle outside [0, 90]");
    const double psi0 = geom.beamwidth_deg / 2.0;
    const double ls = geom.sidelobe_ls_db;
    const double a = std::sqrt(-ls / 3.0);
    // the plateau ends at 6.32 psi0 for every tabulated LS
    const double b = 6.32;
    const double r = off_nadir_deg / psi0;
    double g;
    if (r <= a)
        g = geom.max_gain_dbi - 3.0 * r * r;
    else if (r <= b)
        g = geom.max_gain_dbi + ls;
    else
        g = geom.max_gain_dbi + ls + 20.0 - 25.0 * std::log10(r);
    return std::max(g, 0.0);
}

SatView elevation_and_offnadir(double lat_deg, double lon_deg, const SatGeometry& geom)
{
    if (std::abs(lat_deg) > 90.0)
        throw ValidationError("elevation_and_offnadir: |lat| > 90");
    const double re = geom.earth_radius_km;
    const double ro = geom.orbit_radius_km;
    const double cg = std::clamp(std::cos(deg2rad(lat_deg)) * std::cos(deg2rad(lon_deg - geom.longitude_deg)), -1.0, 1.0);
    const double sg = std::sqrt(std::max(0.0, 1.0 - cg * cg));
    const double slant = std::sqrt(re * re + ro * ro - 2.0 * re * ro * cg);
    if (sg == 0.0)
        return {90.0, 0.0, slant * 1e3};
    const double el = rad2deg(std::atan2(cg - re / ro, sg));
    const double off = rad2deg(std::asin(std::clamp(re * sg / slant, -1.0, 1.0)));
    return {el, off, slant * 1e3};
}

double noise_floor(double t_sys_k, double bandwidth_hz)
{
    if (!(t_sys_k > 0.0) || !(bandwidth_hz > 0.0))
        throw ValidationError("noise_floor: T_sys and B must be positive");
    return 10.0 * std::log10(kBoltzmann * t_sys_k * bandwidth_hz) + 30.0;
}

LinkTerms compose_link(double sat_gain_dbi, double path_loss_db, double pol_loss_db)
{
    return {path_loss_db, pol_loss_db, sat_gain_dbi, sat_gain_dbi - path_loss_db - pol_loss_db};
}

double eirp_dbm(double pt_dbm, int n_v, int n_h, int eta, double feeder_loss_db)
{
    const double n2 = static_cast<double>(n_v) * n_v * n_h * n_h;
    return pt_dbm + 10.0 * std::log10(n2 / eta) - feeder_loss_db;
}

} // namespace u6g
