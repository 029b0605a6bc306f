// SPDX-License-Identifier: Apache-2.0
#include "u6g/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "u6g/geomstats.hpp"
#include "u6g/linkbudget.hpp"

namespace u6g {

void ArrayConfig::validate() const
{
    if (n_v <= 0 || n_h <= 0 || eta <= 0)
        throw ValidationError("array: N_V, N_H and eta must be positive");
    if (n_v % eta != 0)
        throw ValidationError("array: eta must divide N_V");
    if (!(psi_3db_deg > 0.0) || !(phi_3db_deg > 0.0))
        throw ValidationError("array: beamwidths must be positive");
    if (!(spacing > 0.0))
        throw ValidationError("array: element spacing must be positive");
    if (shield_deg <= 0.0 || shield_deg > 180.0)
        throw ValidationError("array: shielding half-angle must be in (0, 180]");
}

double ArrayConfig::eirp_dbm() const { return u6g::eirp_dbm(pt_dbm, n_v, n_h, eta, feeder_loss_db); }

double ArrayConfig::effective_power_dbm() const { return pt_dbm - feeder_loss_db - 10.0 * std::log10(eta); }

double ArrayConfig::max_gain_dbi() const
{
    return 10.0 * std::log10(static_cast<double>(n_h) * n_h * n_v * n_v) + ge_dbi;
}

ArrayConfig reference_array(int config, BsClass b)
{
    ArrayConfig c;
    const bool macro = b == BsClass::Macro;
    if (config == 1) {
        c.n_h = macro ? 8 : 4;
        c.n_v = 8;
        c.eta = 1;
        c.pt_dbm = macro ? 25.0 : 19.0;
    } else if (config == 2) {
        c.n_h = 8;
        c.n_v = macro ? 16 : 8;
        c.eta = 2;
        c.pt_dbm = macro ? 22.0 : 16.0;
    } else {
        throw ValidationError("reference_array: config must be 1 or 2");
    }
    return c;
}

double element_gain(const Aod& a, const ArrayConfig& cfg)
{
    const double ah = -std::min(12.0 * std::pow(a.azimuth_deg / cfg.phi_3db_deg, 2), cfg.am_db);
    const double av = -std::min(12.0 * std::pow(a.elevation_deg / cfg.psi_3db_deg, 2), cfg.sla_v_db);
    return cfg.ge_dbi - std::min(-(ah + av), cfg.am_db);
}

Eigen::VectorXcd steering_vector(int n, double spacing, double angle_deg)
{
    const double k = 2.0 * kPi * spacing * std::sin(deg2rad(angle_deg));
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = std::polar(1.0, k * i);
    return v;
}

namespace {

// |sum_i e^{i n d}|^2 over n elements
double dirichlet(int n, double d)
{
    const double s = std::sin(d / 2.0);
    if (std::abs(s) < 1e-9)
        return static_cast<double>(n) * n;
    const double t = std::sin(n * d / 2.0) / s;
    return t * t;
}

} // namespace

double array_factor(const Aod& t, const Aod& s, const ArrayConfig& cfg)
{
    const double k = 2.0 * kPi * cfg.spacing;
    const double dh = k * (std::sin(deg2rad(t.azimuth_deg)) - std::sin(deg2rad(s.azimuth_deg)));
    const double dv = k * (std::sin(deg2rad(t.elevation_deg)) - std::sin(deg2rad(s.elevation_deg)));
    return dirichlet(cfg.n_h, dh) * dirichlet(cfg.n_v, dv);
}

double beam_gain(const Aod& target, const Aod& steer, double orientation_deg, const ArrayConfig& cfg)
{
    const double steer_rel = wrap180(steer.azimuth_deg - orientation_deg);
    if (std::abs(steer_rel) > cfg.shield_deg + 1e-9)
        throw ValidationError("beam_gain: steering direction outside the panel's shielding limit");
    const double target_rel = wrap180(target.azimuth_deg - orientation_deg);
    if (std::abs(target_rel) > cfg.shield_deg)
        return -std::numeric_limits<double>::infinity();
    const Aod tp{target_rel, target.elevation_deg - cfg.tilt_deg};
    const Aod sp{steer_rel, steer.elevation_deg - cfg.tilt_deg};
    const double af = array_factor(tp, sp, cfg);
    if (af <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(af) + element_gain(tp, cfg);
}

std::vector<GainSample> sample_gains(const Aod& mode, const ArrayConfig& cfg, const ServedUeModel& ue, BsClass b,
                                     const GeoStats& geo, std::size_t n, std::uint64_t seed)
{
    cfg.validate();
    if (n == 0)
        throw ValidationError("sample_gains: need at least one sample");
    std::vector<GainSample> out(n);
    constexpr std::size_t chunk = 2048;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    const double sector = std::min(cfg.shield_deg, 60.0);

    parallel_for(nchunks, [&](std::size_t c) {
        Rng rng(derive_seed(seed, 0xa27e, c));
        const std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const double h_bs =
                sample_bs_height(b, geo, mode.azimuth_deg, rng, ue.micro_height, ue.macro_min_height);

            // panel orientation
            double rho;
            if (ue.fixed_panel_offset) {
                rho = mode.azimuth_deg - *ue.fixed_panel_offset;
            } else if (b == BsClass::Macro) {
                // tri-sector site: the panel whose sector holds the mode
                const double rho0 = rng.uniform(0.0, 360.0);
                rho = rho0;
                for (int k = 0; k < 3; ++k) {
                    const double cand = rho0 + 120.0 * k;
                    if (std::abs(wrap180(mode.azimuth_deg - cand)) <= 60.0) {
                        rho = cand;
                        break;
                    }
                }
            } else {
                rho = rng.uniform(0.0, 360.0);
            }

            // served UE
            Aod steer;
            if (ue.fixed_steer) {
                steer = {wrap180(rho + ue.fixed_steer->azimuth_deg), ue.fixed_steer->elevation_deg};
            } else {
                double h_ue = ue.outdoor_height;
                if (ue.indoor) {
                    const double h = geo.marginal.height.sample(rng);
                    h_ue = rng.uniform(ue.outdoor_height, std::max(ue.outdoor_height, h));
                }
                double r, rel;
                if (b == BsClass::Micro) {
                    const double r0 = ue.min_distance_micro, r1 = ue.micro_radius;
                    r = std::sqrt(rng.uniform(r0 * r0, r1 * r1));
                    rel = rng.uniform(-sector, sector);
                } else {
                    const double r0 = ue.min_distance_macro, r1 = ue.cell_radius;
                    for (int tries = 0;; ++tries) {
                        r = std::sqrt(rng.uniform(r0 * r0, r1 * r1));
                        rel = rng.uniform(-sector, sector);
                        const Point p(r * std::sin(deg2rad(rel)), r * std::cos(deg2rad(rel)));
                        bool in_micro = false;
                        for (double off : ue.micro_offsets_deg) {
                            const Point m(r1 * std::sin(deg2rad(off)), r1 * std::cos(deg2rad(off)));
                            if ((p - m).norm() < ue.micro_radius)
                                in_micro = true;
                        }
                        if (!in_micro || tries > 1000)
                            break;
                    }
                }
                steer = {wrap180(rho + rel), rad2deg(std::atan2(h_ue - h_bs, r))};
            }
            out[i] = {beam_gain(mode, steer, rho, cfg), h_bs};
        }
    });
    return out;
}

DbDistribution gain_pdf(const Aod& mode, const ArrayConfig& cfg, const ServedUeModel& ue, BsClass b,
                        const GeoStats& geo, std::size_t n, std::uint64_t seed, double step)
{
    const auto s = sample_gains(mode, cfg, ue, b, geo, n, seed);
    std::vector<double> g;
    g.reserve(s.size());
    for (const auto& x : s)
        g.push_back(x.gain_db);
    auto d = DbDistribution::from_samples(g, step);
    if (d.weights.sum() <= 0.0)
        throw NumericError("gain_pdf: every draw was shielded; the mode azimuth is never inside a panel sector");
    return d;
}

} // namespace u6g
