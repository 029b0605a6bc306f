// SPDX-License-Identifier: Apache-2.0
#include "u6g/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "u6g/geomstats.hpp"

namespace u6g {

std::string to_string(ModeTag m)
{
    switch (m) {
    case ModeTag::DP:
        return "DP";
    case ModeTag::SB:
        return "SB";
    case ModeTag::DB:
        return "DB";
    case ModeTag::GR:
        return "GR";
    case ModeTag::GB:
        return "GB";
    }
    return "?";
}

ModeTag mode_from_string(const std::string& s)
{
    for (auto m : kAllModes)
        if (to_string(m) == s)
            return m;
    throw ValidationError("unknown interference mode '" + s + "'");
}

std::string to_string(BsClass b) { return b == BsClass::Micro ? "micro" : "macro"; }

ModeSign mode_sign(ModeTag m)
{
    return (m == ModeTag::GR || m == ModeTag::GB) ? ModeSign::Negative : ModeSign::Positive;
}

bool mode_reflects(ModeTag m) { return m != ModeTag::DP; }

Aod mode_aod(ModeTag m, double psi_s_deg, double phi_s_deg)
{
    switch (m) {
    case ModeTag::DP:
    case ModeTag::DB: // two facade bounces restore the horizontal direction
        return {wrap180(phi_s_deg), psi_s_deg};
    case ModeTag::SB:
        return {wrap180(phi_s_deg + 180.0), psi_s_deg};
    case ModeTag::GR:
        return {wrap180(phi_s_deg), -psi_s_deg};
    case ModeTag::GB:
        return {wrap180(phi_s_deg + 180.0), -psi_s_deg};
    }
    return {};
}

std::vector<ModeTag> mode_set(BsClass b)
{
    if (b == BsClass::Macro)
        return {ModeTag::DP, ModeTag::GR, ModeTag::GB};
    return {kAllModes.begin(), kAllModes.end()};
}

double p_direct(const CrossSection& cs, const HeightCdf& F) { return p_mode(ModeTag::DP, cs, F); }

double p_mode(ModeTag m, const CrossSection& cs, const HeightCdf& F)
{
    if (!(cs.psi_deg > 0.0) || cs.psi_deg > 90.0)
        throw ValidationError("p_mode: elevation must be in (0, 90]");
    if (cs.d1 < 0.0 || cs.d2 < 0.0 || cs.h_bs < 0.0)
        throw ValidationError("p_mode: negative distance or height");
    if (cs.psi_deg == 90.0)
        return (m == ModeTag::DP || m == ModeTag::GR) ? 1.0 : 0.0;

    const double t = std::tan(deg2rad(cs.psi_deg));
    const double hb = cs.h_bs;
    const double d1 = cs.d1, d2 = cs.d2, d = d1 + d2;
    auto above = [&](double v) { return 1.0 - F(v); }; // P(h > v)
    double p = 0.0;
    switch (m) {
    case ModeTag::DP:
        p = F(hb + d2 * t);
        break;
    case ModeTag::SB:
        p = above(hb + d1 * t) * F(hb + (2.0 * d1 + d2) * t);
        break;
    case ModeTag::DB:
        p = above(hb + (d2 + d) * t) * std::max(0.0, F(hb + (d2 + 2.0 * d) * t) - F(hb + d2 * t));
        break;
    case ModeTag::GR:
        // bounce must land in the street, unless building 2 is absent
        p = F(std::max(d2 * t - hb, 0.0));
        break;
    case ModeTag::GB:
        if (d1 * t < hb)
            p = 0.0;
        else
            p = above(std::max(d1 * t - hb, 0.0)) * F((2.0 * d1 + d2) * t - hb);
        break;
    }
    return std::clamp(p, 0.0, 1.0);
}

double sample_bs_height(BsClass b, const GeoStats& geo, double phi_s_deg, Rng& rng, double micro_height,
                        double macro_min_height)
{
    (void)phi_s_deg;
    if (b == BsClass::Micro)
        return micro_height;
    const auto& h = geo.marginal.height;
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
        m = std::max(m, h.sample(rng));
    return std::max(m, macro_min_height);
}

double mean_occurrence(ModeTag m, const GeoStats& geo, BsClass b, double psi_s_deg, double phi_s_deg,
                       const OccurrenceOptions& opt)
{
    if (b == BsClass::Macro && (m == ModeTag::SB || m == ModeTag::DB))
        return 0.0;
    if (opt.n_samples == 0)
        throw ValidationError("mean_occurrence: n_samples must be positive");
    const auto& hh = geo.height(phi_s_deg);
    const auto& dh = geo.distance(phi_s_deg);
    if (dh.empty)
        throw EmptyDatasetError("mean_occurrence: no inter-building distances in the statistics");
    HeightCdf F = [&hh](double v) { return v < 0.0 ? 0.0 : hh.cdf(v); };

    // fixed-size chunks keep the result independent of the thread count
    constexpr std::size_t chunk = 4096;
    const std::size_t nchunks = (opt.n_samples + chunk - 1) / chunk;
    std::vector<double> part(nchunks, 0.0);
    parallel_for(nchunks, [&](std::size_t c) {
        Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(m) + 100, c));
        const std::size_t lo = c * chunk, hi = std::min(opt.n_samples, lo + chunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            CrossSection cs;
            cs.psi_deg = psi_s_deg;
            const double u = rng.uniform();
            if (opt.independent_streets) {
                cs.d1 = u * dh.sample(rng);
                cs.d2 = (1.0 - rng.uniform()) * dh.sample(rng);
            } else {
                const double d = dh.sample(rng);
                cs.d1 = u * d;
                cs.d2 = d - cs.d1;
            }
            cs.h_bs = sample_bs_height(b, geo, phi_s_deg, rng, opt.micro_height, opt.macro_min_height);
            s += p_mode(m, cs, F);
        }
        part[c] = s;
    });
    double total = 0.0;
    for (double s : part)
        total += s;
    return total / static_cast<double>(opt.n_samples);
}

// ---- ray-casting oracle -------------------------------------------------

namespace {

enum class Hit { None, Ground, Facade1, Roof1, Facade2, Roof2 };

struct Ray {
    double x, y, ux, uy;
};

// Nearest intersection of the ray with the street scene (s > eps).
Hit first_hit(const Ray& r, const CrossSection& cs, double& s_hit)
{
    constexpr double eps = 1e-9;
    constexpr double far = 1e9;
    Hit best = Hit::None;
    s_hit = std::numeric_limits<double>::infinity();
    auto consider = [&](double s, Hit h) {
        if (s > eps && s < s_hit) {
            s_hit = s;
            best = h;
        }
    };
    // ground plane y = 0
    if (r.uy < 0.0)
        consider(-r.y / r.uy, Hit::Ground);
    // vertical facades
    if (cs.h1 > 0.0 && r.ux != 0.0) {
        const double s = (-cs.d1 - r.x) / r.ux;
        const double y = r.y + s * r.uy;
        if (y >= 0.0 && y <= cs.h1)
            consider(s, Hit::Facade1);
    }
    if (cs.h2 > 0.0 && r.ux != 0.0) {
        const double s = (cs.d2 - r.x) / r.ux;
        const double y = r.y + s * r.uy;
        if (y >= 0.0 && y <= cs.h2)
            consider(s, Hit::Facade2);
    }
    // roofs, treated as absorbing
    if (r.uy != 0.0) {
        if (cs.h1 > 0.0) {
            const double s = (cs.h1 - r.y) / r.uy;
            const double x = r.x + s * r.ux;
            if (x <= -cs.d1 && x >= -cs.d1 - far)
                consider(s, Hit::Roof1);
        }
        if (cs.h2 > 0.0) {
            const double s = (cs.h2 - r.y) / r.uy;
            const double x = r.x + s * r.ux;
            if (x >= cs.d2 && x <= cs.d2 + far)
                consider(s, Hit::Roof2);
        }
    }
    return best;
}

} // namespace

bool raycast_path_exists(ModeTag m, const CrossSection& cs)
{
    const double psi = deg2rad(cs.psi_deg);
    const double c = std::cos(psi), s = std::sin(psi);
    Ray r{0.0, std::max(cs.h_bs, 1e-9), 0.0, 0.0};
    std::vector<Hit> want;
    switch (m) {
    case ModeTag::DP:
        r.ux = c, r.uy = s;
        break;
    case ModeTag::DB:
        r.ux = c, r.uy = s;
        want = {Hit::Facade2, Hit::Facade1};
        break;
    case ModeTag::SB:
        r.ux = -c, r.uy = s;
        want = {Hit::Facade1};
        break;
    case ModeTag::GR:
        r.ux = c, r.uy = -s;
        want = {Hit::Ground};
        break;
    case ModeTag::GB:
        r.ux = -c, r.uy = -s;
        want = {Hit::Ground, Hit::Facade1};
        break;
    }
    std::vector<Hit> seen;
    for (int bounce = 0; bounce < 8; ++bounce) {
        double sh = 0.0;
        const Hit h = first_hit(r, cs, sh);
        if (h == Hit::None)
            break;
        if (h == Hit::Roof1 || h == Hit::Roof2)
            return false;
        seen.push_back(h);
        r.x += sh * r.ux;
        r.y += sh * r.uy;
        if (h == Hit::Ground)
            r.uy = -r.uy;
        else
            r.ux = -r.ux;
    }
    // must leave toward the satellite after exactly the expected bounces
    const bool toward_sat = r.ux > 0.0 && r.uy > 0.0 && std::abs(r.uy - s) < 1e-9;
    return toward_sat && seen == want;
}

double raycast_oracle(ModeTag m, const CrossSection& cs, const std::function<double(Rng&)>& sample_height,
                      std::size_t n, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, 0x0ac1e));
    std::size_t ok = 0;
    CrossSection c = cs;
    for (std::size_t i = 0; i < n; ++i) {
        c.h1 = sample_height(rng);
        c.h2 = sample_height(rng);
        ok += raycast_path_exists(m, c) ? 1 : 0;
    }
    return static_cast<double>(ok) / static_cast<double>(n);
}

} // namespace u6g
