// SPDX-License-Identifier: Apache-2.0
#include "u6g/clutter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "u6g/geomstats.hpp"

namespace u6g {

std::string to_string(ModeSign s) { return s == ModeSign::Positive ? "positive" : "negative"; }

std::string to_string(LossKind k)
{
    switch (k) {
    case LossKind::Clutter:
        return "clutter";
    case LossKind::Diffraction:
        return "diffraction";
    case LossKind::Reflection:
        return "reflection";
    }
    return "?";
}

void ClutterEntry::validate(const std::string& where) const
{
    const std::string at = where.empty() ? "" : where + ": ";
    if (cdf.empty())
        throw ValidationError(at + "empty CDF");
    double prev_l = -1.0, prev_c = 0.0;
    for (const auto& [l, c] : cdf) {
        if (!(l >= 0.0) || !std::isfinite(l))
            throw ValidationError(at + "loss values must be finite and >= 0 dB");
        if (l <= prev_l)
            throw ValidationError(at + "loss values must be strictly increasing");
        if (c < prev_c - 1e-12 || c < 0.0 || c > 1.0 + 1e-9)
            throw ValidationError(at + "CDF is not non-decreasing within [0, 1]");
        prev_l = l;
        prev_c = c;
    }
    if (std::abs(cdf.back().second - 1.0) > 1e-6)
        throw ValidationError(at + "CDF does not reach 1");
}

double ClutterEntry::quantile(double q) const
{
    for (const auto& [l, c] : cdf)
        if (c >= q - 1e-12)
            return l;
    return cdf.back().first;
}

bool ClutterTable::has_kind(LossKind k) const
{
    return std::any_of(entries.begin(), entries.end(), [k](const ClutterEntry& e) { return e.kind == k; });
}

const ClutterEntry& ClutterTable::lookup(ModeSign sign, LossKind kind, double psi_deg, double h_bs) const
{
    const ClutterEntry* best = nullptr;
    double best_de = std::numeric_limits<double>::infinity(), best_dh = best_de;
    for (const auto& e : entries) {
        if (e.sign != sign || e.kind != kind)
            continue;
        const double de = std::abs(e.elevation_deg - psi_deg);
        const double dh = std::abs(e.bs_height_m - h_bs);
        if (de < best_de - 1e-9 || (std::abs(de - best_de) <= 1e-9 && dh < best_dh)) {
            best = &e;
            best_de = de;
            best_dh = dh;
        }
    }
    if (!best) {
        std::ostringstream m;
        m << "no " << to_string(kind) << " table entry for bucket (sign=" << to_string(sign) << ", psi_s=" << psi_deg
          << ", h_BS=" << h_bs << ")";
        throw ValidationError(m.str());
    }
    return *best;
}

ClutterTable parse_clutter_table(std::istream& in, const std::string& name)
{
    ClutterTable t;
    std::string line;
    int lineno = 0;
    ClutterEntry* cur = nullptr;
    auto fail = [&](const std::string& why) { throw ValidationError(name + ":" + std::to_string(lineno) + ": " + why); };
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line.substr(first));
        if (line.compare(first, 5, "entry") == 0) {
            std::string kw, sign, kind;
            ClutterEntry e;
            if (!(ls >> kw >> sign >> kind >> e.elevation_deg >> e.bs_height_m))
                fail("expected 'entry <positive|negative> <clutter|diffraction|reflection> <psi_deg> <h_bs_m>'");
            if (sign == "positive")
                e.sign = ModeSign::Positive;
            else if (sign == "negative")
                e.sign = ModeSign::Negative;
            else
                fail("unknown sign '" + sign + "'");
            if (kind == "clutter")
                e.kind = LossKind::Clutter;
            else if (kind == "diffraction")
                e.kind = LossKind::Diffraction;
            else if (kind == "reflection")
                e.kind = LossKind::Reflection;
            else
                fail("unknown loss kind '" + kind + "'");
            t.entries.push_back(std::move(e));
            cur = &t.entries.back();
            continue;
        }
        if (!cur)
            fail("data before the first 'entry' header");
        std::string s = line.substr(first);
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream ps(s);
        double l, c;
        if (!(ps >> l >> c))
            fail("expected 'loss_db, cum_prob'");
        cur->cdf.emplace_back(l, c);
    }
    if (t.entries.empty())
        throw ValidationError(name + ": clutter table has no entries");
    for (std::size_t i = 0; i < t.entries.size(); ++i)
        t.entries[i].validate(name + ": entry " + std::to_string(i + 1));
    return t;
}

ClutterTable load_clutter_table(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open clutter table '" + path + "'");
    return parse_clutter_table(f, path);
}

void write_clutter_table(std::ostream& out, const ClutterTable& t)
{
    out << "# loss_db, cum_prob per entry\n" << std::setprecision(17);
    for (const auto& e : t.entries) {
        out << "entry " << to_string(e.sign) << ' ' << to_string(e.kind) << ' ' << e.elevation_deg << ' '
            << e.bs_height_m << '\n';
        for (const auto& [l, c] : e.cdf)
            out << l << ", " << c << '\n';
    }
}

void save_clutter_table(const ClutterTable& t, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write '" + path + "'");
    write_clutter_table(f, t);
}

DbDistribution clutter_gain_pdf(ModeTag mode, double psi_deg, double h_bs, const ClutterTable& table, double step,
                                LossKind kind)
{
    return entry_gain_pdf(table.lookup(mode_sign(mode), kind, psi_deg, h_bs), step);
}

DbDistribution entry_gain_pdf(const ClutterEntry& e, double step)
{
    std::vector<double> g, p;
    double prev = 0.0;
    for (const auto& [l, c] : e.cdf) {
        if (c - prev > 0.0) {
            g.push_back(-l);
            p.push_back(c - prev);
        }
        prev = c;
    }
    auto d = DbDistribution::from_points(g, p, step);
    db_normalize(d);
    return d;
}

double knife_edge_loss_db(double nu)
{
    if (nu <= -0.78)
        return 0.0;
    const double j = 6.9 + 20.0 * std::log10(std::sqrt((nu - 0.1) * (nu - 0.1) + 1.0) + nu - 0.1);
    return std::clamp(j, 0.0, 60.0);
}

ClutterEntry synthetic_clutter(const GeoStats& geo, ModeSign sign, double psi_deg, double h_bs,
                               const SyntheticClutterOptions& opt)
{
    if (opt.n_samples == 0)
        throw ValidationError("synthetic_clutter: n_samples must be positive");
    const auto& hh = geo.height(opt.phi_s_deg);
    const auto& dh = geo.distance(opt.phi_s_deg);
    if (hh.empty || dh.empty)
        throw EmptyDatasetError("synthetic_clutter: geometry statistics are empty");
    const double lambda = kLightSpeed / opt.frequency_hz;
    const double t = psi_deg >= 90.0 ? std::numeric_limits<double>::infinity() : std::tan(deg2rad(psi_deg));

    // the stream does not depend on (psi, h_bs): common random numbers keep the
    // loss monotone sample by sample
    Rng rng(derive_seed(opt.seed, 0xc1a77e, sign == ModeSign::Positive ? 1 : 2));
    std::map<long long, std::size_t> counts;
    for (std::size_t i = 0; i < opt.n_samples; ++i) {
        const double h = hh.sample(rng);
        const double d2 = std::max(rng.uniform() * dh.sample(rng), 1.0);
        double loss = 0.0;
        if (std::isfinite(t)) {
            // negative modes leave from the ground bounce at the BS foot
            const double src = sign == ModeSign::Positive ? h_bs : 0.0;
            const double clearance = h - src - d2 * t;
            const double nu = clearance * std::sqrt(2.0 / (lambda * d2));
            loss = knife_edge_loss_db(nu);
        }
        counts[std::llround(loss / opt.step)]++;
    }
    ClutterEntry e;
    e.sign = sign;
    e.kind = LossKind::Clutter;
    e.elevation_deg = psi_deg;
    e.bs_height_m = h_bs;
    std::size_t run = 0;
    for (const auto& [k, n] : counts) {
        run += n;
        e.cdf.emplace_back(static_cast<double>(k) * opt.step,
                           static_cast<double>(run) / static_cast<double>(opt.n_samples));
    }
    e.cdf.back().second = 1.0;
    return e;
}

ClutterTable synthetic_clutter_table(const GeoStats& geo, const std::vector<double>& elevations,
                                     const std::vector<double>& bs_heights, const SyntheticClutterOptions& opt)
{
    ClutterTable t;
    for (auto sign : {ModeSign::Positive, ModeSign::Negative})
        for (double e : elevations)
            for (double h : bs_heights)
                t.entries.push_back(synthetic_clutter(geo, sign, e, h, opt));
    return t;
}

namespace {

// Mean of TE and TM power reflection coefficients; theta from the normal.
double fresnel_power(double eps, double theta)
{
    const double c = std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const double root = std::sqrt(std::max(eps - s2, 0.0));
    const double te = (c - root) / (c + root);
    const double tm = (eps * c - root) / (eps * c + root);
    return 0.5 * (te * te + tm * tm);
}

} // namespace

ClutterTable synthetic_reflection_table(const std::vector<double>& elevations, double eps_facade, double eps_ground)
{
    ClutterTable t;
    for (double e : elevations) {
        const double psi = deg2rad(std::clamp(e, 0.0, 89.9));
        // a facade sees the ray psi off its normal; the ground sees it 90-psi off
        const double lp = std::max(0.0, -10.0 * std::log10(fresnel_power(eps_facade, psi)));
        const double ln = std::max(0.0, -10.0 * std::log10(fresnel_power(eps_ground, kPi / 2 - psi)));
        t.entries.push_back({ModeSign::Positive, LossKind::Reflection, e, 0.0, {{std::round(lp * 4) / 4, 1.0}}});
        t.entries.push_back({ModeSign::Negative, LossKind::Reflection, e, 0.0, {{std::round(ln * 4) / 4, 1.0}}});
    }
    return t;
}

} // namespace u6g
