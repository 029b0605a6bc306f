// SPDX-License-Identifier: Apache-2.0
// Acceptance checks, one line per criterion:
//   acceptance [--criterion N]...
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "u6g/aggregator.hpp"
#include "u6g/geomstats.hpp"
#include "u6g/linkbudget.hpp"
#include "u6g/modes.hpp"
#include "u6g/validation.hpp"

using namespace u6g;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        detail << (ok ? "" : "[fail] ") << what << "; ";
    }
};

std::string fmt(double v, int prec = 4)
{
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", prec, v);
    return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const GeoStats& geo()
{
    static const GeoStats g = fixture_geostats();
    return g;
}

// --- 1
void eirp(Outcome& o)
{
    struct Row {
        const char* name;
        int config;
        BsClass b;
        double table;
    };
    const Row rows[] = {{"config1 macro", 1, BsClass::Macro, 58}, {"config1 micro", 1, BsClass::Micro, 46},
                        {"config2 macro", 2, BsClass::Macro, 58}, {"config2 micro", 2, BsClass::Micro, 46}};
    for (const auto& r : rows) {
        const double e = reference_array(r.config, r.b).eirp_dbm();
        o.require(std::abs(e - r.table) <= 0.2, std::string(r.name) + " " + fmt(e, 5) + " vs " + fmt(r.table));
    }
}

// --- 2
void path_loss(Outcome& o)
{
    const double a = fspl(35000e3, 6e9);
    o.require(std::abs(a - 199.0) <= 1.0, "A_s " + fmt(a, 6) + " dB vs 199 +- 1");
}

// --- 3
void bs_count(Outcome& o)
{
    ScenarioConfig c;
    const double q = c.city_q();
    o.require(std::abs(q - 155.5) <= 0.5, "Q " + fmt(q, 6) + " vs 155.5 +- 0.5 (lambda " + fmt(c.macro_density(), 5) +
                                              " /m2)");
}

// --- 4
void tessellation(Outcome& o)
{
    struct Gc {
        double g, psi, area_km2;
    };
    const std::vector<Gc> table{{20, 30, 3812552}, {20, 40, 6654033}, {21, 40, 30088},   {21, 50, 9203759},
                                {21, 60, 5104969}, {22, 60, 4632108}, {22, 70, 6869836}, {22, 80, 2605246}};
    const auto t0 = std::chrono::steady_clock::now();
    const auto cl = tessellate_footprint(SatGeometry{});
    const double dt = seconds_since(t0);
    o.require(cl.size() == table.size(), std::to_string(cl.size()) + " clusters vs 8");
    bool pairs = cl.size() == table.size();
    for (std::size_t i = 0; pairs && i < cl.size(); ++i)
        pairs = cl[i].g_s == table[i].g && cl[i].psi_s == table[i].psi;
    o.require(pairs, "(G_s, psi_s) pairs match the table");
    double worst = 0.0;
    std::ostringstream areas;
    for (std::size_t i = 0; i < std::min(cl.size(), table.size()); ++i) {
        const double rel = cl[i].area_m2 / 1e6 / table[i].area_km2 - 1.0;
        worst = std::max(worst, std::abs(rel));
        areas << (i ? " " : "") << "GC" << i + 1 << ":" << fmt(100 * rel, 3) << "%";
    }
    o.require(worst <= 0.15, "area deviation max " + fmt(100 * worst, 4) + "% vs 15% [" + areas.str() + "]");
    o.require(dt < 10.0, "runtime " + fmt(dt, 3) + " s");
}

// --- 5
void cf_pipeline(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ClutterTable clutter = fixture_clutter(geo(), 20000);
    Pipeline smi(toy_scenario(Method::SMI), geo(), clutter);
    const double alpha = smi.alpha_db(kToySatGain);
    const auto rs = run_city(smi, kToyElevation, alpha, 10.0);
    const double ks_s = ks_distance(rs.total.cf, mc_oracle(smi, kToyElevation, alpha, 10.0, 1000000, 21));
    o.require(ks_s < 0.02, "SMI KS " + fmt(ks_s, 3) + " vs 0.02");

    Pipeline gsmi(toy_scenario(Method::GSMI), geo());
    const auto rg = run_city(gsmi, kToyElevation, alpha, 10.0);
    // each BS carries a mode with its occurrence probability
    const double ks_g = ks_distance(rg.total.cf, mc_oracle(gsmi, kToyElevation, alpha, 10.0, 1000000, 22,
                                                           OracleCounts::Thinned));
    o.require(ks_g < 0.03, "GSMI KS " + fmt(ks_g, 3) + " vs 0.03");
    const double dt = seconds_since(t0);
    o.require(dt < 300.0, "runtime " + fmt(dt, 3) + " s");
}

// --- 6
void inversion(Outcome& o)
{
    const double ppd = ScenarioConfig{}.omega_points_per_decade;
    const double e = gp_sup_error_exponential(ppd);
    const double g = gp_sup_error_gamma(3.0, ppd);
    o.require(e < 1e-3, "exponential sup error " + fmt(e, 3));
    o.require(g < 1e-3, "gamma(3) sup error " + fmt(g, 3));
}

// --- 7
void occurrence(Outcome& o)
{
    const double worst = image_vs_raycast(100, 100000, 7);
    o.require(worst <= 0.01, "max |image - raycast| " + fmt(worst, 3) + " over 100 sections x 1e5 draws");

    OccurrenceOptions opt;
    for (BsClass b : {BsClass::Micro, BsClass::Macro}) {
        const double p20 = mean_occurrence(ModeTag::DP, geo(), b, 20, 45, opt);
        const double p50 = mean_occurrence(ModeTag::DP, geo(), b, 50, 45, opt);
        const double p80 = mean_occurrence(ModeTag::DP, geo(), b, 80, 45, opt);
        o.require(p20 <= p50 && p50 <= p80,
                  to_string(b) + " P_DP " + fmt(p20, 3) + " <= " + fmt(p50, 3) + " <= " + fmt(p80, 3));
    }

    CrossSection cs{.d1 = 10, .d2 = 20, .h1 = 0, .h2 = 0, .h_bs = 6, .psi_deg = 30};
    const double p = p_direct(cs, [](double v) { return std::clamp(v / 30.0, 0.0, 1.0); });
    const double exact = (6.0 + 20.0 * std::tan(deg2rad(30.0))) / 30.0;
    o.require(p == exact && std::round(p * 1000) == 585, "F_h(17.547) = " + fmt(p, 6));
}

// --- 8
void ordering(Outcome& o)
{
    const ClutterTable clutter = fixture_clutter(geo(), 20000);

    // (a) city run, both methods on the same link
    ScenarioConfig cs;
    Pipeline smi(cs, geo(), clutter);
    ScenarioConfig cg = cs;
    cg.method = Method::GSMI;
    Pipeline gsmi(cg, geo());
    const auto a = run_city(smi);
    const auto b = run_city(gsmi, a.psi_deg, a.alpha_db, a.q, a.total.grid);
    for (double pc : {50.0, 80.0}) {
        const double s = inr_percentile(a.total.cdf, cs, pc);
        const double g = inr_percentile(b.total.cdf, cg, pc);
        o.require(g >= s, "(a) p" + fmt(pc, 2) + " GSMI " + fmt(g, 5) + " dB vs SMI " + fmt(s, 5) + " dB");
    }
    // lossless clutter: every SMI mode is always present at full power
    ClutterTable lossless;
    for (ModeSign sign : {ModeSign::Positive, ModeSign::Negative}) {
        ClutterEntry e;
        e.sign = sign;
        e.cdf = {{0.0, 1.0}};
        lossless.entries.push_back(e);
    }
    Pipeline smi0(cs, geo(), lossless);
    const auto a0 = run_city(smi0, a.psi_deg, a.alpha_db, a.q, a.total.grid);
    const double s0 = inr_percentile(a0.total.cdf, cs, 80.0);
    const double g0 = inr_percentile(b.total.cdf, cg, 80.0);
    o.require(g0 >= s0, "(a) lossless table p80 GSMI " + fmt(g0, 5) + " dB vs SMI " + fmt(s0, 5) + " dB");

    // (b), (c) footprint
    ScenarioConfig f1 = cs;
    f1.urban_ratios = {0.05, 0.10};
    ScenarioConfig f2 = f1;
    f2.reference_config = 2;
    f2.macro_array = reference_array(2, BsClass::Macro);
    f2.micro_array = reference_array(2, BsClass::Micro);
    const auto clusters = tessellate_footprint(f1.sat, f1.gain_step_db, f1.elevation_step_deg);
    Pipeline p1(f1, geo(), clutter);
    Pipeline p2(f2, geo(), clutter);
    const auto r1 = run_footprint(p1, clusters);
    const auto r2 = run_footprint(p2, clusters);
    for (std::size_t i = 0; i < r1.size(); ++i)
        o.require(r2[i].inr_db < r1[i].inr_db, "(b) R_a " + fmt(r1[i].urban_ratio, 2) + " p80 INR config2 " +
                                                   fmt(r2[i].inr_db, 5) + " dB vs config1 " + fmt(r1[i].inr_db, 5) +
                                                   " dB");
    const double d = lin2db(cf_mean(r1[1].total.cf) / cf_mean(r1[0].total.cf));
    o.require(std::abs(d - 3.01) <= 0.05, "(c) R_a 5% -> 10% mean +" + fmt(d, 5) + " dB");
}

// --- 9
void linearity(Outcome& o)
{
    const double e = cf_pow_mean_error({0.3, 1.0, 17.3, 155.5});
    o.require(e < 5e-3, "max relative mean error " + fmt(e, 3) + " for p in {0.3, 1, 17.3, 155.5}");
}

// --- 10
void geometry(Outcome& o)
{
    const auto grid = manhattan_grid();
    const auto g = extract_stats(grid);
    for (double phi : {0.0, 90.0, 180.0, -90.0}) {
        const auto& b = g.at(phi);
        const bool h = !b.height.empty && b.height.weights.maxCoeff() > 1.0 - 1e-12 &&
                       std::abs(b.height.center(b.height.mode_bin()) - 20.0) < 1e-9;
        const bool dd = !b.distance.empty && b.distance.weights.maxCoeff() > 1.0 - 1e-12 &&
                        std::abs(b.distance.center(b.distance.mode_bin()) - 20.0) < 1e-9;
        o.require(h && dd, "phi " + fmt(phi, 3) + ": height and distance deltas at 20 m");
    }
    o.require(merge_and_convexify(grid).size() == 25, "25 blocks survive merging");

    auto same = [](const Histogram1D& a, const Histogram1D& b) {
        if (a.empty != b.empty)
            return false;
        if (a.empty)
            return true;
        if (a.weights.size() != b.weights.size() || std::abs(a.origin - b.origin) > 1e-9)
            return false;
        return (a.weights - b.weights).abs().maxCoeff() < 1e-9;
    };
    const auto city = merge_and_convexify(synthetic_city());
    const auto base = extract_stats(city);
    const auto moved = extract_stats(transform_dataset(city, 0.0, Point(5000.0, -3210.5)));
    bool tr = true;
    for (std::size_t i = 0; i < base.bins.size(); ++i)
        tr = tr && same(base.bins[i].height, moved.bins[i].height) &&
             same(base.bins[i].distance, moved.bins[i].distance) && same(base.bins[i].area, moved.bins[i].area);
    o.require(tr, "translation leaves every azimuth bin unchanged");

    bool rot = true;
    for (double delta : {35.0, -60.0}) {
        const auto r = extract_stats(transform_dataset(city, delta));
        for (const auto& b : r.bins) {
            const auto& src = base.at(wrap180(b.azimuth_deg - delta));
            rot = rot && same(b.height, src.height) && same(b.distance, src.distance);
        }
    }
    o.require(rot, "rotation by whole bins shifts the azimuth conditioning");
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "EIRP reproduction", eirp},
        {2, "free-space path loss", path_loss},
        {3, "city BS count", bs_count},
        {4, "footprint tessellation", tessellation},
        {5, "CF pipeline vs direct simulation", cf_pipeline},
        {6, "Gil-Pelaez accuracy", inversion},
        {7, "occurrence probabilities", occurrence},
        {8, "ordering claims", ordering},
        {9, "mean linearity of CF powers", linearity},
        {10, "geometry fixtures", geometry},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            pick.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
            return 2;
        }
    }
    bool ok = true;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id))
            continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %2d %s  %s (%.1f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                    seconds_since(t0), o.detail.str().c_str());
        std::fflush(stdout);
        ok = ok && o.pass;
    }
    return ok ? 0 : 1;
}
