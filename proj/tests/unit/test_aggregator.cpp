// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "u6g/aggregator.hpp"
#include "u6g/validation.hpp"

using namespace u6g;
using doctest::Approx;

namespace {

const GeoStats& geo()
{
    static const GeoStats g = fixture_geostats();
    return g;
}

const ClutterTable& clutter()
{
    static const ClutterTable t = fixture_clutter(geo(), 5000);
    return t;
}

ScenarioConfig small(Method m)
{
    auto c = toy_scenario(m);
    c.gain_samples = 20000;
    c.omega_points_per_decade = 250;
    return c;
}

CharFn expo(const GridPtr& g, double mean)
{
    return cf_from_log(g, [mean](double w) { return -std::log(cplx(1.0, -w * mean)); });
}

double max_diff(const CharFn& a, const CharFn& b) { return (a.values() - b.values()).abs().maxCoeff(); }

} // namespace

TEST_CASE("composition rules")
{
    auto g = make_omega_grid(1e-3, 1e2, 256);
    auto a = expo(g, 1.0), b = expo(g, 2.0);

    // Q = 0 leaves nothing
    auto none = category_cf({a, b}, {1.0, 0.4}, 0.0, g);
    CHECK((none.values() - cplx(1.0, 0.0)).abs().maxCoeff() < 1e-15);

    auto q3 = category_cf({a, b}, {1.0, 0.5}, 3.0, g);
    CHECK(max_diff(q3, cf_product({cf_pow(a, 3.0), cf_pow(b, 1.5)})) < 1e-12);

    std::vector<CategoryResult> cats(4);
    const std::vector<Category> order{{BsClass::Micro, true}, {BsClass::Micro, false}, {BsClass::Macro, true},
                                      {BsClass::Macro, false}};
    for (int i = 0; i < 4; ++i) {
        cats[i].category = order[i];
        cats[i].cf = expo(g, 1.0 + i);
    }
    // beta = 1: outdoor categories only
    CHECK(max_diff(city_cf(cats, 1.0, g), cf_product({cats[1].cf, cats[3].cf})) < 1e-12);
    CHECK(max_diff(city_cf(cats, 0.0, g), cf_product({cats[0].cf, cats[2].cf})) < 1e-12);

    // identical categories at beta 0.5: Phi^2, mean doubles
    for (auto& c : cats)
        c.cf = a;
    auto half = city_cf(cats, 0.5, g);
    CHECK(max_diff(half, cf_pow(a, 2.0)) < 1e-12);
    CHECK(cf_mean(half) / cf_mean(a) == Approx(2.0).epsilon(5e-3));

    // absent categories count as one
    std::vector<CategoryResult> only{cats[3]};
    CHECK(max_diff(city_cf(only, 1.0, g), a) < 1e-12);
}

TEST_CASE("noise anchor and exponential INR")
{
    ScenarioConfig c;
    CHECK(lin2db(noise_power_w(c)) + 30.0 == Approx(-89.56826730329823));
    CHECK(lin2db(noise_power_w(c)) + 30.0 + c.inr_threshold_db == Approx(-100.07).epsilon(1e-3));

    auto g = make_omega_grid(noise_power_w(c) * 1e-4, noise_power_w(c) * 1e2, 512);
    auto e = expo(g, noise_power_w(c));
    // 10 log10(-ln 0.2), from tests/support/oracles.py
    CHECK(inr_percentile(e, c, 80.0) == Approx(2.066742274911189).epsilon(2e-3));
}

TEST_CASE("mode sets per method")
{
    Pipeline smi(small(Method::SMI), geo(), clutter());
    auto m = smi.modes(BsClass::Macro);
    CHECK(m == std::vector<ModeTag>{ModeTag::DP, ModeTag::GR});
    CHECK(smi.occurrence(ModeTag::DP, BsClass::Macro, 40) == 1.0);

    auto c = small(Method::GSMI);
    c.modes = {kAllModes.begin(), kAllModes.end()};
    c.occurrence_override.clear();
    Pipeline gsmi(c, geo());
    CHECK(gsmi.modes(BsClass::Macro).size() == 3);
    CHECK(gsmi.modes(BsClass::Micro).size() == 5);
    const double p = gsmi.occurrence(ModeTag::DP, BsClass::Micro, 40);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(gsmi.category_q({BsClass::Micro, true}, 10.0) == Approx(90.0));
    CHECK(gsmi.category_q({BsClass::Macro, true}, 10.0) == Approx(10.0));

    // a missing bucket is named
    ClutterTable pos_only;
    for (const auto& e : clutter().entries)
        if (e.sign == ModeSign::Positive)
            pos_only.entries.push_back(e);
    Pipeline broken(small(Method::SMI), geo(), pos_only);
    CHECK_THROWS_WITH_AS(broken.terms({BsClass::Macro, false}, 40, -180.0), doctest::Contains("negative"),
                         ValidationError);
}

TEST_CASE("deterministic placement gives a step CDF")
{
    auto c = small(Method::GSMI);
    c.modes = {ModeTag::DP};
    c.occurrence_override = {{ModeTag::DP, 1.0}};
    c.ue.fixed_steer = Aod{0.0, 0.0};
    c.ue.fixed_panel_offset = 0.0;
    Pipeline p(c, geo());
    const double alpha = p.alpha_db(kToySatGain);
    const auto& d = p.base_distribution(ModeTag::DP, {BsClass::Macro, false}, kToyElevation);
    CHECK(d.quantile(0.01) == d.quantile(0.99));
    const double one_bs = std::pow(10.0, (d.quantile(0.5) + alpha - 30.0) / 10.0);
    auto r = run_city(p, kToyElevation, alpha, 10.0);
    CHECK(cdf_at(r.total.cdf, 0.97 * 10.0 * one_bs) < 0.05);
    CHECK(cdf_at(r.total.cdf, 1.03 * 10.0 * one_bs) > 0.95);
}

TEST_CASE("GSMI with certain occurrence equals SMI without clutter")
{
    ClutterTable lossless;
    for (ModeSign s : {ModeSign::Positive, ModeSign::Negative}) {
        ClutterEntry e;
        e.sign = s;
        e.elevation_deg = kToyElevation;
        e.bs_height_m = 20;
        e.cdf = {{0.0, 1.0}};
        lossless.entries.push_back(e);
    }
    Pipeline smi(small(Method::SMI), geo(), lossless);
    auto gc = small(Method::GSMI);
    gc.occurrence_override = {{ModeTag::DP, 1.0}, {ModeTag::GR, 1.0}};
    Pipeline gsmi(gc, geo());
    const double alpha = smi.alpha_db(kToySatGain);
    auto a = run_city(smi, kToyElevation, alpha, 10.0);
    auto b = run_city(gsmi, kToyElevation, alpha, 10.0, a.total.grid);
    CHECK(std::abs(inr_percentile(a.total.cdf, smi.config(), 80) - inr_percentile(b.total.cdf, gc, 80)) < 0.1);
    CHECK(std::abs(lin2db(a.total.mean_w / b.total.mean_w)) < 0.1);
}

TEST_CASE("footprint tessellation")
{
    SatGeometry s;
    auto cl = tessellate_footprint(s);
    REQUIRE_FALSE(cl.empty());
    double prev_g = -1, prev_p = -1;
    for (const auto& c : cl) {
        CHECK(c.g_s >= s.max_gain_dbi - 3.0);
        CHECK(c.g_s <= s.max_gain_dbi);
        CHECK(c.area_m2 > 0);
        CHECK_FALSE(c.pixels.empty());
        CHECK(std::make_pair(c.g_s, c.psi_s) > std::make_pair(prev_g, prev_p));
        prev_g = c.g_s;
        prev_p = c.psi_s;
    }
}

TEST_CASE("footprint reduces to the city run and scales with R_a")
{
    auto c = small(Method::SMI);
    c.q_override.reset();
    c.urban_ratios = {0.05, 0.10};
    Pipeline p(c, geo(), clutter());
    GeographicCluster one;
    one.g_s = 20;
    one.psi_s = kToyElevation;
    // Q = 10 at R_a = 5%
    one.area_m2 = 10.0 / cluster_q(c, GeographicCluster{0, 0, 1.0, 0, {}}, 0.05);
    CHECK(cluster_q(c, one, 0.05) == Approx(10.0));
    auto runs = run_footprint(p, {one});
    auto city = run_city(p, kToyElevation, p.alpha_db(20), 10.0, runs[0].total.grid);
    CHECK(max_diff(runs[0].total.cf, city.total.cf) < 1e-9);
    CHECK(lin2db(cf_mean(runs[1].total.cf) / cf_mean(runs[0].total.cf)) == Approx(3.0103).epsilon(1e-3));
    CHECK(runs[1].inr_db > runs[0].inr_db);
}

TEST_CASE("two-cluster footprint against direct simulation")
{
    auto c = small(Method::SMI);
    c.q_override.reset();
    c.urban_ratios = {0.05};
    Pipeline p(c, geo(), clutter());
    const double unit = cluster_q(c, GeographicCluster{0, 0, 1.0, 0, {}}, 0.05);
    GeographicCluster a{21, 40, 4.0 / unit, 0, {}}, b{19, 30, 7.0 / unit, 0, {}};
    auto runs = run_footprint(p, {a, b});
    const std::size_t n = 200000;
    auto sa = mc_oracle(p, a.psi_s, p.alpha_db(a.g_s), 4.0, n, 91);
    auto sb = mc_oracle(p, b.psi_s, p.alpha_db(b.g_s), 7.0, n, 92);
    for (std::size_t i = 0; i < n; ++i)
        sa[i] += sb[i];
    CHECK(ks_distance(runs[0].total.cf, sa) < 0.02);
}

TEST_CASE("runs are reproducible and independent of the thread count")
{
    auto c = small(Method::SMI);
    set_thread_count(1);
    Pipeline p1(c, geo(), clutter());
    auto r1 = run_city(p1, kToyElevation, p1.alpha_db(20), 10.0);
    set_thread_count(3);
    Pipeline p3(c, geo(), clutter());
    auto r3 = run_city(p3, kToyElevation, p3.alpha_db(20), 10.0);
    set_thread_count(0);
    CHECK((r1.total.cdf.F - r3.total.cdf.F).abs().maxCoeff() == 0.0);
}
