// SPDX-License-Identifier: Apache-2.0
#include "u6g/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "u6g/antenna.hpp"

namespace u6g {

GeoStats fixture_geostats() { return extract_stats(merge_and_convexify(synthetic_city())); }

ClutterTable fixture_clutter(const GeoStats& geo, std::size_t n_samples, std::uint64_t seed)
{
    SyntheticClutterOptions o;
    o.n_samples = n_samples;
    o.seed = seed;
    return synthetic_clutter_table(geo, kTableElevations, kTableBsHeights, o);
}

ScenarioConfig toy_scenario(Method m)
{
    ScenarioConfig c;
    c.method = m;
    c.categories = {{BsClass::Macro, false}};
    c.outdoor_fraction = 1.0;
    c.q_override = 10.0;
    c.modes = {ModeTag::DP, ModeTag::GR};
    if (m != Method::SMI)
        c.occurrence_override = {{ModeTag::DP, 0.8}, {ModeTag::GR, 0.3}};
    c.city_elevation_deg = kToyElevation;
    c.city_sat_gain_dbi = kToySatGain;
    return c;
}

double gp_sup_error_exponential(double ppd)
{
    auto g = make_omega_grid(1e-3, 1e3, ppd);
    auto phi = cf_from_log(g, [](double w) { return -std::log(cplx(1.0, -w)); });
    const Eigen::ArrayXd x = log_grid(1e-3, 20.0, 400);
    const auto cdf = gil_pelaez_cdf(phi, x);
    const Eigen::ArrayXd exact = 1.0 - (-x).exp();
    return (cdf.F - exact).abs().maxCoeff();
}

double gp_sup_error_gamma(double k, double ppd)
{
    auto g = make_omega_grid(1e-3, 1e3, ppd);
    auto phi = cf_from_log(g, [k](double w) { return -k * std::log(cplx(1.0, -w)); });
    const Eigen::ArrayXd x = log_grid(1e-3, 40.0, 400);
    const auto cdf = gil_pelaez_cdf(phi, x);
    double err = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        // regularized lower gamma for integer k
        double term = 1.0, sum = 1.0;
        for (int j = 1; j < static_cast<int>(k); ++j) {
            term *= x(i) / j;
            sum += term;
        }
        const double exact = 1.0 - std::exp(-x(i)) * sum;
        err = std::max(err, std::abs(cdf.F(i) - exact));
    }
    return err;
}

double cf_pow_mean_error(const std::vector<double>& ps)
{
    // a spread-out dB-normal power, mean -60 dBm, sigma 8 dB
    std::vector<double> db, w;
    for (int i = -200; i <= 200; ++i) {
        const double v = -60.0 + 0.25 * i;
        db.push_back(v);
        w.push_back(std::exp(-0.5 * std::pow((v + 60.0) / 8.0, 2)));
    }
    auto d = DbDistribution::from_points(db, w);
    db_normalize(d);
    const auto lin = db_to_linear(d, PowerUnit::dBm);
    const double m = lin.mean();
    auto g = make_omega_grid(m * 1e-6, m * 1e4, 500);
    const CharFn phi = cf_from_linear(lin, g);
    double err = std::abs(cf_mean(phi) / m - 1.0);
    for (double p : ps)
        err = std::max(err, std::abs(cf_mean(cf_pow(phi, p)) / (p * m) - 1.0));
    return err;
}

double unwrap_error(bool principal_branch_only)
{
    auto g = make_omega_grid(1e-2, 1e2, 500);
    const Eigen::ArrayXd& om = g->omega;
    Eigen::ArrayXcd v(om.size());
    for (Eigen::Index j = 0; j < om.size(); ++j)
        v(j) = std::pow(cplx(1.0, -om(j)), -6.0);
    CharFn phi;
    if (principal_branch_only) {
        Eigen::ArrayXcd lg(om.size());
        for (Eigen::Index j = 0; j < om.size(); ++j)
            lg(j) = std::log(v(j));
        phi = CharFn(g, lg, 0.0, om.size());
    } else {
        phi = cf_from_values(g, v);
    }
    const Eigen::ArrayXcd r = cf_pow(phi, 1.0 / 6.0).values();
    double err = 0.0;
    for (Eigen::Index j = 0; j < om.size(); ++j) {
        if (std::abs(v(j)) < 1e-250)
            break;
        err = std::max(err, std::abs(r(j) - 1.0 / cplx(1.0, -om(j))));
    }
    return err;
}

double image_vs_raycast(std::size_t n_configs, std::size_t draws, std::uint64_t seed)
{
    std::vector<double> worst(n_configs, 0.0);
    parallel_for(n_configs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, 0x1a6e, i));
        CrossSection cs;
        cs.d1 = rng.uniform(2.0, 40.0);
        cs.d2 = rng.uniform(2.0, 40.0);
        cs.h_bs = rng.uniform(3.0, 30.0);
        cs.psi_deg = rng.uniform(10.0, 80.0);
        // heights from a random log-normal street, kept clear of zero
        const double med = rng.uniform(8.0, 30.0);
        const double sig = rng.uniform(0.2, 0.6);
        std::vector<double> hs, ws;
        for (int k = 0; k < 400; ++k) {
            hs.push_back(5.0 + med * std::exp(sig * rng.normal()));
            ws.push_back(1.0);
        }
        const Histogram1D h = make_histogram(hs, ws, 5.0);
        const HeightCdf F = [&h](double v) { return v < 0.0 ? 0.0 : h.cdf(v); };
        for (auto m : kAllModes) {
            const double img = p_mode(m, cs, F);
            const double ray = raycast_oracle(
                m, cs, [&h](Rng& r) { return h.sample(r); }, draws, derive_seed(seed, i, static_cast<int>(m)));
            worst[i] = std::max(worst[i], std::abs(img - ray));
        }
    });
    return *std::max_element(worst.begin(), worst.end());
}

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::string& inv, double thr, bool below,
                  const std::function<double()>& f)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.name = name;
    r.invariant = inv;
    r.threshold = thr;
    try {
        r.metric = f();
        r.pass = below ? r.metric < thr : r.metric > thr;
    } catch (const std::exception& e) {
        r.metric = std::nan("");
        r.pass = false;
        r.invariant += std::string(" [threw: ") + e.what() + "]";
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

} // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opt)
{
    const bool full = opt.level == ValidationLevel::Full;
    std::vector<CheckResult> out;

    out.push_back(timed("gp-exponential", "Gil-Pelaez CDF of Exp(1) matches 1-exp(-x)", 1e-3, true,
                        [] { return gp_sup_error_exponential(); }));
    out.push_back(timed("gp-gamma3", "Gil-Pelaez CDF of Gamma(3) matches the closed form", 1e-3, true,
                        [] { return gp_sup_error_gamma(3.0); }));
    out.push_back(timed("cf-pow-mean", "mean(Phi^p) = p mean(Phi) for p in {0.3, 1, 17.3, 155.5}", 5e-3, true,
                        [] { return cf_pow_mean_error({0.3, 1.0, 17.3, 155.5}); }));
    out.push_back(timed("cf-phase-unwrap", "Gamma(6) CF raised to 1/6 equals the Exp(1) CF (continuous log branch)",
                        1e-6, true, [&] { return unwrap_error(opt.inject_unwrap_fault); }));

    const GeoStats geo = fixture_geostats();
    out.push_back(timed("pdp-monotone", "P_DP increases over psi_s = 20, 50, 80 deg", 0.0, true, [&] {
        // largest decrease, negative when strictly increasing
        double worst = -1.0;
        for (auto b : {BsClass::Micro, BsClass::Macro}) {
            OccurrenceOptions o;
            o.seed = opt.seed;
            const double a = mean_occurrence(ModeTag::DP, geo, b, 20.0, 45.0, o);
            const double m = mean_occurrence(ModeTag::DP, geo, b, 50.0, 45.0, o);
            const double z = mean_occurrence(ModeTag::DP, geo, b, 80.0, 45.0, o);
            worst = std::max({worst, a - m, m - z});
        }
        return worst;
    }));
    out.push_back(timed("image-vs-raycast", "image-method p_mode agrees with the 2D ray caster", 0.01, true, [&] {
        return full ? image_vs_raycast(100, 100000, opt.seed) : image_vs_raycast(10, 50000, opt.seed);
    }));
    out.push_back(timed("inr-anchor", "INR_th -10.5 dB at 800 K, 100 MHz is I = -100.1 dBm", 0.05, true, [] {
        ScenarioConfig c;
        return std::abs(lin2db(noise_power_w(c)) + 30.0 + c.inr_threshold_db - (-100.07));
    }));

    const ClutterTable clutter = fixture_clutter(geo, full ? 20000 : 5000);
    Pipeline smi(toy_scenario(Method::SMI), geo, clutter);
    const double alpha = smi.alpha_db(kToySatGain);
    const CityResult r = run_city(smi, kToyElevation, alpha, 10.0);
    out.push_back(timed("cdf-monotone", "inverted CDF needed only a small isotonic correction", 1e-4, true,
                        [&] { return r.total.cdf.max_adjustment; }));
    out.push_back(timed("mode-mean", "per-mode dB chain mean equals the sampled mean", 0.2, true, [&] {
        const Category c{BsClass::Macro, false};
        const auto& cfg = smi.config();
        const std::uint64_t s = derive_seed(opt.seed, 0x3ea1);
        const auto d = per_mode_distribution(ModeTag::GR, c, kToyElevation, alpha, cfg, geo, &clutter, nullptr, s);
        // the same draws, summed directly
        const auto g = sample_gains(mode_aod(ModeTag::GR, kToyElevation, cfg.sat_azimuth_deg), cfg.macro_array,
                                    cfg.ue_model(false), BsClass::Macro, geo, cfg.gain_samples, s);
        double sum = 0.0;
        for (const auto& x : g) {
            if (!std::isfinite(x.gain_db))
                continue;
            const auto& e = clutter.lookup(ModeSign::Negative, LossKind::Clutter, kToyElevation, x.h_bs);
            double prev = 0.0, lin = 0.0;
            for (const auto& [l, cum] : e.cdf) {
                lin += (cum - prev) * std::pow(10.0, -l / 10.0);
                prev = cum;
            }
            sum += std::pow(10.0, (cfg.macro_array.effective_power_dbm() + alpha + x.gain_db - 30.0) / 10.0) * lin;
        }
        const double mc = sum / static_cast<double>(g.size());
        return std::abs(lin2db(db_to_linear(d, PowerUnit::dBm).mean() / mc));
    }));

    if (full) {
        out.push_back(timed("ks-smi-toy", "SMI CF pipeline matches 1e6 direct trials (KS)", 0.02, true, [&] {
            return ks_distance(r.total.cf, mc_oracle(smi, kToyElevation, alpha, 10.0, 1000000, opt.seed));
        }));
        out.push_back(timed("ks-gsmi-toy", "GSMI CF pipeline matches 1e6 Bernoulli-thinned trials (KS)", 0.03, true, [&] {
            Pipeline gsmi(toy_scenario(Method::GSMI), geo);
            const auto rg = run_city(gsmi, kToyElevation, alpha, 10.0);
            return ks_distance(rg.total.cf, mc_oracle(gsmi, kToyElevation, alpha, 10.0, 1000000, opt.seed,
                                                      OracleCounts::Thinned));
        }));
        out.push_back(timed("footprint-linearity", "R_a 5% -> 10% raises the footprint mean by 3.01 dB", 0.05, true,
                            [&] {
                                ScenarioConfig c = smi.config();
                                c.categories = kAllCategories;
                                c.outdoor_fraction = 0.3;
                                c.q_override.reset();
                                c.urban_ratios = {0.05, 0.10};
                                c.gain_samples = 20000;
                                Pipeline p(c, geo, clutter);
                                const auto runs = run_footprint(p, tessellate_footprint(c.sat));
                                const double d = lin2db(cf_mean(runs[1].total.cf) / cf_mean(runs[0].total.cf));
                                return std::abs(d - 3.0103);
                            }));
    }
    return out;
}

std::string validation_report_json(const std::vector<CheckResult>& r)
{
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& c : r) {
        all = all && c.pass;
        j["checks"].push_back({{"name", c.name},
                               {"invariant", c.invariant},
                               {"metric", std::isfinite(c.metric) ? nlohmann::json(c.metric) : nlohmann::json()},
                               {"threshold", c.threshold},
                               {"pass", c.pass},
                               {"seconds", c.seconds}});
    }
    j["pass"] = all;
    return j.dump(2);
}

} // namespace u6g
