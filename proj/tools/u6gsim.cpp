// SPDX-License-Identifier: Apache-2.0
// Batch front-end: geometry statistics, city and footprint runs, validation.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "u6g/aggregator.hpp"
#include "u6g/validation.hpp"

using namespace u6g;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 1;
    bool deterministic = false;
};

// Ordered output writer; every file it writes is listed in the manifest.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name)
    {
        fs::create_directories(dir_);
        std::ofstream f(dir_ / name);
        if (!f)
            throw IoError("cannot write '" + (dir_ / name).string() + "'");
        f << std::setprecision(10);
        files_.push_back(name);
        return f;
    }
    const std::vector<std::string>& files() const { return files_; }
    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

class Timer {
public:
    void lap(const std::string& stage)
    {
        const auto now = std::chrono::steady_clock::now();
        laps_[stage] = std::chrono::duration<double>(now - t_).count();
        t_ = now;
    }
    json to_json() const { return laps_; }

private:
    std::chrono::steady_clock::time_point t_ = std::chrono::steady_clock::now();
    std::map<std::string, double> laps_;
};

ScenarioConfig load_config(const Common& c)
{
    ScenarioConfig cfg = load_scenario(c.config);
    if (c.seed_given)
        cfg.seed = c.seed;
    cfg.validate();
    // inputs must exist before anything is written
    if (!fs::exists(cfg.geostats_path))
        throw IoError("geometry statistics '" + cfg.geostats_path + "' not found");
    if (cfg.method == Method::SMI && cfg.clutter_path != "synthetic" && !fs::exists(cfg.clutter_path))
        throw IoError("clutter table '" + cfg.clutter_path + "' not found");
    if (cfg.method == Method::GSMIReflection && cfg.reflection_path != "synthetic" && !fs::exists(cfg.reflection_path))
        throw IoError("reflection table '" + cfg.reflection_path + "' not found");
    return cfg;
}

double psd(double dbm, const ScenarioConfig& cfg) { return dbm - 10.0 * std::log10(cfg.bandwidth_hz / 1e6); }
double to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

json quality(const CdfResult& cdf, const CharFn& cf)
{
    const auto& g = *cf.grid();
    const double cut = cf.cutoff() < cf.size() ? g.omega(cf.cutoff()) : g.omega(g.omega.size() - 1);
    return {{"monotonization_max_adjustment", cdf.max_adjustment},
            {"tail_bound", cdf.tail_bound},
            {"cf_truncation_omega", cut},
            {"omega_points", g.omega.size()}};
}

void write_manifest(Outputs& out, const std::string& cmd, const ScenarioConfig& cfg, const Common& c,
                    const Timer& timer, json extra)
{
    {
        auto f = out.open("config.snapshot.json");
        f << scenario_to_json(cfg) << '\n';
    }
    json m;
    m["tool"] = "u6gsim";
    m["version"] = kVersion;
    m["command"] = cmd;
    m["config_file"] = "config.snapshot.json";
    m["config"] = json::parse(scenario_to_json(cfg));
    m["seeds"] = {{"base", cfg.seed}};
    m["threads"] = c.threads;
    m["deterministic"] = c.deterministic;
    if (!c.deterministic)
        m["timings_s"] = timer.to_json();
    for (auto& [k, v] : extra.items())
        m[k] = v;
    auto files = out.files();
    files.push_back("manifest.json");
    m["outputs"] = files;
    auto f = out.open("manifest.json");
    f << m.dump(2) << '\n';
}

int cmd_city(const Common& c)
{
    Timer timer;
    const ScenarioConfig cfg = load_config(c);
    auto p = load_pipeline(cfg);
    timer.lap("load");
    const CityResult r = run_city(*p);
    timer.lap("city");

    Outputs out(c.out_dir);
    {
        auto f = out.open("city_cdf.csv");
        f << "power_w,power_dbm,psd_dbm_per_mhz,inr_db,cdf\n";
        const double n = noise_power_w(cfg);
        for (Eigen::Index i = 0; i < r.total.cdf.x.size(); ++i) {
            const double x = r.total.cdf.x(i);
            f << x << ',' << to_dbm(x) << ',' << psd(to_dbm(x), cfg) << ',' << lin2db(x / n) << ','
              << r.total.cdf.F(i) << '\n';
        }
    }
    {
        auto f = out.open("city_categories_cdf.csv");
        f << "category,q,power_dbm,cdf\n";
        for (const auto& cat : r.categories) {
            const auto cdf = gil_pelaez_cdf(cat.cf, r.total.cdf.x);
            for (Eigen::Index i = 0; i < cdf.x.size(); ++i)
                f << to_string(cat.category) << ',' << cat.q << ',' << to_dbm(cdf.x(i)) << ',' << cdf.F(i) << '\n';
        }
    }
    std::set<double> pcts{10, 20, 30, 40, 50, 60, 70, 80, 90, cfg.percentile};
    double inr_p = 0.0;
    {
        auto f = out.open("city_inr.csv");
        f << "percentile,power_dbm,psd_dbm_per_mhz,inr_db\n";
        for (double pc : pcts) {
            const double inr = inr_percentile(r.total.cdf, cfg, pc);
            const double dbm = inr + to_dbm(noise_power_w(cfg));
            f << pc << ',' << dbm << ',' << psd(dbm, cfg) << ',' << inr << '\n';
            if (pc == cfg.percentile)
                inr_p = inr;
        }
    }
    timer.lap("write");
    json extra;
    extra["q"] = r.q;
    extra["macro_density_per_m2"] = cfg.macro_density();
    extra["elevation_deg"] = r.psi_deg;
    extra["alpha_db"] = r.alpha_db;
    extra["mean_interference_dbm"] = to_dbm(r.total.mean_w);
    extra["inr_percentile_db"] = {{"percentile", cfg.percentile}, {"inr_db", inr_p}};
    extra["quality"] = quality(r.total.cdf, r.total.cf);
    write_manifest(out, "city", cfg, c, timer, extra);

    std::printf("Q = %.2f (macro-equivalent), psi_s = %.1f deg, alpha = %.2f dB\n", r.q, r.psi_deg, r.alpha_db);
    std::printf("mean interference %.2f dBm, INR at %g%% = %.2f dB (threshold %.1f dB: %s)\n", to_dbm(r.total.mean_w),
                cfg.percentile, inr_p, cfg.inr_threshold_db, inr_p <= cfg.inr_threshold_db ? "met" : "exceeded");
    std::printf("outputs in %s\n", out.dir().string().c_str());
    return 0;
}

int cmd_footprint(const Common& c)
{
    Timer timer;
    const ScenarioConfig cfg = load_config(c);
    auto p = load_pipeline(cfg);
    timer.lap("load");
    const auto clusters = tessellate_footprint(cfg.sat, cfg.gain_step_db, cfg.elevation_step_deg);
    timer.lap("tessellate");
    const auto runs = run_footprint(*p, clusters);
    timer.lap("footprint");

    Outputs out(c.out_dir);
    {
        auto f = out.open("clusters.csv");
        f << "cluster,g_s_dbi,psi_s_deg,area_km2,pixels,mean_slant_km,alpha_db";
        for (double ra : cfg.urban_ratios)
            f << ",q_ra_" << ra;
        f << '\n';
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            const auto& k = clusters[i];
            f << "GC" << i + 1 << ',' << k.g_s << ',' << k.psi_s << ',' << k.area_m2 / 1e6 << ',' << k.pixels.size()
              << ',' << k.mean_slant_m / 1e3 << ',' << runs.front().clusters[i].alpha_db;
            for (const auto& r : runs)
                f << ',' << r.clusters[i].q;
            f << '\n';
        }
    }
    {
        auto f = out.open("footprint_inr.csv");
        f << "urban_ratio,cluster,q,mean_dbm,inr_p" << cfg.percentile << "_db\n";
        for (const auto& r : runs) {
            double q = 0.0;
            for (std::size_t i = 0; i < r.clusters.size(); ++i) {
                const auto& k = r.clusters[i];
                q += k.q;
                f << r.urban_ratio << ",GC" << i + 1 << ',' << k.q << ',' << to_dbm(k.mean_w) << ',' << k.inr_db
                  << '\n';
            }
            f << r.urban_ratio << ",aggregate," << q << ',' << to_dbm(r.total.mean_w) << ',' << r.inr_db << '\n';
        }
    }
    for (const auto& r : runs) {
        std::ostringstream name;
        name << "footprint_cdf_ra_" << r.urban_ratio << ".csv";
        auto f = out.open(name.str());
        f << "power_dbm,psd_dbm_per_mhz,inr_db";
        for (std::size_t i = 0; i < r.clusters.size(); ++i)
            f << ",cdf_GC" << i + 1;
        f << ",cdf_aggregate\n";
        const double n = noise_power_w(cfg);
        for (Eigen::Index j = 0; j < r.total.cdf.x.size(); ++j) {
            const double x = r.total.cdf.x(j);
            f << to_dbm(x) << ',' << psd(to_dbm(x), cfg) << ',' << lin2db(x / n);
            for (const auto& k : r.clusters)
                f << ',' << k.cdf.F(j);
            f << ',' << r.total.cdf.F(j) << '\n';
        }
    }
    timer.lap("write");

    json extra;
    extra["clusters"] = clusters.size();
    extra["macro_density_per_m2"] = cfg.macro_density();
    json agg = json::array();
    for (const auto& r : runs)
        agg.push_back({{"urban_ratio", r.urban_ratio},
                       {"mean_interference_dbm", to_dbm(r.total.mean_w)},
                       {"inr_percentile_db", r.inr_db},
                       {"quality", quality(r.total.cdf, r.total.cf)}});
    extra["aggregate"] = agg;
    write_manifest(out, "footprint", cfg, c, timer, extra);

    std::printf("%zu geographic clusters\n", clusters.size());
    for (const auto& r : runs)
        std::printf("R_a = %g: aggregate mean %.2f dBm, INR at %g%% = %.2f dB\n", r.urban_ratio,
                    to_dbm(r.total.mean_w), cfg.percentile, r.inr_db);
    std::printf("outputs in %s\n", out.dir().string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"u6gsim: aggregate IMT interference at a GEO satellite"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Common common;

    auto add_run_flags = [&](CLI::App* s, bool needs_config) {
        auto* o = s->add_option("--config", common.config, "scenario JSON file");
        if (needs_config)
            o->required();
        s->add_option("--out-dir", common.out_dir, "output directory");
        s->add_option("--seed", common.seed, "override the scenario seed")->each([&](const std::string&) {
            common.seed_given = true;
        });
        s->add_option("--threads", common.threads, "worker threads (results do not depend on it)");
        s->add_flag("--deterministic", common.deterministic, "omit wall-clock timings so manifests compare equal");
    };

    auto* city = app.add_subcommand("city", "city-level interference CDF and INR");
    add_run_flags(city, true);
    auto* fp = app.add_subcommand("footprint", "per-cluster and aggregate footprint interference");
    add_run_flags(fp, true);

    auto* val = app.add_subcommand("validate", "oracle and invariant suite");
    add_run_flags(val, false);
    std::string level = "fast", fault;
    val->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    val->add_option("--inject-fault", fault, "negative control: 'unwrap'")->check(CLI::IsMember({"unwrap"}));

    auto* gs = app.add_subcommand("geostats", "building statistics from a WKT dataset");
    std::string dataset, gs_out;
    ExtractOptions xo;
    double merge_tol = 0.5;
    bool no_merge = false;
    gs->add_option("dataset", dataset, "WKT polygons with heights")->required();
    gs->add_option("--out", gs_out, "statistics file")->required();
    gs->add_option("--dphi", xo.delta_phi, "azimuth step, deg");
    gs->add_option("--dh", xo.delta_h, "height step, m");
    gs->add_option("--da", xo.delta_a, "area step, m^2");
    gs->add_option("--dd", xo.delta_d, "distance step, m");
    gs->add_option("--merge-tol", merge_tol, "adjacency tolerance for merging, m");
    gs->add_flag("--no-merge", no_merge, "skip merge and convexification");

    auto* sc = app.add_subcommand("synth-city", "write a synthetic building dataset");
    std::string sc_out;
    bool manhattan = false;
    SyntheticCityOptions so;
    sc->add_option("--out", sc_out)->required();
    sc->add_option("--seed", so.seed);
    sc->add_flag("--manhattan", manhattan, "5x5 blocks of 20 m, 20 m streets, 20 m tall");

    auto* scl = app.add_subcommand("synth-clutter", "knife-edge clutter table from statistics");
    std::string scl_geo, scl_out, scl_refl;
    SyntheticClutterOptions co;
    scl->add_option("--geostats", scl_geo)->required();
    scl->add_option("--out", scl_out)->required();
    scl->add_option("--reflection-out", scl_refl, "also write a Fresnel reflection table");
    scl->add_option("--samples", co.n_samples);
    scl->add_option("--seed", co.seed);
    scl->add_option("--frequency", co.frequency_hz);
    scl->add_option("--azimuth", co.phi_s_deg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    try {
        set_thread_count(common.threads);
        if (*city)
            return cmd_city(common);
        if (*fp)
            return cmd_footprint(common);
        if (*val) {
            ValidationOptions vo;
            vo.level = level == "full" ? ValidationLevel::Full : ValidationLevel::Fast;
            vo.inject_unwrap_fault = fault == "unwrap";
            if (common.seed_given)
                vo.seed = common.seed;
            const auto res = run_validation(vo);
            bool ok = true;
            for (const auto& r : res) {
                std::printf("%s %-20s metric=%-12.4g threshold=%-8.3g %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.metric, r.threshold, r.invariant.c_str());
                ok = ok && r.pass;
            }
            if (val->count("--out-dir")) {
                Outputs out(common.out_dir);
                auto f = out.open("validation.json");
                f << validation_report_json(res) << '\n';
            }
            return ok ? 0 : 4;
        }
        if (*gs) {
            auto polys = load_dataset(dataset);
            if (!no_merge)
                polys = merge_and_convexify(polys, merge_tol);
            save_geostats(extract_stats(polys, xo), gs_out);
            std::printf("%zu buildings -> %s\n", polys.size(), gs_out.c_str());
            return 0;
        }
        if (*sc) {
            const auto polys = manhattan ? manhattan_grid() : synthetic_city(so);
            std::ofstream f(sc_out);
            if (!f)
                throw IoError("cannot write '" + sc_out + "'");
            write_dataset(f, polys);
            std::printf("%zu buildings -> %s\n", polys.size(), sc_out.c_str());
            return 0;
        }
        if (*scl) {
            const GeoStats geo = load_geostats(scl_geo);
            save_clutter_table(synthetic_clutter_table(geo, kTableElevations, kTableBsHeights, co), scl_out);
            if (!scl_refl.empty())
                save_clutter_table(synthetic_reflection_table(kTableElevations), scl_refl);
            std::printf("clutter table -> %s\n", scl_out.c_str());
            return 0;
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
