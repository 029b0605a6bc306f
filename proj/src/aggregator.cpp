// SPDX-License-Identifier: Apache-2.0
#include "u6g/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "u6g/antenna.hpp"
#include "u6g/linkbudget.hpp"

namespace u6g {

namespace {

long long psi_key(double psi) { return std::llround(psi * 1000.0); }

std::uint64_t term_tag(ModeTag m, const Category& c)
{
    return static_cast<std::uint64_t>(m) * 4 + (c.bs == BsClass::Macro ? 2 : 0) + (c.indoor ? 1 : 0);
}

[[noreturn]] void missing_bucket(const std::string& what, ModeTag m, double psi, double h)
{
    std::ostringstream s;
    s << what << " table missing for bucket (sign=" << to_string(mode_sign(m)) << ", psi_s=" << psi << ", h_BS=" << h
      << ")";
    throw ValidationError(s.str());
}

} // namespace

DbDistribution per_mode_distribution(ModeTag mode, const Category& cat, double psi_deg, double alpha_db,
                                     const ScenarioConfig& cfg, const GeoStats& geo, const ClutterTable* clutter,
                                     const ClutterTable* reflection, std::uint64_t seed)
{
    const bool use_clutter = cfg.method == Method::SMI;
    const bool use_refl = cfg.method == Method::GSMIReflection && mode_reflects(mode);
    const Aod aod = mode_aod(mode, psi_deg, cfg.sat_azimuth_deg);
    const ArrayConfig& arr = cfg.array(cat.bs);
    const auto samples = sample_gains(aod, arr, cfg.ue_model(cat.indoor), cat.bs, geo, cfg.gain_samples, seed);

    if (use_clutter && !clutter)
        missing_bucket("clutter", mode, psi_deg, samples.front().h_bs);
    if (use_refl && !reflection)
        missing_bucket("reflection", mode, psi_deg, samples.front().h_bs);

    // conditional on the loss bucket the gain and the loss are independent
    using Key = std::pair<const ClutterEntry*, const ClutterEntry*>;
    std::map<Key, std::vector<double>> groups;
    for (const auto& s : samples) {
        const ClutterEntry* c = use_clutter ? &clutter->lookup(mode_sign(mode), LossKind::Clutter, psi_deg, s.h_bs)
                                            : nullptr;
        const ClutterEntry* r =
            use_refl ? &reflection->lookup(mode_sign(mode), LossKind::Reflection, psi_deg, s.h_bs) : nullptr;
        groups[{c, r}].push_back(s.gain_db);
    }
    std::vector<std::pair<double, DbDistribution>> parts;
    // map order is by pointer; sort by table position for a stable sum
    std::vector<std::pair<Key, const std::vector<double>*>> ordered;
    for (const auto& [k, v] : groups)
        ordered.emplace_back(k, &v);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        auto rank = [](const ClutterEntry* e) { return e ? std::make_tuple(e->elevation_deg, e->bs_height_m) : std::make_tuple(0.0, 0.0); };
        return std::make_pair(rank(a.first.first), rank(a.first.second)) <
               std::make_pair(rank(b.first.first), rank(b.first.second));
    });
    for (const auto& [k, v] : ordered) {
        DbDistribution d = DbDistribution::from_samples(*v, cfg.db_step);
        if (k.first)
            d = db_convolve(d, entry_gain_pdf(*k.first, cfg.db_step));
        if (k.second)
            d = db_convolve(d, entry_gain_pdf(*k.second, cfg.db_step));
        parts.emplace_back(static_cast<double>(v->size()) / static_cast<double>(samples.size()), std::move(d));
    }
    DbDistribution out = db_mixture(parts);
    out = db_trim(out, 1e-16);
    db_normalize(out);
    return db_shift(out, arr.effective_power_dbm() + alpha_db);
}

CharFn category_cf(const std::vector<CharFn>& mode_cfs, const std::vector<double>& weights, double q,
                   const GridPtr& grid)
{
    if (mode_cfs.size() != weights.size())
        throw ValidationError("category_cf: one weight per mode");
    std::vector<CharFn> f{cf_one(grid)};
    for (std::size_t i = 0; i < mode_cfs.size(); ++i)
        f.push_back(cf_pow(mode_cfs[i], weights[i] * q));
    return cf_product(f);
}

CharFn city_cf(const std::vector<CategoryResult>& cats, double beta, const GridPtr& grid)
{
    std::vector<CharFn> outdoor{cf_one(grid)}, indoor{cf_one(grid)};
    for (const auto& c : cats)
        (c.category.indoor ? indoor : outdoor).push_back(c.cf);
    return cf_product({cf_pow(cf_product(outdoor), beta), cf_pow(cf_product(indoor), 1.0 - beta)});
}

std::vector<GeographicCluster> tessellate_footprint(const SatGeometry& geom, double gain_step_db, double elev_step_deg)
{
    if (!(gain_step_db > 0.0) || !(elev_step_deg > 0.0))
        throw ValidationError("tessellate_footprint: steps must be positive");
    const double re = geom.earth_radius_km * 1e3;
    const double floor_gain = geom.max_gain_dbi - 3.0;
    std::map<std::pair<long long, long long>, GeographicCluster> byKey;
    const int lon0 = static_cast<int>(std::lround(geom.longitude_deg));
    for (int lat = -89; lat <= 89; ++lat) {
        for (int lon = lon0 - 89; lon <= lon0 + 89; ++lon) {
            const SatView v = elevation_and_offnadir(lat, lon, geom);
            if (v.elevation_deg <= 0.0)
                continue;
            const double g = sat_gain(v.off_nadir_deg, geom);
            if (g < floor_gain)
                continue;
            const long long gk = static_cast<long long>(std::ceil(g / gain_step_db - 1e-9));
            long long ek = static_cast<long long>(std::floor(v.elevation_deg / elev_step_deg + 1e-9));
            // the nadir pixel joins the highest bucket below 90
            if (ek * elev_step_deg >= 90.0)
                ek = static_cast<long long>(std::ceil(90.0 / elev_step_deg)) - 1;
            auto& c = byKey[{gk, ek}];
            c.g_s = gk * gain_step_db;
            c.psi_s = ek * elev_step_deg;
            const double a = re * re * deg2rad(1.0) *
                             (std::sin(deg2rad(lat + 0.5)) - std::sin(deg2rad(lat - 0.5)));
            c.mean_slant_m += a * v.slant_range_m;
            c.area_m2 += a;
            c.pixels.emplace_back(lat, lon);
        }
    }
    std::vector<GeographicCluster> out;
    for (auto& [k, c] : byKey) {
        c.mean_slant_m /= c.area_m2;
        out.push_back(std::move(c));
    }
    return out;
}

Pipeline::Pipeline(ScenarioConfig cfg, GeoStats geo, std::optional<ClutterTable> clutter,
                   std::optional<ClutterTable> reflection)
    : cfg_(std::move(cfg)), geo_(std::move(geo)), clutter_(std::move(clutter)), reflection_(std::move(reflection))
{
    cfg_.validate();
    if (cfg_.method == Method::SMI && !clutter_)
        throw ValidationError("SMI needs a clutter table");
    if (cfg_.method == Method::GSMIReflection && !reflection_)
        throw ValidationError("GSMI+reflection needs a reflection table");
}

std::vector<ModeTag> Pipeline::modes(BsClass b) const
{
    // SMI: positive modes share the direct AoD, negative ones the ground AoD
    const std::vector<ModeTag> base =
        cfg_.method == Method::SMI ? std::vector<ModeTag>{ModeTag::DP, ModeTag::GR} : mode_set(b);
    std::vector<ModeTag> out;
    for (auto m : base)
        if (std::find(cfg_.modes.begin(), cfg_.modes.end(), m) != cfg_.modes.end())
            out.push_back(m);
    return out;
}

double Pipeline::occurrence(ModeTag m, BsClass b, double psi_deg)
{
    if (cfg_.method == Method::SMI)
        return 1.0;
    if (auto it = cfg_.occurrence_override.find(m); it != cfg_.occurrence_override.end())
        return it->second;
    const auto key = std::make_tuple(static_cast<int>(m), static_cast<int>(b), psi_key(psi_deg));
    std::lock_guard lk(mu_);
    if (auto it = occ_cache_.find(key); it != occ_cache_.end())
        return it->second;
    OccurrenceOptions o;
    o.n_samples = cfg_.occurrence_samples;
    o.seed = derive_seed(cfg_.seed, 0x0cc, static_cast<std::uint64_t>(b));
    o.independent_streets = cfg_.independent_streets;
    o.micro_height = cfg_.ue.micro_height;
    o.macro_min_height = cfg_.ue.macro_min_height;
    const double p = mean_occurrence(m, geo_, b, psi_deg, cfg_.sat_azimuth_deg, o);
    occ_cache_[key] = p;
    return p;
}

const DbDistribution& Pipeline::base_distribution(ModeTag m, const Category& c, double psi_deg)
{
    const auto key = std::make_tuple(static_cast<int>(m), static_cast<int>(c.bs), c.indoor ? 1 : 0, psi_key(psi_deg));
    std::lock_guard lk(mu_);
    if (auto it = dist_cache_.find(key); it != dist_cache_.end())
        return it->second;
    const auto seed = derive_seed(cfg_.seed, 0xd157 + term_tag(m, c), static_cast<std::uint64_t>(psi_key(psi_deg)));
    auto d = per_mode_distribution(m, c, psi_deg, 0.0, cfg_, geo_, clutter(), reflection(), seed);
    return dist_cache_.emplace(key, std::move(d)).first->second;
}

std::vector<ModeTerm> Pipeline::terms(const Category& c, double psi_deg, double alpha_db)
{
    std::vector<ModeTerm> out;
    for (auto m : modes(c.bs)) {
        const double w = occurrence(m, c.bs, psi_deg);
        if (w <= 0.0)
            continue;
        std::string label = to_string(m);
        if (cfg_.method == Method::SMI)
            label = to_string(mode_sign(m));
        out.push_back({m, label, db_shift(base_distribution(m, c, psi_deg), alpha_db), w});
    }
    return out;
}

double Pipeline::category_q(const Category& c, double q_macro) const
{
    return c.bs == BsClass::Macro ? q_macro : q_macro * cfg_.micro_per_macro;
}

double Pipeline::alpha_db(double g_s_dbi, std::optional<double> slant_m) const
{
    const double d = slant_m ? *slant_m : cfg_.sat_distance_km * 1e3;
    return compose_link(g_s_dbi, fspl(d, cfg_.frequency_hz), cfg_.pol_loss_db).alpha_db;
}

std::unique_ptr<Pipeline> load_pipeline(const ScenarioConfig& cfg)
{
    cfg.validate();
    GeoStats geo = load_geostats(cfg.geostats_path);
    std::optional<ClutterTable> clutter, refl;
    if (cfg.method == Method::SMI) {
        if (cfg.clutter_path == "synthetic") {
            SyntheticClutterOptions o;
            o.frequency_hz = cfg.frequency_hz;
            o.phi_s_deg = cfg.sat_azimuth_deg;
            o.n_samples = cfg.clutter_samples;
            o.seed = derive_seed(cfg.seed, 0xc1a);
            o.step = cfg.db_step;
            clutter = synthetic_clutter_table(geo, kTableElevations, kTableBsHeights, o);
        } else {
            clutter = load_clutter_table(cfg.clutter_path);
        }
    }
    if (cfg.method == Method::GSMIReflection)
        refl = cfg.reflection_path == "synthetic" ? synthetic_reflection_table(kTableElevations)
                                                  : load_clutter_table(cfg.reflection_path);
    return std::make_unique<Pipeline>(cfg, std::move(geo), std::move(clutter), std::move(refl));
}

std::vector<AggregateTerm> city_terms(Pipeline& p, double psi_deg, double alpha_db, double q)
{
    const auto& cfg = p.config();
    std::vector<AggregateTerm> out;
    for (const auto& c : cfg.categories) {
        const double outer = c.indoor ? 1.0 - cfg.outdoor_fraction : cfg.outdoor_fraction;
        const double n = outer * p.category_q(c, q);
        for (auto& t : p.terms(c, psi_deg, alpha_db))
            out.push_back({std::move(t.dist), n * t.weight, n, t.weight, c, t.mode});
    }
    return out;
}

namespace {

double linear_mean_w(const DbDistribution& d) { return db_to_linear(d, PowerUnit::dBm).mean(); }

double terms_mean(const std::vector<AggregateTerm>& ts)
{
    double m = 0.0;
    for (const auto& t : ts)
        m += t.exponent * linear_mean_w(t.dist);
    return m;
}

Eigen::ArrayXd cdf_axis(const OmegaGrid& g, int n) { return log_grid(g.x_lo * 10.0, g.x_hi / 10.0, n); }

// CFs of many distributions on one grid, in parallel.
std::vector<CharFn> cfs_for(const std::vector<const DbDistribution*>& ds, const GridPtr& grid)
{
    std::vector<CharFn> out(ds.size());
    parallel_for(ds.size(), [&](std::size_t i) { out[i] = cf_from_linear(db_to_linear(*ds[i], PowerUnit::dBm), grid); });
    return out;
}

} // namespace

GridPtr grid_for_mean(const ScenarioConfig& cfg, double mean_w, double low_mean_w)
{
    if (!(mean_w > 0.0))
        throw NumericError("aggregate mean interference is zero; nothing to invert");
    const double lo = (low_mean_w > 0.0 ? low_mean_w : mean_w) * cfg.x_low_factor;
    return make_omega_grid(lo, mean_w * cfg.x_high_factor, cfg.omega_points_per_decade);
}

namespace {

// Category results for a link with the mode CFs already on `grid`.
std::vector<CategoryResult> build_categories(Pipeline& p, double psi_deg, double alpha_db, double q,
                                             const GridPtr& grid)
{
    const auto& cfg = p.config();
    std::vector<CategoryResult> cats;
    std::vector<const DbDistribution*> ds;
    for (const auto& c : cfg.categories) {
        CategoryResult r;
        r.category = c;
        r.q = p.category_q(c, q);
        r.terms = p.terms(c, psi_deg, alpha_db);
        cats.push_back(std::move(r));
    }
    for (auto& c : cats)
        for (auto& t : c.terms)
            ds.push_back(&t.dist);
    auto cfs = cfs_for(ds, grid);
    std::size_t k = 0;
    for (auto& c : cats) {
        std::vector<double> w;
        for (auto& t : c.terms) {
            c.mode_cfs.push_back(std::move(cfs[k++]));
            w.push_back(t.weight);
        }
        c.cf = category_cf(c.mode_cfs, w, c.q, grid);
    }
    return cats;
}

} // namespace

CityResult run_city(Pipeline& p, double psi_deg, double alpha_db, double q, GridPtr grid)
{
    const auto& cfg = p.config();
    CityResult r;
    r.q = q;
    r.psi_deg = psi_deg;
    r.alpha_db = alpha_db;
    const double mean = terms_mean(city_terms(p, psi_deg, alpha_db, q));
    if (!grid)
        grid = grid_for_mean(cfg, mean);
    r.categories = build_categories(p, psi_deg, alpha_db, q, grid);
    r.total.grid = grid;
    r.total.cf = city_cf(r.categories, cfg.outdoor_fraction, grid);
    r.total.mean_w = mean;
    r.total.cdf = gil_pelaez_cdf(r.total.cf, cdf_axis(*grid, cfg.cdf_points));
    return r;
}

CityResult run_city(Pipeline& p)
{
    const auto& cfg = p.config();
    return run_city(p, cfg.city_elevation(), p.alpha_db(cfg.city_sat_gain_dbi), cfg.city_q());
}

double cluster_q(const ScenarioConfig& cfg, const GeographicCluster& c, double urban_ratio)
{
    return cfg.macro_density() * cfg.loading_factor * cfg.tdd_factor * urban_ratio * cfg.built_ratio * c.area_m2;
}

std::vector<FootprintRun> run_footprint(Pipeline& p, const std::vector<GeographicCluster>& clusters)
{
    const auto& cfg = p.config();
    if (clusters.empty())
        throw ValidationError("run_footprint: no clusters");
    if (cfg.urban_ratios.empty())
        throw ValidationError("run_footprint: no urban ratios");
    const double ra_max = *std::max_element(cfg.urban_ratios.begin(), cfg.urban_ratios.end());
    const double ra_min = *std::min_element(cfg.urban_ratios.begin(), cfg.urban_ratios.end());

    // links and the per-mode distributions, then one grid for everything
    std::vector<double> alphas;
    std::vector<double> unit_means; // cluster means at R_a = 1
    for (const auto& c : clusters) {
        const double a = p.alpha_db(c.g_s, cfg.per_pixel_range ? std::optional(c.mean_slant_m) : std::nullopt);
        alphas.push_back(a);
        unit_means.push_back(terms_mean(city_terms(p, c.psi_s, a, cluster_q(cfg, c, 1.0))));
    }
    double total_hi = 0.0, low = std::numeric_limits<double>::infinity();
    for (double m : unit_means) {
        total_hi += m * ra_max;
        if (m > 0.0)
            low = std::min(low, m * ra_min);
    }
    const GridPtr grid = grid_for_mean(cfg, total_hi, std::isfinite(low) ? low : 0.0);

    // mode CFs do not depend on R_a
    std::vector<std::vector<CategoryResult>> per_cluster;
    for (std::size_t i = 0; i < clusters.size(); ++i)
        per_cluster.push_back(build_categories(p, clusters[i].psi_s, alphas[i], cluster_q(cfg, clusters[i], 1.0), grid));

    const Eigen::ArrayXd axis = cdf_axis(*grid, cfg.cdf_points);
    std::vector<FootprintRun> runs;
    for (double ra : cfg.urban_ratios) {
        FootprintRun run;
        run.urban_ratio = ra;
        run.clusters.resize(clusters.size());
        parallel_for(clusters.size(), [&](std::size_t i) {
            auto cats = per_cluster[i];
            const double q = cluster_q(cfg, clusters[i], ra);
            for (auto& c : cats) {
                std::vector<double> w;
                for (const auto& t : c.terms)
                    w.push_back(t.weight);
                c.q = p.category_q(c.category, q);
                c.cf = category_cf(c.mode_cfs, w, c.q, grid);
            }
            ClusterResult& r = run.clusters[i];
            r.cluster = clusters[i];
            r.q = q;
            r.alpha_db = alphas[i];
            r.cf = city_cf(cats, cfg.outdoor_fraction, grid);
            r.mean_w = unit_means[i] * ra;
            r.cdf = gil_pelaez_cdf(r.cf, axis);
            r.inr_db = inr_percentile(r.cdf, cfg, cfg.percentile);
        });
        std::vector<CharFn> all;
        for (const auto& c : run.clusters) {
            all.push_back(c.cf);
            run.total.mean_w += c.mean_w;
        }
        run.total.grid = grid;
        run.total.cf = cf_product(all);
        run.total.cdf = gil_pelaez_cdf(run.total.cf, axis);
        run.inr_db = inr_percentile(run.total.cdf, cfg, cfg.percentile);
        runs.push_back(std::move(run));
    }
    return runs;
}

double noise_power_w(const ScenarioConfig& cfg) { return kBoltzmann * cfg.t_sys_k * cfg.bandwidth_hz; }

double inr_percentile(const CdfResult& cdf, const ScenarioConfig& cfg, double percentile)
{
    if (!(percentile > 0.0 && percentile < 100.0))
        throw ValidationError("inr_percentile: percentile must be in (0, 100)");
    const double i = cdf_quantile(cdf, percentile / 100.0);
    return lin2db(i) - lin2db(noise_power_w(cfg));
}

double inr_percentile(const CharFn& phi, const ScenarioConfig& cfg, double percentile)
{
    return inr_percentile(gil_pelaez_cdf(phi, cdf_axis(*phi.grid(), cfg.cdf_points)), cfg, percentile);
}

namespace {

// Loss entries at the nearest tabulated elevation for one sign.
struct LossPicker {
    std::vector<const ClutterEntry*> entries;

    LossPicker(const ClutterTable* t, ModeSign sign, LossKind kind, double psi)
    {
        if (!t)
            return;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : t->entries)
            if (e.sign == sign && e.kind == kind)
                best = std::min(best, std::abs(e.elevation_deg - psi));
        for (const auto& e : t->entries)
            if (e.sign == sign && e.kind == kind && std::abs(std::abs(e.elevation_deg - psi) - best) <= 1e-9)
                entries.push_back(&e);
    }
    bool active() const { return !entries.empty(); }
    double draw(double h_bs, Rng& rng) const
    {
        const ClutterEntry* e = entries.front();
        for (const auto* c : entries)
            if (std::abs(c->bs_height_m - h_bs) < std::abs(e->bs_height_m - h_bs))
                e = c;
        const double u = rng.uniform();
        const auto it = std::lower_bound(e->cdf.begin(), e->cdf.end(), u,
                                         [](const std::pair<double, double>& p, double v) { return p.second < v; });
        return it == e->cdf.end() ? e->cdf.back().first : it->first;
    }
};

} // namespace

std::vector<double> mc_oracle(const std::vector<AggregateTerm>& terms, Pipeline& p, double psi_deg, double alpha_db,
                              std::size_t n_trials, std::uint64_t seed, OracleCounts counts)
{
    const auto& cfg = p.config();
    std::vector<double> out(n_trials, 0.0);
    if (n_trials == 0)
        return out;
    constexpr std::size_t chunk = 1 << 14;
    const std::size_t nchunks = (n_trials + chunk - 1) / chunk;

    for (std::size_t t = 0; t < terms.size(); ++t) {
        const auto& term = terms[t];
        const ModeTag m = term.mode;
        const Category cat = term.category;
        const ArrayConfig& arr = cfg.array(cat.bs);
        const Aod aod = mode_aod(m, psi_deg, cfg.sat_azimuth_deg);
        const ServedUeModel ue = cfg.ue_model(cat.indoor);
        const double p_dbm = arr.effective_power_dbm() + alpha_db;
        const LossPicker clut(cfg.method == Method::SMI ? p.clutter() : nullptr, mode_sign(m), LossKind::Clutter,
                              psi_deg);
        const LossPicker refl(cfg.method == Method::GSMIReflection && mode_reflects(m) ? p.reflection() : nullptr,
                              mode_sign(m), LossKind::Reflection, psi_deg);
        if (cfg.method == Method::SMI && !clut.active())
            missing_bucket("clutter", m, psi_deg, 0.0);

        parallel_for(nchunks, [&](std::size_t c) {
            const std::size_t lo = c * chunk, hi = std::min(n_trials, lo + chunk);
            Rng rng(derive_seed(seed, 0x04ac1e + t, c));
            // draws per trial
            std::vector<std::size_t> k(hi - lo);
            std::size_t total = 0;
            for (auto& v : k) {
                if (counts == OracleCounts::Exponent) {
                    const double base = std::floor(term.exponent);
                    v = static_cast<std::size_t>(base) + (rng.uniform() < term.exponent - base ? 1 : 0);
                } else {
                    const double base = std::floor(term.bs_count);
                    const auto nbs = static_cast<std::size_t>(base) + (rng.uniform() < term.bs_count - base ? 1 : 0);
                    v = 0;
                    for (std::size_t b = 0; b < nbs; ++b)
                        v += rng.uniform() < term.occurrence ? 1 : 0;
                }
                total += v;
            }
            if (total == 0)
                return;
            const auto g = sample_gains(aod, arr, ue, cat.bs, p.geo(), total, derive_seed(seed, 0x9a1 + t, c));
            std::size_t j = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (std::size_t r = 0; r < k[i - lo]; ++r, ++j) {
                    if (!std::isfinite(g[j].gain_db))
                        continue;
                    double db = p_dbm + g[j].gain_db;
                    if (clut.active())
                        db -= clut.draw(g[j].h_bs, rng);
                    if (refl.active())
                        db -= refl.draw(g[j].h_bs, rng);
                    s += std::pow(10.0, (db - 30.0) / 10.0);
                }
                out[i] += s;
            }
        });
    }
    return out;
}

std::vector<double> mc_oracle(Pipeline& p, double psi_deg, double alpha_db, double q, std::size_t n_trials,
                              std::uint64_t seed, OracleCounts counts)
{
    return mc_oracle(city_terms(p, psi_deg, alpha_db, q), p, psi_deg, alpha_db, n_trials, seed, counts);
}

} // namespace u6g
