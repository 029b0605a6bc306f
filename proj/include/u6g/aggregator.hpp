// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "u6g/clutter.hpp"
#include "u6g/distengine.hpp"
#include "u6g/geomstats.hpp"
#include "u6g/scenario.hpp"

namespace u6g {

// Received power at the satellite (dBm) for one mode of one BS, deconditioned
// over the random parameters. alpha_db = G_s - A_s - A_pol.
DbDistribution per_mode_distribution(ModeTag mode, const Category& cat, double psi_deg, double alpha_db,
                                     const ScenarioConfig& cfg, const GeoStats& geo, const ClutterTable* clutter,
                                     const ClutterTable* reflection, std::uint64_t seed);

struct ModeTerm {
    ModeTag mode;
    // SMI labels the two modes positive/negative
    std::string label;
    DbDistribution dist;
    // per unit Q: 1 for SMI, the mean occurrence for GSMI
    double weight = 1.0;
};

struct CategoryResult {
    Category category;
    double q = 0.0;
    std::vector<ModeTerm> terms;
    std::vector<CharFn> mode_cfs;
    CharFn cf;
};

// Product over modes of Phi_l^(weight_l * q).
CharFn category_cf(const std::vector<CharFn>& mode_cfs, const std::vector<double>& weights, double q,
                   const GridPtr& grid);

// (Phi_mo Phi_Mo)^beta (Phi_mi Phi_Mi)^(1-beta); absent categories count as 1.
CharFn city_cf(const std::vector<CategoryResult>& cats, double beta, const GridPtr& grid);

struct GeographicCluster {
    double g_s = 0.0;   // dBi, quantized
    double psi_s = 0.0; // deg, quantized
    double area_m2 = 0.0;
    double mean_slant_m = 0.0; // area weighted
    std::vector<std::pair<double, double>> pixels; // (lat, lon)
};

// Pixels of 1 deg inside the 3 dB footprint grouped by quantized (G_s, psi_s),
// sorted by (G_s, psi_s).
std::vector<GeographicCluster> tessellate_footprint(const SatGeometry& geom, double gain_step_db = 1.0,
                                                    double elev_step_deg = 10.0);

// Caches per-mode distributions and occurrence probabilities so a run can
// re-use them across clusters and area ratios.
class Pipeline {
public:
    Pipeline(ScenarioConfig cfg, GeoStats geo, std::optional<ClutterTable> clutter = std::nullopt,
             std::optional<ClutterTable> reflection = std::nullopt);

    const ScenarioConfig& config() const { return cfg_; }
    const GeoStats& geo() const { return geo_; }
    const ClutterTable* clutter() const { return clutter_ ? &*clutter_ : nullptr; }
    const ClutterTable* reflection() const { return reflection_ ? &*reflection_ : nullptr; }

    // Modes entering a category under the method in force.
    std::vector<ModeTag> modes(BsClass b) const;
    double occurrence(ModeTag m, BsClass b, double psi_deg);
    // Per-mode distribution with alpha = 0; shift by alpha for a link.
    const DbDistribution& base_distribution(ModeTag m, const Category& c, double psi_deg);
    std::vector<ModeTerm> terms(const Category& c, double psi_deg, double alpha_db);
    // Q of a category from the macro-equivalent Q.
    double category_q(const Category& c, double q_macro) const;

    // Alpha for a satellite gain, with the fixed or given range.
    double alpha_db(double g_s_dbi, std::optional<double> slant_m = std::nullopt) const;

private:
    ScenarioConfig cfg_;
    GeoStats geo_;
    std::optional<ClutterTable> clutter_;
    std::optional<ClutterTable> reflection_;
    std::mutex mu_;
    std::map<std::tuple<int, int, int, long long>, DbDistribution> dist_cache_;
    std::map<std::tuple<int, int, long long>, double> occ_cache_;
};

inline const std::vector<double> kTableElevations{10, 20, 30, 40, 50, 60, 70, 80, 90};
inline const std::vector<double> kTableBsHeights{6, 10, 15, 20, 25, 30, 40, 50, 60};

// Loads the geometry statistics and whichever loss table the method needs
// ("synthetic" builds one from the statistics).
std::unique_ptr<Pipeline> load_pipeline(const ScenarioConfig& cfg);

// A linear-power summand and how many times it enters the aggregate.
struct AggregateTerm {
    DbDistribution dist;
    double exponent = 0.0;
    // exponent = bs_count * occurrence
    double bs_count = 0.0;
    double occurrence = 1.0;
    Category category;
    ModeTag mode;
};

struct AggregateCdf {
    GridPtr grid;
    CharFn cf;
    CdfResult cdf;
    double mean_w = 0.0;
};

struct CityResult {
    double q = 0.0;
    double psi_deg = 0.0;
    double alpha_db = 0.0;
    std::vector<CategoryResult> categories;
    AggregateCdf total;
};

// Flattened composition for one link (psi, alpha) and macro-equivalent Q.
std::vector<AggregateTerm> city_terms(Pipeline& p, double psi_deg, double alpha_db, double q);

// Omega grid for an aggregate with mean mean_w.
GridPtr grid_for_mean(const ScenarioConfig& cfg, double mean_w, double low_mean_w = 0.0);

CityResult run_city(Pipeline& p, double psi_deg, double alpha_db, double q, GridPtr grid = nullptr);
CityResult run_city(Pipeline& p);

struct ClusterResult {
    GeographicCluster cluster;
    double q = 0.0;
    double alpha_db = 0.0;
    CharFn cf;
    CdfResult cdf;
    double mean_w = 0.0;
    double inr_db = 0.0;
};

struct FootprintRun {
    double urban_ratio = 0.0;
    std::vector<ClusterResult> clusters;
    AggregateCdf total;
    double inr_db = 0.0;
};

// Phi_FP = product over clusters of the city composition with
// Q_v = lambda rho F_T R_a R_b S_v.
std::vector<FootprintRun> run_footprint(Pipeline& p, const std::vector<GeographicCluster>& clusters);
double cluster_q(const ScenarioConfig& cfg, const GeographicCluster& c, double urban_ratio);

// INR at the percentile, dB: 10log10(I) - 10log10(k T B).
double inr_percentile(const CdfResult& cdf, const ScenarioConfig& cfg, double percentile);
double inr_percentile(const CharFn& phi, const ScenarioConfig& cfg, double percentile);
double noise_power_w(const ScenarioConfig& cfg);

enum class OracleCounts {
    // each term enters floor(e) times plus once with probability frac(e)
    Exponent,
    // floor(N) BSs (plus one w.p. frac(N)), each carrying the mode w.p. its occurrence
    Thinned,
};

// Direct simulation of the aggregate (W): fresh parameters, gains and losses
// for every BS and mode, summed in linear power.
std::vector<double> mc_oracle(const std::vector<AggregateTerm>& terms, Pipeline& p, double psi_deg, double alpha_db,
                              std::size_t n_trials, std::uint64_t seed, OracleCounts counts = OracleCounts::Exponent);
std::vector<double> mc_oracle(Pipeline& p, double psi_deg, double alpha_db, double q, std::size_t n_trials,
                              std::uint64_t seed, OracleCounts counts = OracleCounts::Exponent);

} // namespace u6g
