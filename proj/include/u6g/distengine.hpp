// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace u6g {

using cplx = std::complex<double>;

enum class PowerUnit { dBW, dBm };

// PDF of a dB-valued quantity on a uniform grid, plus an optional atom at -inf.
struct DbDistribution {
    double origin = 0.0;
    double step = 0.25;
    Eigen::ArrayXd weights;
    double neg_inf = 0.0;

    static DbDistribution delta(double value_db, double step = 0.25);
    static DbDistribution neg_inf_atom(double step = 0.25);
    // Samples equal to -inf go to the atom. Bins sit on the lattice k*step.
    static DbDistribution from_samples(const std::vector<double>& db, double step = 0.25);
    static DbDistribution from_points(const std::vector<double>& db, const std::vector<double>& prob,
                                      double step = 0.25);

    Eigen::Index size() const { return weights.size(); }
    double value(Eigen::Index i) const { return origin + static_cast<double>(i) * step; }
    double total() const { return weights.sum() + neg_inf; }
    // Mean over the finite part, in dB.
    double mean_db() const;
    // P(X <= x), the atom counts as below every x.
    double cdf(double x) const;
    double quantile(double q) const;
    double max_value() const;
};

DbDistribution db_shift(const DbDistribution& d, double delta_db);
DbDistribution db_convolve(const DbDistribution& a, const DbDistribution& b);
// Moves mass onto the lattice k*step (linear split, mean preserving).
DbDistribution db_resample(const DbDistribution& d, double step);
DbDistribution db_mixture(const std::vector<std::pair<double, DbDistribution>>& parts);
// Drops leading/trailing bins whose weight is below eps (mass folded into
// the nearest kept bin).
DbDistribution db_trim(const DbDistribution& d, double eps = 1e-15);
void db_normalize(DbDistribution& d);

// Linear-scale power distribution. Each point carries a symmetric triangular
// kernel of half-base `halfwidth` (zero for exact point masses).
struct LinearDistribution {
    Eigen::ArrayXd x;
    Eigen::ArrayXd w;
    Eigen::ArrayXd halfwidth;
    double zero_mass = 0.0;

    static LinearDistribution points(const std::vector<double>& x, const std::vector<double>& w);
    double mean() const;
};

LinearDistribution db_to_linear(const DbDistribution& d, PowerUnit unit);

struct OmegaGrid {
    // omega(0) == 0, then log-spaced.
    Eigen::ArrayXd omega;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double points_per_decade = 0.0;
};
using GridPtr = std::shared_ptr<const OmegaGrid>;

// Grid resolving powers in [x_lo, x_hi]: omega spans [1e-3/x_hi, 1e3/x_lo].
GridPtr make_omega_grid(double x_lo, double x_hi, double points_per_decade = 1024.0);

class CharFn {
public:
    CharFn() = default;
    CharFn(GridPtr grid, Eigen::ArrayXcd log_values, double zero_mass, Eigen::Index cutoff);

    const GridPtr& grid() const { return grid_; }
    const Eigen::ArrayXcd& log_values() const { return log_; }
    Eigen::ArrayXcd values() const;
    // Probability of exactly zero power.
    double zero_mass() const { return zero_mass_; }
    // First index where |Phi| fell below the underflow floor (size() if none).
    Eigen::Index cutoff() const { return cutoff_; }
    Eigen::Index size() const { return log_.size(); }

private:
    GridPtr grid_;
    Eigen::ArrayXcd log_;
    double zero_mass_ = 0.0;
    Eigen::Index cutoff_ = 0;
};

CharFn cf_from_linear(const LinearDistribution& d, const GridPtr& grid);
// Phase is unwrapped point to point; the grid must resolve it.
CharFn cf_from_values(const GridPtr& grid, const Eigen::ArrayXcd& values, double zero_mass = 0.0);
// Analytic log-CF, assumed continuous.
CharFn cf_from_log(const GridPtr& grid, const std::function<cplx(double)>& log_fn, double zero_mass = 0.0);
CharFn cf_one(const GridPtr& grid);
CharFn cf_pow(const CharFn& phi, double p);
CharFn cf_product(const std::vector<CharFn>& factors);
// Mean of the underlying power from the slope of the phase at the origin.
double cf_mean(const CharFn& phi);

struct CdfResult {
    Eigen::ArrayXd x;
    Eigen::ArrayXd F;
    // Largest change made by clipping plus the isotonic pass.
    double max_adjustment = 0.0;
    // Bound on the error from truncating the integral at the top of the grid.
    double tail_bound = 0.0;
};

CdfResult gil_pelaez_cdf(const CharFn& phi, const Eigen::ArrayXd& x);
Eigen::ArrayXd log_grid(double lo, double hi, int n);
// Power at which the CDF reaches p (log-linear interpolation).
double cdf_quantile(const CdfResult& cdf, double p);
// F(x) by log-linear interpolation, clamped to the end values outside the grid.
double cdf_at(const CdfResult& cdf, double x);
// Kolmogorov-Smirnov distance between the CF's CDF and a sample. The CDF is
// evaluated directly at up to max_probes order statistics.
double ks_distance(const CharFn& phi, std::vector<double> samples, std::size_t max_probes = 2000);

} // namespace u6g
