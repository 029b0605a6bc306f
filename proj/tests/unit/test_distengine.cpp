// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "u6g/common.hpp"
#include "u6g/distengine.hpp"

using namespace u6g;
using doctest::Approx;

namespace {

DbDistribution random_hist(Rng& r, double lo, int bins)
{
    std::vector<double> v, p;
    for (int i = 0; i < bins; ++i) {
        v.push_back(lo + 0.25 * i);
        p.push_back(r.uniform() + 0.05);
    }
    double s = 0;
    for (double x : p)
        s += x;
    for (double& x : p)
        x /= s;
    return DbDistribution::from_points(v, p);
}

double draw(const DbDistribution& d, Rng& r)
{
    double u = r.uniform(), acc = d.neg_inf;
    if (u < acc)
        return -INFINITY;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        acc += d.weights(i);
        if (u < acc)
            return d.value(i);
    }
    return d.value(d.size() - 1);
}

double max_abs_diff(const DbDistribution& a, const DbDistribution& b)
{
    double m = std::abs(a.neg_inf - b.neg_inf);
    double lo = std::min(a.origin, b.origin), hi = std::max(a.max_value(), b.max_value());
    for (double x = lo; x <= hi + 1e-9; x += a.step)
        m = std::max(m, std::abs(a.cdf(x) - b.cdf(x)));
    return m;
}

} // namespace

TEST_CASE("dB convolution")
{
    auto d = db_convolve(DbDistribution::delta(3.0), DbDistribution::delta(-7.5));
    CHECK(d.quantile(0.5) == Approx(-4.5));
    CHECK(d.total() == Approx(1.0));

    auto two = DbDistribution::from_points({0.0, 0.25}, {0.5, 0.5});
    auto tri = db_convolve(two, two);
    CHECK(tri.cdf(0.0) == Approx(0.25));
    CHECK(tri.cdf(0.25) == Approx(0.75));
    CHECK(tri.cdf(0.5) == Approx(1.0));

    auto atom = DbDistribution::from_points({1.0}, {1.0});
    atom.weights *= 0.6;
    atom.neg_inf = 0.4;
    auto a2 = db_convolve(atom, two);
    CHECK(a2.neg_inf == Approx(0.4));
    CHECK(a2.total() == Approx(1.0));

    Rng r(31);
    auto a = random_hist(r, -10, 17), b = random_hist(r, 4, 9), c = random_hist(r, -60, 30);
    CHECK(max_abs_diff(db_convolve(a, b), db_convolve(b, a)) < 1e-9);
    CHECK(max_abs_diff(db_convolve(db_convolve(a, b), c), db_convolve(a, db_convolve(b, c))) < 1e-9);
}

TEST_CASE("four-term chain against sampled sums")
{
    Rng r(77);
    auto pt = random_hist(r, 20, 8), ga = random_hist(r, -30, 200), gc = random_hist(r, -40, 120),
         al = random_hist(r, -180, 12);
    auto chain = db_convolve(db_convolve(db_convolve(pt, ga), gc), al);
    const int n = 1000000;
    std::vector<double> s(n);
    Rng mc(78);
    for (auto& x : s)
        x = draw(pt, mc) + draw(ga, mc) + draw(gc, mc) + draw(al, mc);
    std::sort(s.begin(), s.end());
    double ks = 0;
    for (double x = chain.origin; x <= chain.max_value(); x += 0.25) {
        double emp = static_cast<double>(std::upper_bound(s.begin(), s.end(), x + 1e-9) - s.begin()) / n;
        ks = std::max(ks, std::abs(emp - chain.cdf(x)));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("dB to linear")
{
    auto w = db_to_linear(DbDistribution::delta(0.0), PowerUnit::dBW);
    CHECK(w.mean() == Approx(1.0));
    auto m = db_to_linear(DbDistribution::delta(-30.0), PowerUnit::dBm);
    CHECK(m.mean() == Approx(1e-6));

    auto z = DbDistribution::delta(0.0);
    z.weights *= 0.3;
    z.neg_inf = 0.7;
    CHECK(db_to_linear(z, PowerUnit::dBW).zero_mass == Approx(0.7));

    // mean against sampled 10^(X/10)
    Rng r(5);
    auto d = random_hist(r, -20, 80);
    auto lin = db_to_linear(d, PowerUnit::dBW);
    Rng mc(6);
    double s = 0;
    const int n = 2000000;
    for (int i = 0; i < n; ++i)
        s += db2lin(draw(d, mc));
    CHECK(std::abs(lin.mean() / (s / n) - 1.0) < 1e-3);
}

TEST_CASE("characteristic functions")
{
    auto grid = make_omega_grid(0.1, 10.0, 256);
    CHECK(grid->omega(0) == 0.0);

    auto delta = cf_from_linear(LinearDistribution::points({2.0}, {1.0}), grid);
    auto dv = delta.values();
    CHECK(dv(0).real() == 1.0);
    CHECK(dv(0).imag() == 0.0);
    for (Eigen::Index i = 0; i < dv.size(); i += 37) {
        CHECK(std::abs(dv(i)) == Approx(1.0).epsilon(1e-12));
        CHECK(std::arg(dv(i) * std::exp(cplx(0, -2.0 * grid->omega(i)))) == Approx(0.0).scale(1.0));
    }

    // value from tests/support/oracles.py at omega = 0.9
    auto g1 = std::make_shared<OmegaGrid>();
    g1->omega = Eigen::ArrayXd::LinSpaced(91, 0.0, 0.9);
    g1->x_lo = 1;
    g1->x_hi = 4;
    auto tp = cf_from_linear(LinearDistribution::points({1.0, 4.0}, {0.3, 0.7}), g1).values();
    CHECK(tp(90).real() == Approx(-0.4412479009527035).epsilon(1e-9));
    CHECK(tp(90).imag() == Approx(-0.07476623741815172).epsilon(1e-9));

    Rng r(3);
    auto d = db_to_linear(random_hist(r, -5, 40), PowerUnit::dBW);
    auto phi = cf_from_linear(d, grid);
    CHECK(phi.values()(0) == cplx(1.0, 0.0));
    CHECK(phi.values().abs().maxCoeff() <= 1.0 + 1e-12);
    for (double p : {0.0, 0.3, 1.0, 2.5, 17.3}) {
        auto q = cf_pow(phi, p);
        CHECK(q.values()(0) == cplx(1.0, 0.0));
        CHECK(q.values().abs().maxCoeff() <= 1.0 + 1e-12);
    }
    CHECK_THROWS(cf_pow(phi, -1.0));

    auto id = cf_pow(phi, 1.0).values();
    CHECK((id - phi.values()).abs().maxCoeff() < 1e-12);
    auto sq = cf_pow(phi, 2.0).values();
    auto pv = phi.values();
    CHECK((sq - pv * pv).abs().maxCoeff() < 1e-9);
    auto prod = cf_product({phi, cf_one(grid)}).values();
    CHECK((prod - pv).abs().maxCoeff() < 1e-12);
    auto five = cf_product({phi, phi, phi, phi, phi}).values();
    CHECK((five - cf_pow(phi, 5.0).values()).abs().maxCoeff() < 1e-9);

    // mean scales linearly with the exponent
    for (double p : {0.3, 1.0, 17.3, 155.5})
        CHECK(std::abs(cf_mean(cf_pow(phi, p)) / (p * cf_mean(phi)) - 1.0) < 5e-3);
    CHECK(std::abs(cf_mean(phi) / d.mean() - 1.0) < 5e-3);
}

TEST_CASE("Gil-Pelaez inversion of analytic CFs")
{
    auto grid = make_omega_grid(1e-3, 1e2, 1024);
    auto expo = cf_from_log(grid, [](double w) { return -std::log(cplx(1.0, -w)); });
    Eigen::ArrayXd x(1);
    x << std::log(2.0);
    CHECK(gil_pelaez_cdf(expo, x).F(0) == Approx(0.5).epsilon(1e-3));

    auto gam = cf_from_log(grid, [](double w) { return -3.0 * std::log(cplx(1.0, -w)); });
    Eigen::ArrayXd xs(2);
    xs << 2.0, 5.0;
    auto g = gil_pelaez_cdf(gam, xs);
    CHECK(std::abs(g.F(0) - 0.32332358381693654) < 1e-3);
    CHECK(std::abs(g.F(1) - 0.8753479805169189) < 1e-3);

    // exponentials with means 1 and 3
    auto e3 = cf_from_log(grid, [](double w) { return -std::log(cplx(1.0, -3.0 * w)); });
    Eigen::ArrayXd x25(1);
    x25 << 2.5;
    CHECK(std::abs(gil_pelaez_cdf(cf_product({expo, e3}), x25).F(0) - 0.389145186551332) < 1e-3);

    auto xsweep = log_grid(1e-3, 1e2, 400);
    auto c = gil_pelaez_cdf(gam, xsweep);
    CHECK(c.F.minCoeff() >= 0.0);
    CHECK(c.F.maxCoeff() <= 1.0);
    for (Eigen::Index i = 1; i < c.F.size(); ++i)
        CHECK(c.F(i) >= c.F(i - 1));
    CHECK(c.max_adjustment < 1e-3);

    // point mass at 2: step within one cell of the x grid
    auto pg = make_omega_grid(0.5, 5, 1024);
    auto pm = cf_from_linear(LinearDistribution::points({2.0}, {1.0}), pg);
    auto xx = log_grid(0.5, 5, 200);
    auto pc = gil_pelaez_cdf(pm, xx);
    for (Eigen::Index i = 0; i < xx.size(); ++i) {
        const double ratio = xx(i) / 2.0;
        if (ratio < 0.985)
            CHECK(pc.F(i) < 0.05);
        if (ratio > 1.015)
            CHECK(pc.F(i) > 0.95);
    }
    CHECK(cdf_quantile(c, 0.5) == Approx(2.674060313723561).epsilon(5e-3));
}

TEST_CASE("KS distance between a CF and a sample")
{
    auto grid = make_omega_grid(1e-3, 1e2, 512);
    auto expo = cf_from_log(grid, [](double w) { return -std::log(cplx(1.0, -w)); });
    Rng r(4);
    std::vector<double> s(50000);
    for (auto& v : s)
        v = -std::log1p(-r.uniform());
    CHECK(ks_distance(expo, s) < 0.01);
    for (auto& v : s)
        v *= 2.0;
    CHECK(ks_distance(expo, s) > 0.1);
}
