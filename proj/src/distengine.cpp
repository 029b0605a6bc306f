// SPDX-License-Identifier: Apache-2.0
#include "u6g/distengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "u6g/common.hpp"

namespace u6g {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// ln of the smallest |Phi| whose phase we still trust
constexpr double kLogFloor = -690.0;
constexpr double kLogZero = -745.0;

bool same_step(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

// Offset of the origin from the lattice k*step, in units of step.
double lattice_phase(const DbDistribution& d)
{
    double t = d.origin / d.step;
    return t - std::round(t);
}

DbDistribution from_indexed(const std::vector<long long>& idx, const std::vector<double>& w, double atom,
                            double step)
{
    DbDistribution d;
    d.step = step;
    d.neg_inf = atom;
    if (idx.empty()) {
        d.weights.resize(0);
        return d;
    }
    auto [lo, hi] = std::minmax_element(idx.begin(), idx.end());
    d.origin = static_cast<double>(*lo) * step;
    d.weights = Eigen::ArrayXd::Zero(*hi - *lo + 1);
    for (std::size_t i = 0; i < idx.size(); ++i)
        d.weights(idx[i] - *lo) += w[i];
    return d;
}

} // namespace

DbDistribution DbDistribution::delta(double value_db, double step)
{
    if (std::isinf(value_db) && value_db < 0)
        return neg_inf_atom(step);
    DbDistribution d;
    d.origin = value_db;
    d.step = step;
    d.weights = Eigen::ArrayXd::Ones(1);
    return d;
}

DbDistribution DbDistribution::neg_inf_atom(double step)
{
    DbDistribution d;
    d.step = step;
    d.weights.resize(0);
    d.neg_inf = 1.0;
    return d;
}

DbDistribution DbDistribution::from_samples(const std::vector<double>& db, double step)
{
    if (db.empty())
        throw ValidationError("from_samples: no samples");
    std::vector<double> p(db.size(), 1.0 / static_cast<double>(db.size()));
    return from_points(db, p, step);
}

DbDistribution DbDistribution::from_points(const std::vector<double>& db, const std::vector<double>& prob,
                                           double step)
{
    if (db.size() != prob.size())
        throw ValidationError("from_points: size mismatch");
    if (!(step > 0.0))
        throw ValidationError("from_points: step must be positive");
    std::vector<long long> idx;
    std::vector<double> w;
    double atom = 0.0;
    for (std::size_t i = 0; i < db.size(); ++i) {
        if (prob[i] < 0.0)
            throw ValidationError("from_points: negative probability");
        if (std::isinf(db[i]) && db[i] < 0) {
            atom += prob[i];
            continue;
        }
        if (!std::isfinite(db[i]))
            throw ValidationError("from_points: non-finite value");
        idx.push_back(std::llround(db[i] / step));
        w.push_back(prob[i]);
    }
    return from_indexed(idx, w, atom, step);
}

double DbDistribution::mean_db() const
{
    double s = weights.sum();
    if (s <= 0.0)
        return kNegInf;
    double m = 0.0;
    for (Eigen::Index i = 0; i < size(); ++i)
        m += weights(i) * value(i);
    return m / s;
}

double DbDistribution::cdf(double x) const
{
    double c = neg_inf;
    for (Eigen::Index i = 0; i < size(); ++i) {
        if (value(i) <= x + 1e-9 * step)
            c += weights(i);
        else
            break;
    }
    return c;
}

double DbDistribution::quantile(double q) const
{
    double c = neg_inf;
    if (q <= c)
        return kNegInf;
    for (Eigen::Index i = 0; i < size(); ++i) {
        c += weights(i);
        if (c >= q - 1e-12)
            return value(i);
    }
    return max_value();
}

double DbDistribution::max_value() const
{
    for (Eigen::Index i = size() - 1; i >= 0; --i)
        if (weights(i) > 0.0)
            return value(i);
    return kNegInf;
}

DbDistribution db_shift(const DbDistribution& d, double delta_db)
{
    DbDistribution r = d;
    r.origin += delta_db;
    return r;
}

DbDistribution db_resample(const DbDistribution& d, double step)
{
    std::vector<long long> idx;
    std::vector<double> w;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d.weights(i) == 0.0)
            continue;
        double t = d.value(i) / step;
        double k0 = std::floor(t);
        double frac = t - k0;
        if (frac < 1e-9) {
            idx.push_back(static_cast<long long>(k0));
            w.push_back(d.weights(i));
        } else if (frac > 1.0 - 1e-9) {
            idx.push_back(static_cast<long long>(k0) + 1);
            w.push_back(d.weights(i));
        } else {
            idx.push_back(static_cast<long long>(k0));
            w.push_back(d.weights(i) * (1.0 - frac));
            idx.push_back(static_cast<long long>(k0) + 1);
            w.push_back(d.weights(i) * frac);
        }
    }
    return from_indexed(idx, w, d.neg_inf, step);
}

DbDistribution db_convolve(const DbDistribution& a, const DbDistribution& b)
{
    if (!same_step(a.step, b.step)) {
        double s = std::min(a.step, b.step);
        return db_convolve(db_resample(a, s), db_resample(b, s));
    }
    DbDistribution r;
    r.step = a.step;
    const double a_fin = a.weights.sum();
    const double b_fin = b.weights.sum();
    r.neg_inf = a.neg_inf * (b_fin + b.neg_inf) + a_fin * b.neg_inf;
    if (a.size() == 0 || b.size() == 0) {
        r.weights.resize(0);
        return r;
    }
    r.origin = a.origin + b.origin;
    r.weights = Eigen::ArrayXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double wa = a.weights(i);
        if (wa == 0.0)
            continue;
        r.weights.segment(i, b.size()) += wa * b.weights;
    }
    return r;
}

DbDistribution db_mixture(const std::vector<std::pair<double, DbDistribution>>& parts)
{
    if (parts.empty())
        throw ValidationError("db_mixture: no components");
    double step = parts.front().second.step;
    bool aligned = true;
    const double phase0 = lattice_phase(parts.front().second);
    for (const auto& [w, d] : parts) {
        if (w < 0.0)
            throw ValidationError("db_mixture: negative weight");
        if (!same_step(d.step, step) || std::abs(lattice_phase(d) - phase0) > 1e-9)
            aligned = false;
        step = std::min(step, d.step);
    }
    std::vector<DbDistribution> ds;
    ds.reserve(parts.size());
    for (const auto& [w, d] : parts)
        ds.push_back(aligned ? d : db_resample(d, step));

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& d : ds) {
        if (d.size() == 0)
            continue;
        lo = std::min(lo, d.origin);
        hi = std::max(hi, d.value(d.size() - 1));
    }
    DbDistribution r;
    r.step = step;
    if (lo > hi) {
        r.weights.resize(0);
    } else {
        r.origin = lo;
        r.weights = Eigen::ArrayXd::Zero(std::llround((hi - lo) / step) + 1);
    }
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const double w = parts[k].first;
        r.neg_inf += w * ds[k].neg_inf;
        if (ds[k].size() == 0)
            continue;
        const auto off = std::llround((ds[k].origin - lo) / step);
        r.weights.segment(off, ds[k].size()) += w * ds[k].weights;
    }
    return r;
}

DbDistribution db_trim(const DbDistribution& d, double eps)
{
    Eigen::Index first = 0;
    Eigen::Index last = d.size() - 1;
    while (first <= last && d.weights(first) <= eps)
        ++first;
    while (last >= first && d.weights(last) <= eps)
        --last;
    DbDistribution r;
    r.step = d.step;
    r.neg_inf = d.neg_inf;
    if (first > last) {
        r.weights.resize(0);
        r.neg_inf = d.total();
        return r;
    }
    r.origin = d.value(first);
    r.weights = d.weights.segment(first, last - first + 1);
    r.weights(0) += d.weights.head(first).sum();
    r.weights(r.size() - 1) += d.weights.tail(d.size() - 1 - last).sum();
    return r;
}

void db_normalize(DbDistribution& d)
{
    double t = d.total();
    if (!(t > 0.0))
        throw NumericError("db_normalize: zero total mass");
    d.weights /= t;
    d.neg_inf /= t;
}

LinearDistribution LinearDistribution::points(const std::vector<double>& x, const std::vector<double>& w)
{
    if (x.size() != w.size())
        throw ValidationError("LinearDistribution::points: size mismatch");
    LinearDistribution d;
    std::vector<double> xs, ws;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0 || w[i] < 0.0)
            throw ValidationError("LinearDistribution::points: negative support or weight");
        if (x[i] == 0.0) {
            d.zero_mass += w[i];
            continue;
        }
        xs.push_back(x[i]);
        ws.push_back(w[i]);
    }
    d.x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    d.w = Eigen::Map<Eigen::ArrayXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
    d.halfwidth = Eigen::ArrayXd::Zero(d.x.size());
    return d;
}

double LinearDistribution::mean() const { return (x * w).sum(); }

LinearDistribution db_to_linear(const DbDistribution& d, PowerUnit unit)
{
    const double off = unit == PowerUnit::dBm ? -30.0 : 0.0;
    const double spread = std::pow(10.0, d.step / 20.0) - std::pow(10.0, -d.step / 20.0);
    LinearDistribution r;
    r.zero_mass = d.neg_inf;
    Eigen::Index n = (d.weights > 0.0).count();
    r.x.resize(n);
    r.w.resize(n);
    r.halfwidth.resize(n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d.weights(i) > 0.0))
            continue;
        const double x = std::pow(10.0, (d.value(i) + off) / 10.0);
        r.x(k) = x;
        r.w(k) = d.weights(i);
        r.halfwidth(k) = x * spread;
        ++k;
    }
    return r;
}

GridPtr make_omega_grid(double x_lo, double x_hi, double points_per_decade)
{
    if (!(x_lo > 0.0) || !(x_hi > x_lo))
        throw ValidationError("make_omega_grid: need 0 < x_lo < x_hi");
    auto g = std::make_shared<OmegaGrid>();
    g->x_lo = x_lo;
    g->x_hi = x_hi;
    g->points_per_decade = points_per_decade;
    const double lw0 = std::log10(1e-3 / x_hi);
    const double lw1 = std::log10(1e3 / x_lo);
    const auto n = static_cast<Eigen::Index>(std::ceil((lw1 - lw0) * points_per_decade)) + 1;
    g->omega.resize(n + 1);
    g->omega(0) = 0.0;
    // exactly points_per_decade per decade from the bottom
    for (Eigen::Index i = 0; i < n; ++i)
        g->omega(i + 1) = std::pow(10.0, lw0 + static_cast<double>(i) / points_per_decade);
    return g;
}

CharFn::CharFn(GridPtr grid, Eigen::ArrayXcd log_values, double zero_mass, Eigen::Index cutoff)
    : grid_(std::move(grid)), log_(std::move(log_values)), zero_mass_(zero_mass), cutoff_(cutoff)
{
}

Eigen::ArrayXcd CharFn::values() const
{
    Eigen::ArrayXcd v(log_.size());
    for (Eigen::Index i = 0; i < log_.size(); ++i)
        v(i) = log_(i).real() <= kLogZero ? cplx(0.0, 0.0) : std::exp(log_(i));
    return v;
}

namespace {

// Assembles log values from |Phi|, principal arg and a per-point unwrapping
// predictor. pred(j) returns the expected phase at j given phase at j-1.
template <class Pred>
CharFn build_log(const GridPtr& grid, const Eigen::ArrayXcd& vals, double zero_mass, Pred pred)
{
    const Eigen::Index n = vals.size();
    Eigen::ArrayXcd lg(n);
    lg(0) = cplx(0.0, 0.0);
    Eigen::Index cutoff = n;
    double theta = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        const double mag = std::abs(vals(j));
        const double lmag = mag > 0.0 ? std::min(0.0, std::log(mag)) : kLogZero;
        if (lmag < kLogFloor) {
            if (cutoff == n)
                cutoff = j;
            lg(j) = cplx(kLogZero, theta);
            continue;
        }
        const double expected = pred(j, theta);
        const double a = std::arg(vals(j));
        theta = a + 2.0 * kPi * std::round((expected - a) / (2.0 * kPi));
        lg(j) = cplx(lmag, theta);
    }
    return CharFn(grid, std::move(lg), zero_mass, cutoff);
}


} // namespace

CharFn cf_from_linear(const LinearDistribution& d, const GridPtr& grid)
{
    const Eigen::ArrayXd& om = grid->omega;
    const Eigen::Index n = om.size();
    const double w_max = om(n - 1);
    // points this far below the grid resolution are indistinguishable from 0
    const double x_zero = 1e-6 / w_max;

    double zero = d.zero_mass;
    Eigen::ArrayXd re = Eigen::ArrayXd::Zero(n), im = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd dre = Eigen::ArrayXd::Zero(n), dim = Eigen::ArrayXd::Zero(n);
    Eigen::ArrayXd z(n), c(n), s(n), k(n), kp(n);
    for (Eigen::Index i = 0; i < d.x.size(); ++i) {
        const double xi = d.x(i);
        const double wi = d.w(i);
        if (wi == 0.0)
            continue;
        if (xi < x_zero) {
            zero += wi;
            continue;
        }
        z = om * xi;
        c = z.cos();
        s = z.sin();
        const double a = d.halfwidth(i);
        if (a > 0.0) {
            // vectorized sinc^2 kernel; u = 0 only at omega = 0
            Eigen::ArrayXd u = om * (a / 2.0);
            Eigen::ArrayXd su = u.sin(), cu = u.cos();
            u(0) = 1.0;
            Eigen::ArrayXd sc = su / u;
            Eigen::ArrayXd scp = (cu - sc) / u;
            sc(0) = 1.0;
            scp(0) = 0.0;
            k = sc * sc;
            kp = a * sc * scp;
        } else {
            k.setOnes();
            kp.setZero();
        }
        re += wi * c * k;
        im += wi * s * k;
        // d/dw of e^{iwx} k(w) = e^{iwx} (i x k + k')
        dre += wi * (c * kp - s * xi * k);
        dim += wi * (s * kp + c * xi * k);
    }
    Eigen::ArrayXcd vals(n), dvals(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        vals(j) = cplx(re(j) + zero, im(j));
        dvals(j) = cplx(dre(j), dim(j));
    }
    vals(0) = cplx(1.0, 0.0);

    // phase slope d(arg)/dw = Im(Phi'/Phi); trapezoid predictor
    auto slope = [&](Eigen::Index j) {
        const double m2 = std::norm(vals(j));
        return m2 > 0.0 ? (dvals(j) * std::conj(vals(j))).imag() / m2 : 0.0;
    };
    Eigen::ArrayXd sl(n);
    for (Eigen::Index j = 0; j < n; ++j)
        sl(j) = slope(j);
    return build_log(grid, vals, zero, [&](Eigen::Index j, double prev) {
        return prev + 0.5 * (sl(j - 1) + sl(j)) * (om(j) - om(j - 1));
    });
}

CharFn cf_from_values(const GridPtr& grid, const Eigen::ArrayXcd& values, double zero_mass)
{
    if (values.size() != grid->omega.size())
        throw ValidationError("cf_from_values: grid size mismatch");
    Eigen::ArrayXcd v = values;
    v(0) = cplx(1.0, 0.0);
    return build_log(grid, v, zero_mass, [](Eigen::Index, double prev) { return prev; });
}

CharFn cf_from_log(const GridPtr& grid, const std::function<cplx(double)>& log_fn, double zero_mass)
{
    const Eigen::Index n = grid->omega.size();
    Eigen::ArrayXcd lg(n);
    Eigen::Index cutoff = n;
    for (Eigen::Index j = 0; j < n; ++j) {
        lg(j) = j == 0 ? cplx(0.0, 0.0) : log_fn(grid->omega(j));
        if (lg(j).real() < kLogFloor && cutoff == n)
            cutoff = j;
    }
    return CharFn(grid, std::move(lg), zero_mass, cutoff);
}

CharFn cf_one(const GridPtr& grid)
{
    return CharFn(grid, Eigen::ArrayXcd::Zero(grid->omega.size()), 1.0, grid->omega.size());
}

CharFn cf_pow(const CharFn& phi, double p)
{
    if (p < 0.0 || !std::isfinite(p))
        throw ValidationError("cf_pow: exponent must be finite and >= 0");
    if (p == 0.0)
        return cf_one(phi.grid());
    Eigen::ArrayXcd lg = phi.log_values() * p;
    for (Eigen::Index j = phi.cutoff(); j < lg.size(); ++j)
        lg(j) = cplx(kLogZero, lg(j).imag());
    return CharFn(phi.grid(), std::move(lg), std::pow(phi.zero_mass(), p), phi.cutoff());
}

CharFn cf_product(const std::vector<CharFn>& factors)
{
    if (factors.empty())
        throw ValidationError("cf_product: no factors");
    const GridPtr& g = factors.front().grid();
    Eigen::ArrayXcd lg = Eigen::ArrayXcd::Zero(g->omega.size());
    double zero = 1.0;
    Eigen::Index cutoff = g->omega.size();
    for (const auto& f : factors) {
        if (f.grid() != g && (f.size() != lg.size() || (f.grid()->omega != g->omega).any()))
            throw ValidationError("cf_product: omega grids differ; resample first");
        lg += f.log_values();
        zero *= f.zero_mass();
        cutoff = std::min(cutoff, f.cutoff());
    }
    for (Eigen::Index j = cutoff; j < lg.size(); ++j)
        lg(j) = cplx(kLogZero, lg(j).imag());
    return CharFn(g, std::move(lg), zero, cutoff);
}

double cf_mean(const CharFn& phi)
{
    if (phi.size() < 2 || phi.cutoff() < 2)
        throw NumericError("cf_mean: CF truncated at the first grid point");
    return phi.log_values()(1).imag() / phi.grid()->omega(1);
}

namespace {

// E1(i z) for z > 0.
cplx expint_e1_imag(double z)
{
    const cplx w(0.0, z);
    if (z <= 2.0) {
        constexpr double euler = 0.57721566490153286;
        cplx sum(0.0, 0.0);
        cplx term(1.0, 0.0);
        for (int k = 1; k < 60; ++k) {
            term *= -w / static_cast<double>(k);
            sum += term / static_cast<double>(k);
            if (std::abs(term) < 1e-17)
                break;
        }
        return -euler - std::log(w) - sum;
    }
    // modified Lentz continued fraction
    const double tiny = 1e-300;
    cplx b = w + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 5000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    return h * std::exp(-w);
}

// Pool-adjacent-violators, unweighted.
Eigen::ArrayXd isotonic(const Eigen::ArrayXd& y)
{
    const Eigen::Index n = y.size();
    std::vector<double> val;
    std::vector<Eigen::Index> cnt;
    for (Eigen::Index i = 0; i < n; ++i) {
        val.push_back(y(i));
        cnt.push_back(1);
        while (val.size() > 1 && val[val.size() - 2] > val.back()) {
            const auto c2 = cnt.back();
            const double v2 = val.back();
            val.pop_back();
            cnt.pop_back();
            const double total = val.back() * static_cast<double>(cnt.back()) + v2 * static_cast<double>(c2);
            cnt.back() += c2;
            val.back() = total / static_cast<double>(cnt.back());
        }
    }
    Eigen::ArrayXd out(n);
    Eigen::Index k = 0;
    for (std::size_t b = 0; b < val.size(); ++b)
        for (Eigen::Index j = 0; j < cnt[b]; ++j)
            out(k++) = val[b];
    return out;
}

} // namespace

Eigen::ArrayXd log_grid(double lo, double hi, int n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw ValidationError("log_grid: need 0 < lo < hi and n >= 2");
    return Eigen::ArrayXd::LinSpaced(n, std::log10(lo), std::log10(hi)).unaryExpr([](double e) {
        return std::pow(10.0, e);
    });
}

CdfResult gil_pelaez_cdf(const CharFn& phi, const Eigen::ArrayXd& x)
{
    const Eigen::ArrayXd& om = phi.grid()->omega;
    const Eigen::Index n = om.size();
    const double c = phi.zero_mass();
    const double mu = cf_mean(phi);
    const Eigen::ArrayXcd vals = phi.values();

    // h = (Phi - c) / w is interpolated linearly in w; e^{-iwx} is integrated
    // exactly on each interval (Filon).
    Eigen::ArrayXcd h(n);
    h(0) = cplx(0.0, 0.0);
    for (Eigen::Index j = 1; j < n; ++j)
        h(j) = (vals(j) - c) / om(j);
    const cplx g_top = vals(n - 1) - c;
    const double w_top = om(n - 1);

    CdfResult out;
    out.x = x;
    Eigen::ArrayXd raw(x.size());
    double tail_max = 0.0;
    for (Eigen::Index m = 0; m < x.size(); ++m) {
        const double xm = x(m);
        if (!(xm > 0.0))
            throw ValidationError("gil_pelaez_cdf: x grid must be positive");
        double integral = om(1) * (mu - (1.0 - c) * xm);
        cplx acc(0.0, 0.0);
        cplx e_prev = std::polar(1.0, -om(1) * xm);
        for (Eigen::Index j = 1; j + 1 < n; ++j) {
            const double delta = om(j + 1) - om(j);
            const cplx e_next = std::polar(1.0, -om(j + 1) * xm);
            const double beta = xm * delta;
            const cplx th(0.0, -beta);
            cplx i0, i1;
            if (beta < 0.05) {
                const cplx t2 = th * th, t3 = t2 * th, t4 = t3 * th;
                i0 = 1.0 + th / 2.0 + t2 / 6.0 + t3 / 24.0 + t4 / 120.0;
                i1 = 0.5 + th / 3.0 + t2 / 8.0 + t3 / 30.0 + t4 / 144.0;
            } else {
                const cplx et = e_next * std::conj(e_prev);
                i0 = (et - 1.0) / th;
                i1 = (et * (th - 1.0) + 1.0) / (th * th);
            }
            acc += delta * e_prev * (h(j) * (i0 - i1) + h(j + 1) * i1);
            e_prev = e_next;
        }
        integral += acc.imag();
        const cplx tail = g_top * expint_e1_imag(w_top * xm);
        integral += tail.imag();
        tail_max = std::max(tail_max, std::abs(g_top) / (kPi * w_top * xm));
        raw(m) = 0.5 + 0.5 * c - integral / kPi;
    }
    Eigen::ArrayXd clipped = raw.max(0.0).min(1.0);
    out.F = isotonic(clipped).max(0.0).min(1.0);
    out.max_adjustment = (out.F - raw).abs().maxCoeff();
    out.tail_bound = tail_max;
    return out;
}

double cdf_quantile(const CdfResult& cdf, double p)
{
    const auto n = cdf.F.size();
    if (n == 0)
        throw NumericError("cdf_quantile: empty CDF");
    if (p < cdf.F(0) || p > cdf.F(n - 1))
        throw NumericError("cdf_quantile: percentile " + std::to_string(p) + " outside resolved CDF range [" +
                           std::to_string(cdf.F(0)) + ", " + std::to_string(cdf.F(n - 1)) + "]");
    Eigen::Index i = 0;
    while (i < n && cdf.F(i) < p)
        ++i;
    if (i == 0)
        return cdf.x(0);
    const double f0 = cdf.F(i - 1), f1 = cdf.F(i);
    const double l0 = std::log(cdf.x(i - 1)), l1 = std::log(cdf.x(i));
    const double t = f1 > f0 ? (p - f0) / (f1 - f0) : 1.0;
    return std::exp(l0 + t * (l1 - l0));
}

double cdf_at(const CdfResult& cdf, double x)
{
    const auto n = cdf.x.size();
    if (n == 0)
        throw NumericError("cdf_at: empty CDF");
    if (x <= cdf.x(0))
        return cdf.F(0);
    if (x >= cdf.x(n - 1))
        return cdf.F(n - 1);
    const double* b = cdf.x.data();
    const auto i = std::upper_bound(b, b + n, x) - b;
    const double t = std::log(x / cdf.x(i - 1)) / std::log(cdf.x(i) / cdf.x(i - 1));
    return cdf.F(i - 1) + t * (cdf.F(i) - cdf.F(i - 1));
}

double ks_distance(const CharFn& phi, std::vector<double> samples, std::size_t max_probes)
{
    if (samples.empty())
        throw ValidationError("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(max_probes, 1));
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; i += stride) {
        // skip ties and zero powers, which the CDF grid cannot hold
        if (samples[i] <= 0.0 || (!xs.empty() && samples[i] <= xs.back()))
            continue;
        xs.push_back(samples[i]);
    }
    double d = 0.0;
    if (!xs.empty()) {
        const auto cdf = gil_pelaez_cdf(phi, Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
        for (std::size_t k = 0; k < xs.size(); ++k) {
            // ECDF just below and at the probe
            const auto lo = std::lower_bound(samples.begin(), samples.end(), xs[k]) - samples.begin();
            const auto hi = std::upper_bound(samples.begin(), samples.end(), xs[k]) - samples.begin();
            d = std::max(d, std::abs(cdf.F(static_cast<Eigen::Index>(k)) - static_cast<double>(lo) / n));
            d = std::max(d, std::abs(cdf.F(static_cast<Eigen::Index>(k)) - static_cast<double>(hi) / n));
        }
    }
    // atom at zero
    const auto zeros = std::upper_bound(samples.begin(), samples.end(), 0.0) - samples.begin();
    d = std::max(d, std::abs(phi.zero_mass() - static_cast<double>(zeros) / n));
    return d;
}

} // namespace u6g
