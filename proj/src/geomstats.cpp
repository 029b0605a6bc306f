// SPDX-License-Identifier: Apache-2.0
#include "u6g/geomstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace u6g {

using nlohmann::json;

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Point>& v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * s;
}

// Azimuth of a planar vector, clockwise from north, in (-180, 180].
double azimuth_of(const Point& d) { return wrap180(rad2deg(std::atan2(d.x(), d.y()))); }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2)
{
    auto orient = [](const Point& a, const Point& b, const Point& c) {
        double v = cross(b - a, c - a);
        const double scale = std::max({(b - a).norm(), (c - a).norm(), 1.0});
        if (std::abs(v) < 1e-12 * scale * scale)
            return 0;
        return v > 0 ? 1 : -1;
    };
    auto on_seg = [](const Point& a, const Point& b, const Point& c) {
        return std::min(a.x(), b.x()) - 1e-12 <= c.x() && c.x() <= std::max(a.x(), b.x()) + 1e-12 &&
               std::min(a.y(), b.y()) - 1e-12 <= c.y() && c.y() <= std::max(a.y(), b.y()) + 1e-12;
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_seg(p1, p2, q1))
        return true;
    if (o2 == 0 && on_seg(p1, p2, q2))
        return true;
    if (o3 == 0 && on_seg(q1, q2, p1))
        return true;
    if (o4 == 0 && on_seg(q1, q2, p2))
        return true;
    return false;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b)
{
    const Point ab = b - a;
    const double l2 = ab.squaredNorm();
    const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

bool point_in_polygon(const Point& p, const std::vector<Point>& v)
{
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
            const double xc = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
            if (p.x() < xc)
                inside = !inside;
        }
    }
    return inside;
}

double polygon_distance(const BuildingPolygon& a, const BuildingPolygon& b)
{
    const auto& va = a.vertices;
    const auto& vb = b.vertices;
    if (point_in_polygon(va[0], vb) || point_in_polygon(vb[0], va))
        return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < va.size(); ++i) {
        const Point& p1 = va[i];
        const Point& p2 = va[(i + 1) % va.size()];
        for (std::size_t j = 0; j < vb.size(); ++j) {
            const Point& q1 = vb[j];
            const Point& q2 = vb[(j + 1) % vb.size()];
            if (segments_intersect(p1, p2, q1, q2))
                return 0.0;
            d = std::min({d, point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                          point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
        }
    }
    return d;
}

bool is_convex_ccw(const std::vector<Point>& v)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        const Point& c = v[(i + 2) % v.size()];
        if (cross(b - a, c - b) < -1e-9)
            return false;
    }
    return true;
}

// Length of member edges not covered by antiparallel edges of the other
// members (shared walls vanish on merge).
double exposed_length(std::size_t k, const std::vector<const BuildingPolygon*>& members, double tol)
{
    const auto& v = members[k]->vertices;
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % v.size()];
        const double len = (b - a).norm();
        if (len == 0.0)
            continue;
        const Point t = (b - a) / len;
        std::vector<std::pair<double, double>> covered;
        for (std::size_t m = 0; m < members.size(); ++m) {
            if (m == k)
                continue;
            const auto& w = members[m]->vertices;
            for (std::size_t j = 0; j < w.size(); ++j) {
                const Point c = w[j];
                const Point d = w[(j + 1) % w.size()];
                const Point u = d - c;
                if (u.norm() == 0.0 || u.normalized().dot(t) > -0.999)
                    continue;
                if (std::abs(cross(t, c - a)) > tol || std::abs(cross(t, d - a)) > tol)
                    continue;
                double s0 = (c - a).dot(t), s1 = (d - a).dot(t);
                if (s0 > s1)
                    std::swap(s0, s1);
                s0 = std::max(s0, 0.0);
                s1 = std::min(s1, len);
                if (s1 > s0)
                    covered.emplace_back(s0, s1);
            }
        }
        std::sort(covered.begin(), covered.end());
        double cov = 0.0, reach = 0.0;
        for (auto [s0, s1] : covered) {
            s0 = std::max(s0, reach);
            if (s1 > s0) {
                cov += s1 - s0;
                reach = s1;
            }
        }
        total += len - cov;
    }
    return total;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t i)
    {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct Facade {
    Point a, b;     // endpoints, polygon order
    Point normal;   // outward, unit
    double length;
    double height;
    std::size_t building;
};

std::vector<Facade> facades_of(const std::vector<BuildingPolygon>& polys)
{
    std::vector<Facade> out;
    for (std::size_t k = 0; k < polys.size(); ++k) {
        const auto& v = polys[k].vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point a = v[i];
            const Point b = v[(i + 1) % v.size()];
            const Point d = b - a;
            const double len = d.norm();
            if (len < 1e-9)
                continue;
            out.push_back({a, b, Point(d.y(), -d.x()) / len, len, polys[k].height, k});
        }
    }
    return out;
}

json hist_to_json(const Histogram1D& h)
{
    return json{{"origin", h.origin},
                {"bin_width", h.bin_width},
                {"empty", h.empty},
                {"raw_total", h.raw_total},
                {"weights", std::vector<double>(h.weights.data(), h.weights.data() + h.weights.size())}};
}

Histogram1D hist_from_json(const json& j)
{
    Histogram1D h;
    h.origin = j.at("origin").get<double>();
    h.bin_width = j.at("bin_width").get<double>();
    h.empty = j.at("empty").get<bool>();
    h.raw_total = j.value("raw_total", 0.0);
    auto w = j.at("weights").get<std::vector<double>>();
    h.weights = Eigen::Map<Eigen::ArrayXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    if (!(h.bin_width > 0.0))
        throw ValidationError("geostats: bin_width must be positive");
    if ((h.weights < 0.0).any())
        throw ValidationError("geostats: negative histogram weight");
    if (!h.empty && std::abs(h.weights.sum() - 1.0) > 1e-9)
        throw ValidationError("geostats: histogram not normalized");
    return h;
}

json az_to_json(const AzimuthStats& a)
{
    return json{{"azimuth_deg", a.azimuth_deg},
                {"height", hist_to_json(a.height)},
                {"area", hist_to_json(a.area)},
                {"distance", hist_to_json(a.distance)}};
}

AzimuthStats az_from_json(const json& j)
{
    AzimuthStats a;
    a.azimuth_deg = j.at("azimuth_deg").get<double>();
    a.height = hist_from_json(j.at("height"));
    a.area = hist_from_json(j.at("area"));
    a.distance = hist_from_json(j.at("distance"));
    return a;
}

} // namespace

double BuildingPolygon::area() const { return std::abs(signed_area(vertices)); }

double BuildingPolygon::perimeter() const
{
    double p = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        p += (vertices[(i + 1) % vertices.size()] - vertices[i]).norm();
    return p;
}

double Histogram1D::cdf(double v) const
{
    if (empty)
        return 0.0;
    double c = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double lo = lower(i);
        if (v >= lo + bin_width)
            c += weights(i);
        else {
            if (v > lo)
                c += weights(i) * (v - lo) / bin_width;
            break;
        }
    }
    return std::min(c, 1.0);
}

double Histogram1D::mean() const
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        m += weights(i) * center(i);
    return m;
}

double Histogram1D::sample(Rng& rng) const
{
    if (empty || weights.size() == 0)
        throw NumericError("Histogram1D::sample: empty histogram");
    const double u = rng.uniform();
    double c = 0.0;
    Eigen::Index i = 0;
    for (; i < weights.size() - 1; ++i) {
        c += weights(i);
        if (u < c)
            break;
    }
    while (weights(i) == 0.0 && i > 0)
        --i;
    return std::max(0.0, lower(i) + bin_width * rng.uniform());
}

Eigen::Index Histogram1D::mode_bin() const
{
    Eigen::Index k = 0;
    weights.maxCoeff(&k);
    return k;
}

Histogram1D make_histogram(const std::vector<double>& values, const std::vector<double>& weights, double width)
{
    Histogram1D h;
    h.bin_width = width;
    h.raw_total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (values.empty() || !(h.raw_total > 0.0)) {
        h.origin = -0.5 * width;
        h.weights = Eigen::ArrayXd::Zero(1);
        h.empty = true;
        return h;
    }
    long long lo = std::numeric_limits<long long>::max(), hi = std::numeric_limits<long long>::min();
    std::vector<long long> idx(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        idx[i] = std::llround(values[i] / width + 1e-9);
        lo = std::min(lo, idx[i]);
        hi = std::max(hi, idx[i]);
    }
    h.origin = (static_cast<double>(lo) - 0.5) * width;
    h.weights = Eigen::ArrayXd::Zero(hi - lo + 1);
    for (std::size_t i = 0; i < values.size(); ++i)
        h.weights(idx[i] - lo) += weights[i];
    h.weights /= h.raw_total;
    h.empty = false;
    return h;
}

std::size_t GeoStats::bin_index(double azimuth_deg) const
{
    const auto n = static_cast<long long>(bins.size());
    long long k = std::llround((wrap180(azimuth_deg) + 180.0) / delta_phi) - 1;
    k = ((k % n) + n) % n;
    return static_cast<std::size_t>(k);
}

const Histogram1D& GeoStats::height(double az) const
{
    const auto& h = at(az).height;
    return h.empty ? marginal.height : h;
}

const Histogram1D& GeoStats::area(double az) const
{
    const auto& h = at(az).area;
    return h.empty ? marginal.area : h;
}

const Histogram1D& GeoStats::distance(double az) const
{
    const auto& h = at(az).distance;
    return h.empty ? marginal.distance : h;
}

std::vector<BuildingPolygon> parse_dataset(std::istream& in, const std::string& name)
{
    std::vector<BuildingPolygon> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto fail = [&](const std::string& why) {
            throw ValidationError(name + ":" + std::to_string(lineno) + ": " + why);
        };
        std::string upper = line.substr(first);
        if (upper.rfind("POLYGON", 0) != 0)
            fail("expected POLYGON((...)) <height>");
        const auto open = upper.find("((");
        const auto close = upper.find("))");
        if (open == std::string::npos || close == std::string::npos || close < open)
            fail("malformed polygon text");
        if (upper.find('(', open + 2) != std::string::npos && upper.find('(', open + 2) < close)
            fail("polygons with holes are not supported");
        std::string coords = upper.substr(open + 2, close - open - 2);
        std::string rest = upper.substr(close + 2);
        BuildingPolygon p;
        std::stringstream cs(coords);
        std::string pair;
        while (std::getline(cs, pair, ',')) {
            std::istringstream ps(pair);
            double x, y;
            if (!(ps >> x >> y))
                fail("bad coordinate pair '" + pair + "'");
            std::string extra;
            if (ps >> extra)
                fail("coordinate pair with more than two values");
            p.vertices.emplace_back(x, y);
        }
        std::istringstream rs(rest);
        if (!(rs >> p.height))
            fail("missing height");
        std::string extra;
        if (rs >> extra)
            fail("trailing text after height");
        if (p.vertices.size() > 1 && (p.vertices.front() - p.vertices.back()).norm() < 1e-9)
            p.vertices.pop_back();
        if (p.vertices.size() < 3)
            fail("polygon needs at least 3 distinct vertices");
        if (!std::isfinite(p.height))
            fail("non-finite height");
        if (p.height <= 0.0)
            continue;
        if (!is_simple(p.vertices))
            fail("self-intersecting polygon (record " + std::to_string(out.size() + 1) + ")");
        const double sa = signed_area(p.vertices);
        if (std::abs(sa) < 1e-9)
            fail("degenerate polygon with zero area");
        if (sa < 0.0)
            std::reverse(p.vertices.begin(), p.vertices.end());
        out.push_back(std::move(p));
    }
    if (out.empty())
        throw EmptyDatasetError(name + ": dataset contains no buildings with positive height");
    return out;
}

std::vector<BuildingPolygon> load_dataset(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open dataset '" + path + "'");
    return parse_dataset(f, path);
}

void write_dataset(std::ostream& out, const std::vector<BuildingPolygon>& polys)
{
    out << std::setprecision(10);
    for (const auto& p : polys) {
        out << "POLYGON((";
        for (std::size_t i = 0; i <= p.vertices.size(); ++i) {
            const Point& v = p.vertices[i % p.vertices.size()];
            out << (i ? ", " : "") << v.x() << ' ' << v.y();
        }
        out << ")) " << p.height << '\n';
    }
}

bool is_simple(const std::vector<Point>& v)
{
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

std::vector<Point> convex_hull(std::vector<Point> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return (a - b).norm() < 1e-9; }),
              pts.end());
    if (pts.size() < 3)
        return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 1]) <= 1e-12)
            --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        const Point& p = pts[i - 1];
        while (k >= t && cross(h[k - 1] - h[k - 2], p - h[k - 1]) <= 1e-12)
            --k;
        h[k++] = p;
    }
    h.resize(k - 1);
    return h;
}

std::vector<BuildingPolygon> merge_and_convexify(const std::vector<BuildingPolygon>& polys, double adjacency_tol)
{
    if (adjacency_tol < 0.0)
        throw ValidationError("merge_and_convexify: adjacency_tol must be >= 0");
    std::vector<BuildingPolygon> cur = polys;
    for (auto& p : cur) {
        if (p.vertices.size() < 3 || !(p.height > 0.0))
            throw ValidationError("merge_and_convexify: invalid polygon");
    }
    for (;;) {
        const std::size_t n = cur.size();
        // bounding boxes prune the pairwise test
        std::vector<Eigen::AlignedBox2d> box(n);
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& v : cur[i].vertices)
                box[i].extend(v);
        UnionFind uf(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (box[i].exteriorDistance(box[j]) > adjacency_tol)
                    continue;
                if (polygon_distance(cur[i], cur[j]) <= adjacency_tol)
                    uf.unite(i, j);
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> comps;
        for (std::size_t i = 0; i < n; ++i)
            comps[uf.find(i)].push_back(i);

        std::vector<BuildingPolygon> next;
        bool changed = false;
        for (const auto& [root, idx] : comps) {
            if (idx.size() == 1) {
                const auto& p = cur[idx[0]];
                if (is_convex_ccw(p.vertices)) {
                    next.push_back(p);
                } else {
                    next.push_back({convex_hull(p.vertices), p.height});
                    changed = true;
                }
                continue;
            }
            changed = true;
            std::vector<const BuildingPolygon*> members;
            std::vector<Point> pts;
            for (auto i : idx) {
                members.push_back(&cur[i]);
                pts.insert(pts.end(), cur[i].vertices.begin(), cur[i].vertices.end());
            }
            double wsum = 0.0, hsum = 0.0;
            for (std::size_t k = 0; k < members.size(); ++k) {
                const double w = exposed_length(k, members, std::max(adjacency_tol, 1e-6));
                wsum += w;
                hsum += w * members[k]->height;
            }
            double h = 0.0;
            if (wsum > 0.0) {
                h = hsum / wsum;
            } else {
                for (const auto* m : members)
                    h += m->height / static_cast<double>(members.size());
            }
            next.push_back({convex_hull(pts), h});
        }
        cur = std::move(next);
        if (!changed)
            break;
    }
    return cur;
}

GeoStats extract_stats(const std::vector<BuildingPolygon>& polys, const ExtractOptions& opt)
{
    if (polys.empty())
        throw EmptyDatasetError("extract_stats: no polygons");
    if (!(opt.delta_phi > 0.0) || std::abs(360.0 / opt.delta_phi - std::round(360.0 / opt.delta_phi)) > 1e-9)
        throw ValidationError("extract_stats: delta_phi must divide 360");
    if (!(opt.delta_h > 0.0) || !(opt.delta_a > 0.0) || !(opt.delta_d > 0.0))
        throw ValidationError("extract_stats: bin widths must be positive");

    GeoStats g;
    g.delta_phi = opt.delta_phi;
    g.delta_h = opt.delta_h;
    g.delta_a = opt.delta_a;
    g.delta_d = opt.delta_d;
    const auto nb = static_cast<std::size_t>(std::llround(360.0 / opt.delta_phi));
    g.bins.resize(nb);
    for (std::size_t k = 0; k < nb; ++k)
        g.bins[k].azimuth_deg = -180.0 + opt.delta_phi * static_cast<double>(k + 1);

    const auto fac = facades_of(polys);
    struct Acc {
        std::vector<double> hv, hw, av, aw, dv, dw;
    };
    std::vector<Acc> acc(nb);
    Acc all;

    // each facade reflects on both sides of its street: bins at n and n+180
    std::vector<std::pair<std::size_t, std::size_t>> fbins(fac.size());
    for (std::size_t f = 0; f < fac.size(); ++f) {
        const double az = azimuth_of(fac[f].normal);
        fbins[f] = {g.bin_index(az), g.bin_index(az + 180.0)};
        const double area = fac[f].length * fac[f].height;
        for (auto k : {fbins[f].first, fbins[f].second}) {
            acc[k].hv.push_back(fac[f].height);
            acc[k].hw.push_back(area);
            acc[k].av.push_back(area);
            acc[k].aw.push_back(1.0);
        }
        all.hv.push_back(fac[f].height);
        all.hw.push_back(area);
        all.av.push_back(area);
        all.aw.push_back(1.0);
    }

    // facing pairs: for each facade, scan facades of other buildings in front
    // of it, nearest first; each contributes only the part of the visibility
    // strip not already claimed by a closer facade
    const double par_tol = std::cos(deg2rad(2.0 * opt.delta_phi));
    for (std::size_t f = 0; f < fac.size(); ++f) {
        const Facade& A = fac[f];
        const Point t = (A.b - A.a) / A.length;
        struct Cand {
            double d, s0, s1;
            std::size_t j;
        };
        std::vector<Cand> cands;
        for (std::size_t j = 0; j < fac.size(); ++j) {
            const Facade& B = fac[j];
            if (B.building == A.building || A.normal.dot(B.normal) > -par_tol)
                continue;
            const Point mid = 0.5 * (B.a + B.b);
            const double d = (mid - A.a).dot(A.normal);
            if (d <= 1e-9 || d > opt.max_distance)
                continue;
            // A must also lie in front of B
            if ((0.5 * (A.a + A.b) - B.a).dot(B.normal) <= 1e-9)
                continue;
            double s0 = (B.a - A.a).dot(t), s1 = (B.b - A.a).dot(t);
            if (s0 > s1)
                std::swap(s0, s1);
            s0 = std::max(s0, 0.0);
            s1 = std::min(s1, A.length);
            if (s1 - s0 <= 1e-9)
                continue;
            cands.push_back({d, s0, s1, j});
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.d < y.d; });
        std::vector<std::pair<double, double>> claimed;
        for (const auto& c : cands) {
            // visible part of [s0, s1] not in claimed
            std::vector<std::pair<double, double>> pieces{{c.s0, c.s1}};
            for (const auto& [c0, c1] : claimed) {
                std::vector<std::pair<double, double>> nxt;
                for (const auto& [p0, p1] : pieces) {
                    if (c1 <= p0 || c0 >= p1) {
                        nxt.emplace_back(p0, p1);
                        continue;
                    }
                    if (c0 > p0)
                        nxt.emplace_back(p0, c0);
                    if (c1 < p1)
                        nxt.emplace_back(c1, p1);
                }
                pieces = std::move(nxt);
            }
            double w = 0.0;
            for (const auto& [p0, p1] : pieces)
                w += p1 - p0;
            claimed.emplace_back(c.s0, c.s1);
            if (w <= 1e-9)
                continue;
            const double hbar = 0.5 * (A.height + fac[c.j].height);
            const double wt = 0.5 * w * hbar; // half per perspective
            for (auto k : {fbins[f].first, fbins[f].second}) {
                acc[k].dv.push_back(c.d);
                acc[k].dw.push_back(wt);
            }
            all.dv.push_back(c.d);
            all.dw.push_back(wt);
        }
    }

    for (std::size_t k = 0; k < nb; ++k) {
        g.bins[k].height = make_histogram(acc[k].hv, acc[k].hw, opt.delta_h);
        g.bins[k].area = make_histogram(acc[k].av, acc[k].aw, opt.delta_a);
        g.bins[k].distance = make_histogram(acc[k].dv, acc[k].dw, opt.delta_d);
    }
    g.marginal.azimuth_deg = 0.0;
    g.marginal.height = make_histogram(all.hv, all.hw, opt.delta_h);
    g.marginal.area = make_histogram(all.av, all.aw, opt.delta_a);
    g.marginal.distance = make_histogram(all.dv, all.dw, opt.delta_d);
    return g;
}

std::string geostats_to_string(const GeoStats& g)
{
    json j;
    j["format"] = "u6g-geostats-1";
    j["delta_phi_deg"] = g.delta_phi;
    j["delta_h_m"] = g.delta_h;
    j["delta_a_m2"] = g.delta_a;
    j["delta_d_m"] = g.delta_d;
    j["marginal"] = az_to_json(g.marginal);
    j["azimuth_bins"] = json::array();
    for (const auto& b : g.bins)
        j["azimuth_bins"].push_back(az_to_json(b));
    return j.dump(1);
}

GeoStats geostats_from_string(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("geostats: ") + e.what());
    }
    GeoStats g;
    try {
        if (j.value("format", "") != "u6g-geostats-1")
            throw ValidationError("geostats: unknown format tag");
        g.delta_phi = j.at("delta_phi_deg").get<double>();
        g.delta_h = j.at("delta_h_m").get<double>();
        g.delta_a = j.at("delta_a_m2").get<double>();
        g.delta_d = j.at("delta_d_m").get<double>();
        g.marginal = az_from_json(j.at("marginal"));
        for (const auto& b : j.at("azimuth_bins"))
            g.bins.push_back(az_from_json(b));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("geostats: ") + e.what());
    }
    if (g.bins.size() != static_cast<std::size_t>(std::llround(360.0 / g.delta_phi)))
        throw ValidationError("geostats: azimuth grid does not cover 360 deg");
    if (g.marginal.height.empty)
        throw EmptyDatasetError("geostats: empty marginal height histogram");
    return g;
}

void save_geostats(const GeoStats& g, const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write '" + path + "'");
    f << geostats_to_string(g) << '\n';
}

GeoStats load_geostats(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open geostats file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return geostats_from_string(ss.str());
}

double total_facade_area(const std::vector<BuildingPolygon>& polys)
{
    double s = 0.0;
    for (const auto& p : polys)
        s += p.perimeter() * p.height;
    return s;
}

std::vector<BuildingPolygon> transform_dataset(const std::vector<BuildingPolygon>& polys, double delta_deg,
                                               const Point& offset)
{
    const double c = std::cos(deg2rad(delta_deg)), s = std::sin(deg2rad(delta_deg));
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    auto out = polys;
    for (auto& p : out)
        for (auto& v : p.vertices)
            v = r * v + offset;
    return out;
}

std::vector<BuildingPolygon> manhattan_grid(int n, double side, double street, double height)
{
    std::vector<BuildingPolygon> out;
    const double pitch = side + street;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x0 = i * pitch, y0 = j * pitch;
            out.push_back({{Point(x0, y0), Point(x0 + side, y0), Point(x0 + side, y0 + side), Point(x0, y0 + side)},
                           height});
        }
    }
    return out;
}

std::vector<BuildingPolygon> synthetic_city(const SyntheticCityOptions& opt)
{
    Rng rng(derive_seed(opt.seed, 0x5c17));
    std::vector<BuildingPolygon> out;
    for (int i = 0; i < opt.blocks; ++i) {
        for (int j = 0; j < opt.blocks; ++j) {
            const double w = rng.uniform(opt.min_side, opt.max_side);
            const double l = rng.uniform(opt.min_side, opt.max_side);
            const double rot = rng.uniform(0.0, 180.0);
            const double h = std::clamp(opt.median_height * std::exp(opt.height_sigma * rng.normal()), 3.0, 120.0);
            // keep the rotated footprint inside its lattice cell
            const double slack = std::max(0.0, (opt.pitch - std::hypot(w, l)) / 2.0);
            const Point c(i * opt.pitch + opt.pitch / 2 + rng.uniform(-slack, slack),
                          j * opt.pitch + opt.pitch / 2 + rng.uniform(-slack, slack));
            const double cr = std::cos(deg2rad(rot)), sr = std::sin(deg2rad(rot));
            BuildingPolygon p;
            p.height = h;
            for (auto [u, v] : {std::pair{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}) {
                const double x = u * w, y = v * l;
                p.vertices.emplace_back(c.x() + cr * x - sr * y, c.y() + sr * x + cr * y);
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace u6g
