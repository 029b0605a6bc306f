// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "u6g/common.hpp"

namespace u6g {

// x east, y north, meters.
using Point = Eigen::Vector2d;

struct BuildingPolygon {
    std::vector<Point> vertices; // counter-clockwise, not closed
    double height = 0.0;

    double area() const;
    double perimeter() const;
};

struct Histogram1D {
    double origin = 0.0; // lower edge of bin 0
    double bin_width = 1.0;
    Eigen::ArrayXd weights;
    bool empty = true;
    // Sum of weights before normalization.
    double raw_total = 0.0;

    double lower(Eigen::Index i) const { return origin + bin_width * static_cast<double>(i); }
    double center(Eigen::Index i) const { return lower(i) + 0.5 * bin_width; }
    // Piecewise-linear CDF (uniform density within bins).
    double cdf(double v) const;
    double mean() const;
    double sample(Rng& rng) const;
    // Index of the heaviest bin.
    Eigen::Index mode_bin() const;
};

// Bins centred on multiples of width; value v lands in bin round(v/width).
Histogram1D make_histogram(const std::vector<double>& values, const std::vector<double>& weights, double width);

struct AzimuthStats {
    double azimuth_deg = 0.0;
    Histogram1D height;
    Histogram1D area;
    Histogram1D distance;
};

struct GeoStats {
    double delta_phi = 5.0;
    double delta_h = 5.0;
    double delta_a = 20.0;
    double delta_d = 5.0;
    std::vector<AzimuthStats> bins; // centres -180+dphi ... 180
    AzimuthStats marginal;

    std::size_t bin_index(double azimuth_deg) const;
    const AzimuthStats& at(double azimuth_deg) const { return bins.at(bin_index(azimuth_deg)); }
    // Conditional histograms with the marginal fallback for empty bins.
    const Histogram1D& height(double azimuth_deg) const;
    const Histogram1D& area(double azimuth_deg) const;
    const Histogram1D& distance(double azimuth_deg) const;
};

std::vector<BuildingPolygon> parse_dataset(std::istream& in, const std::string& name = "<stream>");
std::vector<BuildingPolygon> load_dataset(const std::string& path);
void write_dataset(std::ostream& out, const std::vector<BuildingPolygon>& polys);

std::vector<BuildingPolygon> merge_and_convexify(const std::vector<BuildingPolygon>& polys, double adjacency_tol = 0.5);

struct ExtractOptions {
    double delta_phi = 5.0;
    double delta_h = 5.0;
    double delta_a = 20.0;
    double delta_d = 5.0;
    // facade pairs farther apart than this are ignored
    double max_distance = 1000.0;
};

GeoStats extract_stats(const std::vector<BuildingPolygon>& polys, const ExtractOptions& opt = {});

void save_geostats(const GeoStats& g, const std::string& path);
GeoStats load_geostats(const std::string& path);
std::string geostats_to_string(const GeoStats& g);
GeoStats geostats_from_string(const std::string& text);

// Sum over facades of length x height.
double total_facade_area(const std::vector<BuildingPolygon>& polys);
// Clockwise rotation by delta (azimuths increase by delta), then translation.
std::vector<BuildingPolygon> transform_dataset(const std::vector<BuildingPolygon>& polys, double delta_deg,
                                               const Point& offset = Point::Zero());
std::vector<Point> convex_hull(std::vector<Point> pts);
bool is_simple(const std::vector<Point>& v);

// n x n square blocks of the given side, separated by streets.
std::vector<BuildingPolygon> manhattan_grid(int n = 5, double side = 20.0, double street = 20.0, double height = 20.0);

struct SyntheticCityOptions {
    int blocks = 24;
    double pitch = 60.0;
    double min_side = 12.0;
    double max_side = 38.0;
    double median_height = 18.0;
    double height_sigma = 0.45;
    std::uint64_t seed = 7;
};
// Randomly sized and oriented rectangles on a jittered lattice.
std::vector<BuildingPolygon> synthetic_city(const SyntheticCityOptions& opt = {});

} // namespace u6g
