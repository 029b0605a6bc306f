// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "u6g/distengine.hpp"
#include "u6g/modes.hpp"

namespace u6g {

struct GeoStats;

enum class LossKind { Clutter, Diffraction, Reflection };

std::string to_string(ModeSign s);
std::string to_string(LossKind k);

struct ClutterEntry {
    ModeSign sign = ModeSign::Positive;
    LossKind kind = LossKind::Clutter;
    double elevation_deg = 0.0;
    double bs_height_m = 0.0;
    // (loss dB, cumulative probability), loss ascending
    std::vector<std::pair<double, double>> cdf;

    void validate(const std::string& where = "") const;
    // Smallest loss whose cumulative probability reaches q.
    double quantile(double q) const;
};

struct ClutterTable {
    std::vector<ClutterEntry> entries;

    bool has_kind(LossKind k) const;
    // Nearest elevation first, then nearest BS height among those.
    const ClutterEntry& lookup(ModeSign sign, LossKind kind, double psi_deg, double h_bs) const;
};

ClutterTable parse_clutter_table(std::istream& in, const std::string& name = "<stream>");
ClutterTable load_clutter_table(const std::string& path);
void write_clutter_table(std::ostream& out, const ClutterTable& t);
void save_clutter_table(const ClutterTable& t, const std::string& path);

// Gain PDF (gain = -loss) of one entry.
DbDistribution entry_gain_pdf(const ClutterEntry& e, double step = 0.25);

// Gain PDF (gain = -loss) for the mode's sign.
DbDistribution clutter_gain_pdf(ModeTag mode, double psi_deg, double h_bs, const ClutterTable& table,
                                double step = 0.25, LossKind kind = LossKind::Clutter);

// Knife-edge diffraction loss, clamped to [0, 60] dB.
double knife_edge_loss_db(double nu);

struct SyntheticClutterOptions {
    double frequency_hz = 6e9;
    double phi_s_deg = 45.0;
    std::size_t n_samples = 20000;
    std::uint64_t seed = 11;
    double step = 0.25;
};

// Monte-Carlo single-obstacle fallback model (not a ray-traced clutter model).
ClutterEntry synthetic_clutter(const GeoStats& geo, ModeSign sign, double psi_deg, double h_bs,
                               const SyntheticClutterOptions& opt = {});

ClutterTable synthetic_clutter_table(const GeoStats& geo, const std::vector<double>& elevations,
                                     const std::vector<double>& bs_heights, const SyntheticClutterOptions& opt = {});

// Fresnel reflection loss table (facades for positive modes, ground for negative).
ClutterTable synthetic_reflection_table(const std::vector<double>& elevations, double eps_facade = 5.3,
                                        double eps_ground = 15.0);

} // namespace u6g
