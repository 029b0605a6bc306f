// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "u6g/antenna.hpp"
#include "u6g/linkbudget.hpp"
#include "u6g/modes.hpp"

namespace u6g {

enum class Method { SMI, GSMI, GSMIReflection };

std::string to_string(Method m);

struct Category {
    BsClass bs = BsClass::Macro;
    bool indoor = true;
    bool operator==(const Category&) const = default;
};

std::string to_string(const Category& c);
Category category_from_string(const std::string& s);
inline const std::vector<Category> kAllCategories{
    {BsClass::Micro, true}, {BsClass::Micro, false}, {BsClass::Macro, true}, {BsClass::Macro, false}};

struct ScenarioConfig {
    Method method = Method::SMI;
    std::uint64_t seed = 1;

    double frequency_hz = 6e9;
    double bandwidth_hz = 100e6;
    double sat_azimuth_deg = 45.0;
    double cell_radius_m = 300.0;
    double micro_radius_m = 75.0;
    std::optional<double> macro_density_per_m2;
    double loading_factor = 0.2;
    double tdd_factor = 0.75;
    double outdoor_fraction = 0.3; // beta
    double micro_per_macro = 9.0;
    double t_sys_k = 800.0;
    double inr_threshold_db = -10.5;
    double pol_loss_db = 3.0;
    double percentile = 80.0;

    // city run
    double city_area_km2 = 181.76;
    double city_latitude_deg = 45.46;
    double city_longitude_deg = 9.19;
    std::optional<double> city_elevation_deg;
    double city_sat_gain_dbi = 20.0;
    std::optional<double> q_override;

    // footprint run
    std::vector<double> urban_ratios{0.05, 0.10};
    double built_ratio = 0.01;
    double gain_step_db = 1.0;
    double elevation_step_deg = 10.0;
    bool per_pixel_range = false;

    SatGeometry sat;
    double sat_distance_km = 35000.0;

    int reference_config = 1;
    ArrayConfig macro_array = reference_array(1, BsClass::Macro);
    ArrayConfig micro_array = reference_array(1, BsClass::Micro);
    ServedUeModel ue;

    std::vector<Category> categories = kAllCategories;
    std::vector<ModeTag> modes{kAllModes.begin(), kAllModes.end()};
    std::map<ModeTag, double> occurrence_override;
    bool independent_streets = false;

    std::string geostats_path;
    std::string clutter_path = "synthetic";
    std::string reflection_path = "synthetic";

    std::size_t gain_samples = 100000;
    std::size_t occurrence_samples = 20000;
    std::size_t clutter_samples = 20000;
    std::size_t mc_trials = 0;

    double db_step = 0.25;
    double omega_points_per_decade = 500.0;
    int cdf_points = 600;
    double x_low_factor = 1e-7;
    double x_high_factor = 1e3;

    // Macro-site density; defaults to one site per three hexagonal cells of side d_c/2.
    double macro_density() const;
    double city_q() const;
    double city_elevation() const;
    const ArrayConfig& array(BsClass b) const { return b == BsClass::Macro ? macro_array : micro_array; }
    ServedUeModel ue_model(bool indoor) const;
    // Throws ValidationError listing every problem found.
    void validate() const;
    std::vector<std::string> problems() const;
};

// Parses the JSON scenario file; relative input paths resolve against its directory.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
std::string scenario_to_json(const ScenarioConfig& c);

} // namespace u6g
