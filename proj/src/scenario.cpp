// SPDX-License-Identifier: Apache-2.0
#include "u6g/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace u6g {

using nlohmann::json;

std::string to_string(Method m)
{
    switch (m) {
    case Method::SMI:
        return "SMI";
    case Method::GSMI:
        return "GSMI";
    case Method::GSMIReflection:
        return "GSMI+reflection";
    }
    return "?";
}

std::string to_string(const Category& c)
{
    return std::string(c.bs == BsClass::Micro ? "micro" : "macro") + (c.indoor ? "-indoor" : "-outdoor");
}

Category category_from_string(const std::string& s)
{
    for (const auto& c : kAllCategories)
        if (to_string(c) == s)
            return c;
    throw ValidationError("unknown category '" + s + "' (expected micro-indoor, micro-outdoor, macro-indoor, macro-outdoor)");
}

double ScenarioConfig::macro_density() const
{
    if (macro_density_per_m2)
        return *macro_density_per_m2;
    // hexagon of side d_c/2
    const double side = cell_radius_m / 2.0;
    const double sc = 1.5 * std::sqrt(3.0) * side * side;
    return 1.0 / (3.0 * sc);
}

double ScenarioConfig::city_q() const
{
    if (q_override)
        return *q_override;
    return city_area_km2 * 1e6 * macro_density() * loading_factor * tdd_factor;
}

double ScenarioConfig::city_elevation() const
{
    if (city_elevation_deg)
        return *city_elevation_deg;
    return elevation_and_offnadir(city_latitude_deg, city_longitude_deg, sat).elevation_deg;
}

ServedUeModel ScenarioConfig::ue_model(bool indoor) const
{
    ServedUeModel u = ue;
    u.indoor = indoor;
    u.cell_radius = cell_radius_m;
    u.micro_radius = micro_radius_m;
    return u;
}

namespace {

[[noreturn]] void throw_problems(const std::vector<std::string>& errs)
{
    std::ostringstream m;
    m << "invalid scenario (" << errs.size() << " problem" << (errs.size() > 1 ? "s" : "") << "):";
    for (const auto& e : errs)
        m << "\n  - " << e;
    throw ValidationError(m.str());
}

} // namespace

void ScenarioConfig::validate() const
{
    const auto errs = problems();
    if (!errs.empty())
        throw_problems(errs);
}

std::vector<std::string> ScenarioConfig::problems() const
{
    std::vector<std::string> errs;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok)
            errs.push_back(what);
    };
    auto unit = [&](double v, const char* name) {
        need(v >= 0.0 && v <= 1.0, std::string(name) + " must lie in [0, 1]");
    };
    need(frequency_hz > 0.0, "frequency_hz must be > 0");
    need(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
    need(cell_radius_m > 0.0, "cell_radius_m must be > 0");
    need(micro_radius_m > 0.0 && micro_radius_m < cell_radius_m, "micro_radius_m must be in (0, cell_radius_m)");
    if (macro_density_per_m2)
        need(*macro_density_per_m2 >= 0.0, "macro_density_per_m2 must be >= 0");
    unit(loading_factor, "loading_factor");
    unit(tdd_factor, "tdd_factor");
    unit(outdoor_fraction, "outdoor_fraction");
    unit(built_ratio, "footprint.built_ratio");
    for (double r : urban_ratios)
        unit(r, "footprint.urban_ratios[]");
    need(micro_per_macro >= 0.0, "micro_per_macro must be >= 0");
    need(t_sys_k > 0.0, "t_sys_k must be > 0");
    need(percentile > 0.0 && percentile < 100.0, "percentile must be in (0, 100)");
    need(city_area_km2 >= 0.0, "city.area_km2 must be >= 0");
    if (q_override)
        need(*q_override >= 0.0, "city.q_override must be >= 0");
    if (city_elevation_deg)
        need(*city_elevation_deg > 0.0 && *city_elevation_deg <= 90.0, "city.elevation_deg must be in (0, 90]");
    need(gain_step_db > 0.0, "footprint.gain_step_db must be > 0");
    need(elevation_step_deg > 0.0, "footprint.elevation_step_deg must be > 0");
    need(sat_distance_km > 0.0, "satellite.distance_km must be > 0");
    need(sat.beamwidth_deg > 0.0, "satellite.beamwidth_deg must be > 0");
    need(sat.sidelobe_ls_db < 0.0, "satellite.sidelobe_ls_db must be < 0");
    need(sat.orbit_radius_km > sat.earth_radius_km, "satellite.orbit_radius_km must exceed earth_radius_km");
    for (auto [name, a] : {std::pair{"arrays.macro", &macro_array}, std::pair{"arrays.micro", &micro_array}}) {
        try {
            a->validate();
        } catch (const ValidationError& e) {
            errs.push_back(std::string(name) + ": " + e.what());
        }
    }
    need(!categories.empty(), "categories must not be empty");
    need(!modes.empty(), "modes must not be empty");
    for (const auto& [m, p] : occurrence_override)
        need(p >= 0.0 && p <= 1.0, "occurrence_override." + to_string(m) + " must lie in [0, 1]");
    need(gain_samples > 0, "samples.gain must be > 0");
    need(occurrence_samples > 0, "samples.occurrence must be > 0");
    need(clutter_samples > 0, "samples.clutter must be > 0");
    need(db_step > 0.0 && db_step <= 2.0, "numerics.db_step must be in (0, 2]");
    need(omega_points_per_decade >= 50.0, "numerics.omega_points_per_decade must be >= 50");
    need(cdf_points >= 10, "numerics.cdf_points must be >= 10");
    need(x_low_factor > 0.0 && x_low_factor < 1.0, "numerics.x_low_factor must be in (0, 1)");
    need(x_high_factor > 1.0, "numerics.x_high_factor must be > 1");
    if (method == Method::SMI)
        need(!clutter_path.empty(), "SMI needs inputs.clutter_table (a path or \"synthetic\")");
    if (method == Method::GSMIReflection)
        need(!reflection_path.empty(), "GSMI+reflection needs inputs.reflection_table (a path or \"synthetic\")");
    return errs;
}

namespace {

// Reads known keys from an object and records anything unexpected.
class Reader {
public:
    Reader(const json& j, std::string path, std::vector<std::string>& errs) : j_(j), path_(std::move(path)), errs_(errs)
    {
        if (!j_.is_object())
            errs_.push_back(path_ + " must be an object");
    }
    ~Reader()
    {
        if (!j_.is_object())
            return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                errs_.push_back("unknown key " + where(it.key()));
    }

    const json* get(const std::string& k)
    {
        seen_.insert(k);
        if (!j_.is_object() || !j_.contains(k) || j_.at(k).is_null())
            return nullptr;
        return &j_.at(k);
    }

    template <class T>
    void read(const std::string& k, T& out)
    {
        if (const json* v = get(k)) {
            try {
                out = v->get<T>();
            } catch (const json::exception&) {
                errs_.push_back(where(k) + " has the wrong type");
            }
        }
    }
    template <class T>
    void read(const std::string& k, std::optional<T>& out)
    {
        if (const json* v = get(k)) {
            try {
                out = v->get<T>();
            } catch (const json::exception&) {
                errs_.push_back(where(k) + " has the wrong type");
            }
        }
    }

    std::string where(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    std::vector<std::string>& errs() { return errs_; }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

void read_array(Reader& r, ArrayConfig& a)
{
    r.read("N_H", a.n_h);
    r.read("N_V", a.n_v);
    r.read("eta", a.eta);
    r.read("P_T_dbm", a.pt_dbm);
    r.read("A_f_db", a.feeder_loss_db);
    r.read("tilt_deg", a.tilt_deg);
    r.read("G_e_dbi", a.ge_dbi);
    r.read("psi_3db_deg", a.psi_3db_deg);
    r.read("phi_3db_deg", a.phi_3db_deg);
    r.read("SLA_v_db", a.sla_v_db);
    r.read("A_m_db", a.am_db);
    r.read("shield_deg", a.shield_deg);
    r.read("spacing_wavelengths", a.spacing);
}

json array_json(const ArrayConfig& a)
{
    return {{"N_H", a.n_h},         {"N_V", a.n_v},         {"eta", a.eta},
            {"P_T_dbm", a.pt_dbm},  {"A_f_db", a.feeder_loss_db}, {"tilt_deg", a.tilt_deg},
            {"G_e_dbi", a.ge_dbi},  {"psi_3db_deg", a.psi_3db_deg}, {"phi_3db_deg", a.phi_3db_deg},
            {"SLA_v_db", a.sla_v_db}, {"A_m_db", a.am_db},  {"shield_deg", a.shield_deg},
            {"spacing_wavelengths", a.spacing}};
}

std::string resolve(const std::string& p, const std::string& base)
{
    if (p.empty() || p == "synthetic")
        return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute())
        return p;
    // absolute, so a config snapshot written elsewhere still resolves
    return std::filesystem::absolute(std::filesystem::path(base) / fp).lexically_normal().string();
}

} // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir)
{
    json j;
    try {
        j = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    ScenarioConfig c;
    std::vector<std::string> errs;
    {
        Reader r(j, "", errs);
        if (const json* m = r.get("method")) {
            const std::string s = m->is_string() ? m->get<std::string>() : "";
            if (s == "SMI")
                c.method = Method::SMI;
            else if (s == "GSMI")
                c.method = Method::GSMI;
            else if (s == "GSMI+reflection")
                c.method = Method::GSMIReflection;
            else
                errs.push_back("method must be one of SMI, GSMI, GSMI+reflection");
        }
        r.read("seed", c.seed);
        r.read("frequency_hz", c.frequency_hz);
        r.read("bandwidth_hz", c.bandwidth_hz);
        r.read("sat_azimuth_deg", c.sat_azimuth_deg);
        r.read("cell_radius_m", c.cell_radius_m);
        r.read("micro_radius_m", c.micro_radius_m);
        r.read("macro_density_per_m2", c.macro_density_per_m2);
        r.read("loading_factor", c.loading_factor);
        r.read("tdd_factor", c.tdd_factor);
        r.read("outdoor_fraction", c.outdoor_fraction);
        r.read("micro_per_macro", c.micro_per_macro);
        r.read("t_sys_k", c.t_sys_k);
        r.read("inr_threshold_db", c.inr_threshold_db);
        r.read("polarization_loss_db", c.pol_loss_db);
        r.read("percentile", c.percentile);
        r.read("independent_streets", c.independent_streets);

        if (const json* v = r.get("city")) {
            Reader s(*v, "city", errs);
            s.read("area_km2", c.city_area_km2);
            s.read("latitude_deg", c.city_latitude_deg);
            s.read("longitude_deg", c.city_longitude_deg);
            s.read("elevation_deg", c.city_elevation_deg);
            s.read("sat_gain_dbi", c.city_sat_gain_dbi);
            s.read("q_override", c.q_override);
        }
        if (const json* v = r.get("footprint")) {
            Reader s(*v, "footprint", errs);
            s.read("urban_ratios", c.urban_ratios);
            s.read("built_ratio", c.built_ratio);
            s.read("gain_step_db", c.gain_step_db);
            s.read("elevation_step_deg", c.elevation_step_deg);
            s.read("per_pixel_range", c.per_pixel_range);
        }
        if (const json* v = r.get("satellite")) {
            Reader s(*v, "satellite", errs);
            s.read("longitude_deg", c.sat.longitude_deg);
            s.read("earth_radius_km", c.sat.earth_radius_km);
            s.read("orbit_radius_km", c.sat.orbit_radius_km);
            s.read("max_gain_dbi", c.sat.max_gain_dbi);
            s.read("beamwidth_deg", c.sat.beamwidth_deg);
            s.read("sidelobe_ls_db", c.sat.sidelobe_ls_db);
            s.read("distance_km", c.sat_distance_km);
        }
        if (const json* v = r.get("arrays")) {
            Reader s(*v, "arrays", errs);
            s.read("reference_config", c.reference_config);
            if (c.reference_config == 1 || c.reference_config == 2) {
                c.macro_array = reference_array(c.reference_config, BsClass::Macro);
                c.micro_array = reference_array(c.reference_config, BsClass::Micro);
            } else {
                errs.push_back("arrays.reference_config must be 1 or 2");
            }
            if (const json* m = s.get("macro")) {
                Reader a(*m, "arrays.macro", errs);
                read_array(a, c.macro_array);
            }
            if (const json* m = s.get("micro")) {
                Reader a(*m, "arrays.micro", errs);
                read_array(a, c.micro_array);
            }
        }
        if (const json* v = r.get("ue")) {
            Reader s(*v, "ue", errs);
            s.read("outdoor_height_m", c.ue.outdoor_height);
            s.read("min_distance_macro_m", c.ue.min_distance_macro);
            s.read("min_distance_micro_m", c.ue.min_distance_micro);
            s.read("micro_offsets_deg", c.ue.micro_offsets_deg);
            s.read("micro_height_m", c.ue.micro_height);
            s.read("macro_min_height_m", c.ue.macro_min_height);
        }
        if (const json* v = r.get("categories")) {
            c.categories.clear();
            if (!v->is_array())
                errs.push_back("categories must be an array");
            else
                for (const auto& e : *v) {
                    try {
                        c.categories.push_back(category_from_string(e.get<std::string>()));
                    } catch (const std::exception& ex) {
                        errs.push_back(std::string("categories: ") + ex.what());
                    }
                }
        }
        if (const json* v = r.get("modes")) {
            c.modes.clear();
            if (!v->is_array())
                errs.push_back("modes must be an array");
            else
                for (const auto& e : *v) {
                    try {
                        c.modes.push_back(mode_from_string(e.get<std::string>()));
                    } catch (const std::exception& ex) {
                        errs.push_back(std::string("modes: ") + ex.what());
                    }
                }
        }
        if (const json* v = r.get("occurrence_override")) {
            if (!v->is_object())
                errs.push_back("occurrence_override must be an object");
            else
                for (auto it = v->begin(); it != v->end(); ++it) {
                    try {
                        c.occurrence_override[mode_from_string(it.key())] = it.value().get<double>();
                    } catch (const std::exception& ex) {
                        errs.push_back(std::string("occurrence_override: ") + ex.what());
                    }
                }
        }
        if (const json* v = r.get("inputs")) {
            Reader s(*v, "inputs", errs);
            s.read("geostats", c.geostats_path);
            s.read("clutter_table", c.clutter_path);
            s.read("reflection_table", c.reflection_path);
        }
        if (const json* v = r.get("samples")) {
            Reader s(*v, "samples", errs);
            s.read("gain", c.gain_samples);
            s.read("occurrence", c.occurrence_samples);
            s.read("clutter", c.clutter_samples);
            s.read("mc_trials", c.mc_trials);
        }
        if (const json* v = r.get("numerics")) {
            Reader s(*v, "numerics", errs);
            s.read("db_step", c.db_step);
            s.read("omega_points_per_decade", c.omega_points_per_decade);
            s.read("cdf_points", c.cdf_points);
            s.read("x_low_factor", c.x_low_factor);
            s.read("x_high_factor", c.x_high_factor);
        }
    }
    if (c.geostats_path.empty())
        errs.push_back("inputs.geostats is required");
    c.geostats_path = resolve(c.geostats_path, base_dir);
    c.clutter_path = resolve(c.clutter_path, base_dir);
    c.reflection_path = resolve(c.reflection_path, base_dir);

    // schema problems and range problems are reported together
    for (auto& e : c.problems())
        errs.push_back(std::move(e));
    if (!errs.empty())
        throw_problems(errs);
    return c;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open scenario '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    const auto base = std::filesystem::path(path).parent_path().string();
    return parse_scenario(ss.str(), base.empty() ? "." : base);
}

std::string scenario_to_json(const ScenarioConfig& c)
{
    json j;
    j["method"] = to_string(c.method);
    j["seed"] = c.seed;
    j["frequency_hz"] = c.frequency_hz;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["sat_azimuth_deg"] = c.sat_azimuth_deg;
    j["cell_radius_m"] = c.cell_radius_m;
    j["micro_radius_m"] = c.micro_radius_m;
    j["macro_density_per_m2"] = c.macro_density();
    j["loading_factor"] = c.loading_factor;
    j["tdd_factor"] = c.tdd_factor;
    j["outdoor_fraction"] = c.outdoor_fraction;
    j["micro_per_macro"] = c.micro_per_macro;
    j["t_sys_k"] = c.t_sys_k;
    j["inr_threshold_db"] = c.inr_threshold_db;
    j["polarization_loss_db"] = c.pol_loss_db;
    j["percentile"] = c.percentile;
    j["independent_streets"] = c.independent_streets;
    j["city"] = {{"area_km2", c.city_area_km2},
                 {"latitude_deg", c.city_latitude_deg},
                 {"longitude_deg", c.city_longitude_deg},
                 {"sat_gain_dbi", c.city_sat_gain_dbi}};
    if (c.city_elevation_deg)
        j["city"]["elevation_deg"] = *c.city_elevation_deg;
    if (c.q_override)
        j["city"]["q_override"] = *c.q_override;
    j["footprint"] = {{"urban_ratios", c.urban_ratios},
                      {"built_ratio", c.built_ratio},
                      {"gain_step_db", c.gain_step_db},
                      {"elevation_step_deg", c.elevation_step_deg},
                      {"per_pixel_range", c.per_pixel_range}};
    j["satellite"] = {{"longitude_deg", c.sat.longitude_deg}, {"earth_radius_km", c.sat.earth_radius_km},
                      {"orbit_radius_km", c.sat.orbit_radius_km}, {"max_gain_dbi", c.sat.max_gain_dbi},
                      {"beamwidth_deg", c.sat.beamwidth_deg},   {"sidelobe_ls_db", c.sat.sidelobe_ls_db},
                      {"distance_km", c.sat_distance_km}};
    j["arrays"] = {{"reference_config", c.reference_config},
                   {"macro", array_json(c.macro_array)},
                   {"micro", array_json(c.micro_array)}};
    j["ue"] = {{"outdoor_height_m", c.ue.outdoor_height},
               {"min_distance_macro_m", c.ue.min_distance_macro},
               {"min_distance_micro_m", c.ue.min_distance_micro},
               {"micro_offsets_deg", c.ue.micro_offsets_deg},
               {"micro_height_m", c.ue.micro_height},
               {"macro_min_height_m", c.ue.macro_min_height}};
    j["categories"] = json::array();
    for (const auto& cat : c.categories)
        j["categories"].push_back(to_string(cat));
    j["modes"] = json::array();
    for (auto m : c.modes)
        j["modes"].push_back(to_string(m));
    j["occurrence_override"] = json::object();
    for (const auto& [m, p] : c.occurrence_override)
        j["occurrence_override"][to_string(m)] = p;
    j["inputs"] = {{"geostats", c.geostats_path}, {"clutter_table", c.clutter_path}, {"reflection_table", c.reflection_path}};
    j["samples"] = {{"gain", c.gain_samples},
                    {"occurrence", c.occurrence_samples},
                    {"clutter", c.clutter_samples},
                    {"mc_trials", c.mc_trials}};
    j["numerics"] = {{"db_step", c.db_step},
                     {"omega_points_per_decade", c.omega_points_per_decade},
                     {"cdf_points", c.cdf_points},
                     {"x_low_factor", c.x_low_factor},
                     {"x_high_factor", c.x_high_factor}};
    return j.dump(2);
}

} // namespace u6g
