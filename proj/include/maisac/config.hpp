#pragma once

// JSON experiment configuration.
//
// Top level keys: num_gns, num_antennas, num_slots, interval_s, rng_seed and
// the tables geometry, power, channel, sensing, pso, solver. Powers may be
// given in dBm (`*_dbm`) or watts (`*_w`), gains in dB (`*_db`) or linear
// (`*_linear`), lengths in meters or wavelengths, angles in degrees. Exactly
// one form of each quantity may appear. Everything is converted to linear SI
// at load time; `to_json` writes the linear forms so a save/load round trip
// is exact.

#include "maisac/beamforming.hpp"
#include "maisac/pso.hpp"
#include "maisac/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace maisac {

struct AoParams {
  int max_iter = 10;
  double tol = 1e-4;
};

struct ExperimentConfig {
  Scenario scenario;
  PsoParams pso;
  ScaParams sca;
  AoParams ao;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, const std::string& table, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(table, "expected a table");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError(table.empty() ? key : table + "." + key, "unknown key");
}

template <class T>
T get_or(const json& j, const char* key, const std::string& table, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(table.empty() ? std::string(key) : table + "." + key, e.what());
  }
}

// Reads one of two alternative spellings of a quantity, converting the first.
inline std::optional<double> alternative(const json& j, const std::string& table, const char* converted_key,
                                         double (*convert)(double), const char* linear_key) {
  const bool a = j.contains(converted_key);
  const bool b = j.contains(linear_key);
  if (a && b) throw ConfigError(table + "." + converted_key, std::string("conflicts with ") + linear_key);
  if (a) return convert(get_or<double>(j, converted_key, table, 0.0));
  if (b) return get_or<double>(j, linear_key, table, 0.0);
  return std::nullopt;
}

inline double identity(double v) { return v; }

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& root) {
  using detail::get_or;
  using detail::json;
  detail::reject_unknown(root, "", {"num_gns", "num_antennas", "num_slots", "interval_s", "rng_seed", "geometry",
                                    "power", "channel", "sensing", "pso", "solver"});
  ExperimentConfig cfg;
  Scenario& s = cfg.scenario;
  s.num_gns = get_or<int>(root, "num_gns", "", s.num_gns);
  s.num_antennas = get_or<int>(root, "num_antennas", "", s.num_antennas);
  s.num_slots = get_or<int>(root, "num_slots", "", s.num_slots);
  s.interval_seconds = get_or<double>(root, "interval_s", "", s.interval_seconds);
  s.rng_seed = get_or<std::uint64_t>(root, "rng_seed", "", s.rng_seed);

  const json empty = json::object();
  const json& geo = root.contains("geometry") ? root.at("geometry") : empty;
  detail::reject_unknown(geo, "geometry",
                         {"wavelength_m", "aperture_m", "aperture_wavelengths", "min_spacing_m",
                          "min_spacing_wavelengths", "altitude_m", "area_m", "ulap_xy_m", "gn_placement",
                          "gn_positions_m", "array_axis", "array_axis_azimuth_deg", "array_axis_elevation_deg"});
  s.wavelength = get_or<double>(geo, "wavelength_m", "geometry", s.wavelength);
  const double lambda = s.wavelength;
  auto length = [&](const char* meters, const char* waves, double fallback_waves) {
    const bool a = geo.contains(meters);
    const bool b = geo.contains(waves);
    if (a && b) throw ConfigError(std::string("geometry.") + meters, std::string("conflicts with ") + waves);
    if (a) return get_or<double>(geo, meters, "geometry", 0.0);
    return get_or<double>(geo, waves, "geometry", fallback_waves) * lambda;
  };
  s.aperture = length("aperture_m", "aperture_wavelengths", 10.0);
  s.min_spacing = length("min_spacing_m", "min_spacing_wavelengths", 0.5);
  s.altitude = get_or<double>(geo, "altitude_m", "geometry", s.altitude);
  s.area = get_or<Vec2>(geo, "area_m", "geometry", s.area);
  const Vec2 ulap_xy = get_or<Vec2>(geo, "ulap_xy_m", "geometry", Vec2{s.area[0] / 2.0, s.area[1] / 2.0});
  s.ulap_position = {ulap_xy[0], ulap_xy[1], s.altitude};
  const std::string placement = get_or<std::string>(geo, "gn_placement", "geometry", "uniform");
  if (placement == "uniform") {
    s.placement = GnPlacement::kUniform;
  } else if (placement == "explicit") {
    s.placement = GnPlacement::kExplicit;
  } else {
    throw ConfigError("geometry.gn_placement", "expected \"uniform\" or \"explicit\"");
  }
  if (geo.contains("gn_positions_m")) {
    s.gn_positions = get_or<std::vector<Vec2>>(geo, "gn_positions_m", "geometry", {});
  } else if (s.placement == GnPlacement::kExplicit) {
    throw ConfigError("geometry.gn_positions_m", "required for explicit placement");
  } else if (s.num_gns >= 1) {
    s.gn_positions = random_gn_positions(s.num_gns + 1, s.area, s.rng_seed);
  }
  if (geo.contains("array_axis") && (geo.contains("array_axis_azimuth_deg") || geo.contains("array_axis_elevation_deg"))) {
    throw ConfigError("geometry.array_axis", "give either a vector or azimuth/elevation angles");
  }
  if (geo.contains("array_axis")) {
    s.array_axis = get_or<Vec3>(geo, "array_axis", "geometry", s.array_axis);
  } else {
    s.array_axis = axis_from_angles(get_or<double>(geo, "array_axis_azimuth_deg", "geometry", 0.0),
                                    get_or<double>(geo, "array_axis_elevation_deg", "geometry", 0.0));
  }

  const json& pow = root.contains("power") ? root.at("power") : empty;
  detail::reject_unknown(pow, "power", {"max_power_dbm", "max_power_w", "noise_power_dbm", "noise_power_w",
                                        "ref_gain_db", "ref_gain_linear"});
  s.max_power = detail::alternative(pow, "power", "max_power_dbm", dbm_to_watts, "max_power_w").value_or(1.0);
  {
    const bool a = pow.contains("noise_power_dbm");
    const bool b = pow.contains("noise_power_w");
    if (a && b) throw ConfigError("power.noise_power_dbm", "conflicts with noise_power_w");
    const char* key = a ? "noise_power_dbm" : "noise_power_w";
    std::vector<double> values;
    if (a || b) {
      const json& v = pow.at(key);
      try {
        values = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>(static_cast<std::size_t>(std::max(s.num_gns, 0)), v.get<double>());
      } catch (const json::exception& e) {
        throw ConfigError(std::string("power.") + key, e.what());
      }
      if (a)
        for (double& x : values) x = dbm_to_watts(x);
    } else {
      values.assign(static_cast<std::size_t>(std::max(s.num_gns, 0)), dbm_to_watts(-110.0));
    }
    s.noise_power = std::move(values);
  }
  s.ref_gain = detail::alternative(pow, "power", "ref_gain_db", db_to_linear, "ref_gain_linear").value_or(1e-6);

  const json& ch = root.contains("channel") ? root.at("channel") : empty;
  detail::reject_unknown(ch, "channel", {"rician_factor_db", "rician_factor_linear", "fading"});
  s.rician_factor =
      detail::alternative(ch, "channel", "rician_factor_db", db_to_linear, "rician_factor_linear").value_or(10.0);
  const std::string fading = get_or<std::string>(ch, "fading", "channel", "per_slot");
  if (fading == "per_slot") {
    s.fading = FadingMode::kPerSlot;
  } else if (fading == "block") {
    s.fading = FadingMode::kBlock;
  } else {
    throw ConfigError("channel.fading", "expected \"per_slot\" or \"block\"");
  }

  const json& sen = root.contains("sensing") ? root.at("sensing") : empty;
  detail::reject_unknown(sen, "sensing", {"beampattern_threshold_dbm", "beampattern_threshold_w"});
  s.beampattern_threshold =
      detail::alternative(sen, "sensing", "beampattern_threshold_dbm", dbm_to_watts, "beampattern_threshold_w")
          .value_or(1e-5);

  const json& pso = root.contains("pso") ? root.at("pso") : empty;
  detail::reject_unknown(pso, "pso", {"swarm_size", "max_iter", "inertia", "inertia_decay", "cognitive", "social",
                                      "step", "velocity_clamp", "repair_retries"});
  PsoParams& p = cfg.pso;
  p.swarm_size = get_or<int>(pso, "swarm_size", "pso", p.swarm_size);
  p.max_iter = get_or<int>(pso, "max_iter", "pso", p.max_iter);
  p.inertia = get_or<double>(pso, "inertia", "pso", p.inertia);
  p.inertia_decay = get_or<double>(pso, "inertia_decay", "pso", p.inertia_decay);
  p.cognitive = get_or<double>(pso, "cognitive", "pso", p.cognitive);
  p.social = get_or<double>(pso, "social", "pso", p.social);
  p.step = get_or<double>(pso, "step", "pso", p.step);
  p.velocity_clamp = get_or<double>(pso, "velocity_clamp", "pso", p.velocity_clamp);
  p.repair_retries = get_or<int>(pso, "repair_retries", "pso", p.repair_retries);

  const json& sol = root.contains("solver") ? root.at("solver") : empty;
  detail::reject_unknown(sol, "solver", {"sca_max_iter", "sca_tol", "ao_max_iter", "ao_tol", "sensing_enabled",
                                         "gap_tol", "max_iterations"});
  cfg.sca.max_iter = get_or<int>(sol, "sca_max_iter", "solver", cfg.sca.max_iter);
  cfg.sca.tol = get_or<double>(sol, "sca_tol", "solver", cfg.sca.tol);
  cfg.sca.sensing_enabled = get_or<bool>(sol, "sensing_enabled", "solver", cfg.sca.sensing_enabled);
  cfg.sca.solver.gap_tol = get_or<double>(sol, "gap_tol", "solver", cfg.sca.solver.gap_tol);
  cfg.sca.solver.max_iterations = get_or<int>(sol, "max_iterations", "solver", cfg.sca.solver.max_iterations);
  cfg.ao.max_iter = get_or<int>(sol, "ao_max_iter", "solver", cfg.ao.max_iter);
  cfg.ao.tol = get_or<double>(sol, "ao_tol", "solver", cfg.ao.tol);

  validate(s);
  validate(p);
  auto need = [](bool ok, const char* field) {
    if (!ok) throw ConfigError(field, "out of range");
  };
  need(cfg.sca.max_iter >= 0, "solver.sca_max_iter");
  need(cfg.sca.tol > 0.0, "solver.sca_tol");
  need(cfg.sca.solver.gap_tol > 0.0, "solver.gap_tol");
  need(cfg.sca.solver.max_iterations >= 1, "solver.max_iterations");
  need(cfg.ao.max_iter >= 0, "solver.ao_max_iter");
  need(cfg.ao.tol > 0.0, "solver.ao_tol");
  return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  const Scenario& s = cfg.scenario;
  nlohmann::json j;
  j["num_gns"] = s.num_gns;
  j["num_antennas"] = s.num_antennas;
  j["num_slots"] = s.num_slots;
  j["interval_s"] = s.interval_seconds;
  j["rng_seed"] = s.rng_seed;
  j["geometry"] = {{"wavelength_m", s.wavelength},
                   {"aperture_m", s.aperture},
                   {"min_spacing_m", s.min_spacing},
                   {"altitude_m", s.altitude},
                   {"area_m", s.area},
                   {"ulap_xy_m", Vec2{s.ulap_position[0], s.ulap_position[1]}},
                   {"gn_placement", s.placement == GnPlacement::kUniform ? "uniform" : "explicit"},
                   {"gn_positions_m", s.gn_positions},
                   {"array_axis", s.array_axis}};
  j["power"] = {{"max_power_w", s.max_power}, {"noise_power_w", s.noise_power}, {"ref_gain_linear", s.ref_gain}};
  j["channel"] = {{"rician_factor_linear", s.rician_factor},
                  {"fading", s.fading == FadingMode::kPerSlot ? "per_slot" : "block"}};
  j["sensing"] = {{"beampattern_threshold_w", s.beampattern_threshold}};
  const PsoParams& p = cfg.pso;
  j["pso"] = {{"swarm_size", p.swarm_size}, {"max_iter", p.max_iter},     {"inertia", p.inertia},
              {"inertia_decay", p.inertia_decay}, {"cognitive", p.cognitive}, {"social", p.social},
              {"step", p.step},             {"velocity_clamp", p.velocity_clamp}, {"repair_retries", p.repair_retries}};
  j["solver"] = {{"sca_max_iter", cfg.sca.max_iter},       {"sca_tol", cfg.sca.tol},
                 {"sensing_enabled", cfg.sca.sensing_enabled}, {"gap_tol", cfg.sca.solver.gap_tol},
                 {"max_iterations", cfg.sca.solver.max_iterations}, {"ao_max_iter", cfg.ao.max_iter},
                 {"ao_tol", cfg.ao.tol}};
  return j;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline Scenario load_scenario(const std::string& path) { return load_config(path).scenario; }

inline std::string serialize(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace maisac
