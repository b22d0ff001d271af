#pragma once

// File formats: debris fields as JSON arrays, scenario overrides as key-value
// text, mission states as JSON documents. Doubles survive round-trips exactly
// (shortest-round-trip serialization on both sides).

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adr/env.hpp"

namespace adr::env {

using nlohmann::json;

inline json debris_to_json(const Debris& d) {
  return json{{"id", d.id},
              {"sma_km", d.elements.sma_km},
              {"ecc", d.elements.ecc},
              {"inc_deg", d.elements.inc_deg},
              {"raan_deg", d.elements.raan_deg},
              {"argp_deg", d.elements.argp_deg},
              {"anomaly_deg", d.elements.anomaly_deg}};
}

inline Debris debris_from_json(const json& j) {
  Debris d;
  d.id = j.at("id").get<int>();
  d.elements.sma_km = j.at("sma_km").get<double>();
  d.elements.ecc = j.at("ecc").get<double>();
  d.elements.inc_deg = j.at("inc_deg").get<double>();
  d.elements.raan_deg = j.at("raan_deg").get<double>();
  d.elements.argp_deg = j.at("argp_deg").get<double>();
  d.elements.anomaly_deg = j.at("anomaly_deg").get<double>();
  d.elements.epoch_s = 0.0;
  astro::validate_elements(d.elements);
  return d;
}

inline void save_debris_json(const std::string& path, const std::vector<Debris>& field) {
  json arr = json::array();
  for (const Debris& d : field) arr.push_back(debris_to_json(d));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << arr.dump(2) << "\n";
}

inline std::vector<Debris> load_debris_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json arr = json::parse(in);
  if (!arr.is_array()) throw std::runtime_error(path + ": expected a JSON array");
  std::vector<Debris> field;
  field.reserve(arr.size());
  for (const json& j : arr) field.push_back(debris_from_json(j));
  return field;
}

// Scenario override file: `key = value` lines, '#' comments. Recognized keys:
// dv_max_kms, mission_days, n_debris, refuel_service_time_s, seed.
struct ScenarioFileConfig {
  std::optional<double> dv_max_kms;
  std::optional<double> mission_days;
  std::optional<int> n_debris;
  std::optional<double> refuel_service_time_s;
  std::optional<std::uint64_t> seed;

  void apply(MissionConfig& cfg) const {
    if (dv_max_kms) cfg.dv_max_kms = *dv_max_kms;
    if (mission_days) cfg.mission_duration_s = *mission_days * kSecondsPerDay;
    if (n_debris) cfg.n_debris = *n_debris;
    if (refuel_service_time_s) cfg.refuel_service_time_s = *refuel_service_time_s;
  }
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline ScenarioFileConfig parse_scenario_config(std::istream& in, const std::string& origin) {
  ScenarioFileConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key != "dv_max_kms" && key != "mission_days" && key != "n_debris" &&
        key != "refuel_service_time_s" && key != "seed")
      throw std::invalid_argument(origin + ": unknown config key: " + key);
    try {
      if (key == "dv_max_kms") cfg.dv_max_kms = std::stod(value);
      else if (key == "mission_days") cfg.mission_days = std::stod(value);
      else if (key == "n_debris") cfg.n_debris = std::stoi(value);
      else if (key == "refuel_service_time_s") cfg.refuel_service_time_s = std::stod(value);
      else cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw std::invalid_argument(origin + ": bad value for " + key + ": " + value);
    }
  }
  return cfg;
}

inline ScenarioFileConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return parse_scenario_config(in, path);
}

inline json elements_to_json(const astro::OrbitalElements& el) {
  return json{{"sma_km", el.sma_km},     {"ecc", el.ecc},
              {"inc_deg", el.inc_deg},   {"raan_deg", el.raan_deg},
              {"argp_deg", el.argp_deg}, {"anomaly_deg", el.anomaly_deg},
              {"epoch_s", el.epoch_s}};
}

inline astro::OrbitalElements elements_from_json(const json& j) {
  astro::OrbitalElements el;
  el.sma_km = j.at("sma_km").get<double>();
  el.ecc = j.at("ecc").get<double>();
  el.inc_deg = j.at("inc_deg").get<double>();
  el.raan_deg = j.at("raan_deg").get<double>();
  el.argp_deg = j.at("argp_deg").get<double>();
  el.anomaly_deg = j.at("anomaly_deg").get<double>();
  el.epoch_s = j.at("epoch_s").get<double>();
  return el;
}

inline json state_to_json(const MissionState& s) {
  json debris = json::array();
  for (const Debris& d : s.debris) {
    json jd = debris_to_json(d);
    jd["epoch_s"] = d.elements.epoch_s;
    jd["visited"] = d.visited;
    debris.push_back(jd);
  }
  return json{{"config",
               {{"dv_max_kms", s.config.dv_max_kms},
                {"mission_duration_s", s.config.mission_duration_s},
                {"n_debris", s.config.n_debris},
                {"station_orbit", elements_to_json(s.config.station_orbit)},
                {"chaser_start", elements_to_json(s.config.chaser_start)},
                {"refuel_service_time_s", s.config.refuel_service_time_s},
                {"reward_rendezvous", s.config.reward_rendezvous},
                {"penalty_refuel", s.config.penalty_refuel},
                {"coelliptic_offset_km", s.config.transfer_model.coelliptic_offset_km},
                {"phase_close_fraction", s.config.transfer_model.phase_close_fraction},
                {"closing_burn_dv_kms", s.config.transfer_model.closing_burn_dv_kms},
                {"closing_burn_periods", s.config.transfer_model.closing_burn_periods}}},
              {"chaser", elements_to_json(s.chaser)},
              {"remaining_dv_kms", s.remaining_dv_kms},
              {"elapsed_s", s.elapsed_s},
              {"visited_count", s.visited_count},
              {"refuel_count", s.refuel_count},
              {"at_station", s.at_station},
              {"debris", debris}};
}

inline MissionState state_from_json(const json& j) {
  MissionState s;
  const json& jc = j.at("config");
  s.config.dv_max_kms = jc.at("dv_max_kms").get<double>();
  s.config.mission_duration_s = jc.at("mission_duration_s").get<double>();
  s.config.n_debris = jc.at("n_debris").get<int>();
  s.config.station_orbit = elements_from_json(jc.at("station_orbit"));
  s.config.chaser_start = elements_from_json(jc.at("chaser_start"));
  s.config.refuel_service_time_s = jc.at("refuel_service_time_s").get<double>();
  s.config.reward_rendezvous = jc.at("reward_rendezvous").get<double>();
  s.config.penalty_refuel = jc.at("penalty_refuel").get<double>();
  s.config.transfer_model.coelliptic_offset_km = jc.at("coelliptic_offset_km").get<double>();
  s.config.transfer_model.phase_close_fraction = jc.at("phase_close_fraction").get<double>();
  s.config.transfer_model.closing_burn_dv_kms = jc.at("closing_burn_dv_kms").get<double>();
  s.config.transfer_model.closing_burn_periods = jc.at("closing_burn_periods").get<double>();
  s.chaser = elements_from_json(j.at("chaser"));
  s.remaining_dv_kms = j.at("remaining_dv_kms").get<double>();
  s.elapsed_s = j.at("elapsed_s").get<double>();
  s.visited_count = j.at("visited_count").get<int>();
  s.refuel_count = j.at("refuel_count").get<int>();
  s.at_station = j.at("at_station").get<bool>();
  for (const json& jd : j.at("debris")) {
    Debris d = debris_from_json(jd);
    d.elements.epoch_s = jd.at("epoch_s").get<double>();
    d.visited = jd.at("visited").get<bool>();
    s.debris.push_back(d);
  }
  if (static_cast<int>(s.debris.size()) != s.config.n_debris)
    throw std::runtime_error("mission state: debris count does not match config");
  return s;
}

inline void save_state_json(const std::string& path, const MissionState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << state_to_json(s).dump(2) << "\n";
}

inline MissionState load_state_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return state_from_json(json::parse(in));
}

}  // namespace adr::env
