#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "oef/scenario.hpp"
#include "oef/units.hpp"

// Scenario document ingestion and export. The on-disk format is a JSON
// document; time series are either inline arrays or {"csv": <relative
// path>, "column": <header>} references to sibling CSV files (UTF-8,
// comma-separated, one header row). A "units" block declares MW/bar/C or
// W/Pa/K_relative; everything is converted to SI on load. Exports are
// always written in SI with inline series, atomically (temp file + rename).

namespace oef {

using Json = nlohmann::ordered_json;

namespace ioutil {

struct UnitContext {
  double power_factor = 1.0;       // multiply file value -> W
  double pressure_factor = 1.0;    // -> Pa
  bool temp_is_celsius = false;    // subtract ambient on load
  double ambient_c = 10.0;
};

inline std::runtime_error schema_error(const std::string& path, const std::string& what) {
  return std::runtime_error("scenario schema: " + path + ": " + what);
}

inline const Json& member(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw schema_error(path, "missing field '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) throw schema_error(path + "." + key, "expected a number");
  return v.get<double>();
}

inline double number_or(const Json& j, const std::string& key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<double>();
}

inline int integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) throw schema_error(path + "." + key, "expected an integer");
  return v.get<int>();
}

inline std::string text(const Json& j, const std::string& key, const std::string& path,
                        const std::string& fallback = "") {
  auto it = j.find(key);
  if (it == j.end()) {
    if (!fallback.empty()) return fallback;
    throw schema_error(path, "missing field '" + key + "'");
  }
  return it->get<std::string>();
}

inline std::vector<double> read_csv_column(const std::filesystem::path& file,
                                           const std::string& column) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open csv file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv file " + file.string());
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  auto header = split(line);
  int col = -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == column) col = static_cast<int>(i);
  if (col < 0)
    throw std::runtime_error("csv " + file.string() + " has no column '" + column + "'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (col >= static_cast<int>(cells.size()))
      throw std::runtime_error("csv " + file.string() + ": short row");
    values.push_back(std::stod(cells[col]));
  }
  return values;
}

// series value: inline array or csv reference
inline std::vector<double> series(const Json& j, const std::filesystem::path& base_dir,
                                  const std::string& path) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object() && j.contains("csv"))
    return read_csv_column(base_dir / j.at("csv").get<std::string>(),
                           j.at("column").get<std::string>());
  throw schema_error(path, "expected an array or a {csv, column} reference");
}

inline std::vector<double> scaled(std::vector<double> v, double factor) {
  for (auto& x : v) x *= factor;
  return v;
}

}  // namespace ioutil

inline Scenario load_scenario(const std::filesystem::path& file) {
  using namespace ioutil;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open scenario file " + file.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario parse error in " + file.string() + ": " + e.what());
  }
  const auto base_dir = file.parent_path();

  Scenario sc;
  sc.name = text(doc, "name", "$", file.stem().string());

  UnitContext units;
  if (doc.contains("units")) {
    const Json& u = doc["units"];
    const std::string power = u.value("power", "W");
    const std::string pressure = u.value("pressure", "Pa");
    const std::string temp = u.value("temperature", "K_relative");
    if (power == "MW")
      units.power_factor = units::kMegawatt;
    else if (power != "W")
      throw schema_error("units.power", "expected 'MW' or 'W'");
    if (pressure == "bar")
      units.pressure_factor = units::kBar;
    else if (pressure != "Pa")
      throw schema_error("units.pressure", "expected 'bar' or 'Pa'");
    if (temp == "C")
      units.temp_is_celsius = true;
    else if (temp != "K_relative")
      throw schema_error("units.temperature", "expected 'C' or 'K_relative'");
  }
  const double pw = units.power_factor;
  // cost coefficients arrive per (file power unit); convert to SI
  const double cost1 = 1.0 / pw, cost2 = 1.0 / (pw * pw);

  {
    const Json& h = member(doc, "horizon", "$");
    sc.horizon.history_steps = integer(h, "history_steps", "horizon");
    sc.horizon.dispatch_steps = integer(h, "dispatch_steps", "horizon");
    sc.horizon.step_seconds = number(h, "step_seconds", "horizon");
  }

  // ---- epn ----
  {
    const Json& e = member(doc, "epn", "$");
    sc.epn.n_buses = integer(e, "buses", "epn");
    sc.epn.slack_bus = e.value("slack_bus", 0);
    for (const auto& l : member(e, "lines", "epn")) {
      PowerLine line;
      line.from = integer(l, "from", "epn.lines");
      line.to = integer(l, "to", "epn.lines");
      line.reactance = number(l, "reactance", "epn.lines");
      line.flow_limit = l.contains("limit") ? number(l, "limit", "epn.lines") * pw
                                            : PowerLine::kInfFlow;
      sc.epn.lines.push_back(line);
    }
    const Json& dev = e.value("devices", Json::object());
    for (const auto& d : dev.value("thermal_units", Json::array())) {
      ThermalUnit t;
      t.id = text(d, "id", "thermal_units");
      t.bus = integer(d, "bus", t.id);
      t.p_min = number(d, "lb", t.id) * pw;
      t.p_max = number(d, "ub", t.id) * pw;
      t.ramp_up = number(d, "ramp_up", t.id) * pw;
      t.ramp_down = number(d, "ramp_down", t.id) * pw;
      const auto& c = member(d, "cost", t.id);
      t.cost_quad = c.at(0).get<double>() * cost2;
      t.cost_lin = c.at(1).get<double>() * cost1;
      t.cost_fixed = c.at(2).get<double>();
      sc.fleet.thermal_units.push_back(t);
    }
    for (const auto& d : dev.value("gas_fired_units", Json::array())) {
      GasFiredUnit g;
      g.id = text(d, "id", "gas_fired_units");
      g.bus = integer(d, "bus", g.id);
      g.gas_node = integer(d, "gas_node", g.id);
      g.power_per_gas = number(d, "power_per_gas", g.id) * pw;
      g.p_min = number(d, "lb", g.id) * pw;
      g.p_max = number(d, "ub", g.id) * pw;
      g.ramp_up = number(d, "ramp_up", g.id) * pw;
      g.ramp_down = number(d, "ramp_down", g.id) * pw;
      sc.fleet.gas_fired_units.push_back(g);
    }
    for (const auto& d : dev.value("chp_units", Json::array())) {
      ChpUnit c;
      c.id = text(d, "id", "chp_units");
      c.bus = integer(d, "bus", c.id);
      c.heat_node = integer(d, "heat_node", c.id);
      c.power_per_heat = number(d, "power_per_heat", c.id);
      c.p_min = number(d, "lb", c.id) * pw;
      c.p_max = number(d, "ub", c.id) * pw;
      c.ramp_up = number(d, "ramp_up", c.id) * pw;
      c.ramp_down = number(d, "ramp_down", c.id) * pw;
      const auto& cp = member(d, "cost_power", c.id);
      c.cost_quad_power = cp.at(0).get<double>() * cost2;
      c.cost_lin_power = cp.at(1).get<double>() * cost1;
      c.cost_fixed_power = cp.at(2).get<double>();
      const auto& ch = member(d, "cost_heat", c.id);
      c.cost_quad_heat = ch.at(0).get<double>() * cost2;
      c.cost_lin_heat = ch.at(1).get<double>() * cost1;
      c.cost_fixed_heat = ch.at(2).get<double>();
      sc.fleet.chp_units.push_back(c);
    }
    for (const auto& d : dev.value("wind_farms", Json::array())) {
      WindFarm w;
      w.id = text(d, "id", "wind_farms");
      w.bus = integer(d, "bus", w.id);
      sc.fleet.wind_farms.push_back(w);
    }
  }

  // ---- ngn ----
  if (doc.contains("ngn")) {
    const Json& g = doc["ngn"];
    for (const auto& n : g.value("nodes", Json::array())) {
      GasNodeData node;
      node.id = text(n, "id", "ngn.nodes");
      node.p_min = number(n, "p_lb", node.id) * units.pressure_factor;
      node.p_max = number(n, "p_ub", node.id) * units.pressure_factor;
      sc.ngn.nodes.push_back(node);
    }
    for (const auto& p : g.value("pipes", Json::array())) {
      GasPipeData pipe;
      pipe.from = integer(p, "from", "ngn.pipes");
      pipe.to = integer(p, "to", "ngn.pipes");
      pipe.geometry.length = number(p, "length", "ngn.pipes");
      pipe.geometry.diameter = number(p, "diameter", "ngn.pipes");
      pipe.geometry.cross_section = number_or(p, "cross_section", 0.0);
      pipe.geometry.friction = number(p, "friction", "ngn.pipes");
      pipe.geometry.incline_angle = number_or(p, "incline", 0.0);
      pipe.geometry.sonic_speed = number_or(p, "sonic_speed", 340.0);
      pipe.geometry.base_velocity = number(p, "base_velocity", "ngn.pipes");
      sc.ngn.pipes.push_back(pipe);
    }
    sc.ngn.reference_node = g.value("reference_node", -1);
    if (g.contains("reference_pressure")) {
      const Json& rp = g["reference_pressure"];
      if (rp.is_number())
        sc.ngn.reference_pressure = {rp.get<double>() * units.pressure_factor};
      else
        sc.ngn.reference_pressure =
            scaled(series(rp, base_dir, "ngn.reference_pressure"), units.pressure_factor);
    }
    const Json& dev = g.value("devices", Json::object());
    for (const auto& d : dev.value("gas_wells", Json::array())) {
      GasWell w;
      w.id = text(d, "id", "gas_wells");
      w.gas_node = integer(d, "gas_node", w.id);
      w.m_min = number(d, "lb", w.id);
      w.m_max = number(d, "ub", w.id);
      w.ramp_up = number(d, "ramp_up", w.id);
      w.ramp_down = number(d, "ramp_down", w.id);
      const auto& c = member(d, "cost", w.id);
      w.cost_quad = c.at(0).get<double>();
      w.cost_lin = c.at(1).get<double>();
      w.cost_fixed = c.at(2).get<double>();
      sc.fleet.gas_wells.push_back(w);
    }
  }

  // ---- dhn ----
  if (doc.contains("dhn")) {
    const Json& h = doc["dhn"];
    units.ambient_c = number_or(h, "ambient_c", 10.0);
    sc.dhn.ambient_c = units.ambient_c;
    auto convert_temp = [&](double t) {
      return units.temp_is_celsius ? units::celsius_to_relative(t, units.ambient_c) : t;
    };
    for (const auto& n : h.value("nodes", Json::array())) {
      HeatNodeData node;
      node.id = text(n, "id", "dhn.nodes");
      node.t_min = convert_temp(number(n, "t_lb", node.id));
      node.t_max = convert_temp(number(n, "t_ub", node.id));
      sc.dhn.nodes.push_back(node);
    }
    for (const auto& p : h.value("pipes", Json::array())) {
      HeatPipeData pipe;
      pipe.from = integer(p, "from", "dhn.pipes");
      pipe.to = integer(p, "to", "dhn.pipes");
      pipe.geometry.length = number(p, "length", "dhn.pipes");
      pipe.geometry.cross_section = number(p, "cross_section", "dhn.pipes");
      pipe.geometry.heat_loss = number(p, "heat_loss", "dhn.pipes");
      pipe.geometry.specific_heat = number_or(p, "specific_heat", 4182.0);
      pipe.geometry.density = number_or(p, "density", 975.0);
      pipe.geometry.mass_flow = number(p, "mass_flow", "dhn.pipes");
      sc.dhn.pipes.push_back(pipe);
    }
    const Json& dev = h.value("devices", Json::object());
    for (const auto& d : dev.value("gas_boilers", Json::array())) {
      GasBoiler b;
      b.id = text(d, "id", "gas_boilers");
      b.gas_node = integer(d, "gas_node", b.id);
      b.heat_node = integer(d, "heat_node", b.id);
      b.heat_per_gas = number(d, "heat_per_gas", b.id) * pw;
      b.h_min = number(d, "lb", b.id) * pw;
      b.h_max = number(d, "ub", b.id) * pw;
      b.ramp_up = number(d, "ramp_up", b.id) * pw;
      b.ramp_down = number(d, "ramp_down", b.id) * pw;
      sc.fleet.gas_boilers.push_back(b);
    }
    for (const auto& d : dev.value("heat_pumps", Json::array())) {
      HeatPump p;
      p.id = text(d, "id", "heat_pumps");
      p.bus = integer(d, "bus", p.id);
      p.heat_node = integer(d, "heat_node", p.id);
      p.heat_per_power = number(d, "heat_per_power", p.id);
      p.h_min = number(d, "lb", p.id) * pw;
      p.h_max = number(d, "ub", p.id) * pw;
      p.ramp_up = number(d, "ramp_up", p.id) * pw;
      p.ramp_down = number(d, "ramp_down", p.id) * pw;
      sc.fleet.heat_pumps.push_back(p);
    }
  }

  // ---- series ----
  {
    const Json& s = doc.value("series", Json::object());
    auto load_map = [&](const char* key) {
      std::map<std::string, std::vector<double>> out;
      const Json block = s.value(key, Json::object());
      for (const auto& [name, value] : block.items())
        out[name] = series(value, base_dir, std::string("series.") + key + "." + name);
      return out;
    };
    auto wind = load_map("wind_available");
    auto pload = load_map("power_load");
    auto gload = load_map("gas_load");
    auto hload = load_map("heat_load");
    auto hist = load_map("historical");

    const int n_dt = sc.horizon.dispatch_steps;
    const int n_t = sc.horizon.total_steps();
    sc.boundary.wind_available.resize(sc.fleet.wind_farms.size());
    for (size_t i = 0; i < sc.fleet.wind_farms.size(); ++i) {
      auto it = wind.find(sc.fleet.wind_farms[i].id);
      if (it == wind.end())
        throw schema_error("series.wind_available",
                           "missing series for wind farm '" + sc.fleet.wind_farms[i].id +
                               "' (expected " + std::to_string(n_dt) + " points)");
      sc.boundary.wind_available[i] = scaled(it->second, pw);
    }
    sc.boundary.power_load.assign(sc.epn.n_buses, {});
    for (auto& [key, values] : pload) {
      const int bus = std::stoi(key);
      if (bus < 0 || bus >= sc.epn.n_buses)
        throw schema_error("series.power_load", "unknown bus '" + key + "'");
      sc.boundary.power_load[bus] = scaled(values, pw);
    }
    for (auto& v : sc.boundary.power_load)
      if (v.empty()) v.assign(n_dt, 0.0);
    sc.boundary.gas_load.assign(sc.ngn.nodes.size(), {});
    for (auto& [key, values] : gload) {
      int node = -1;
      for (size_t i = 0; i < sc.ngn.nodes.size(); ++i)
        if (sc.ngn.nodes[i].id == key) node = static_cast<int>(i);
      if (node < 0) throw schema_error("series.gas_load", "unknown gas node '" + key + "'");
      sc.boundary.gas_load[node] = values;
    }
    for (auto& v : sc.boundary.gas_load)
      if (v.empty()) v.assign(n_t, 0.0);
    sc.boundary.heat_load.assign(sc.dhn.nodes.size(), {});
    for (auto& [key, values] : hload) {
      int node = -1;
      for (size_t i = 0; i < sc.dhn.nodes.size(); ++i)
        if (sc.dhn.nodes[i].id == key) node = static_cast<int>(i);
      if (node < 0)
        throw schema_error("series.heat_load", "unknown heat node '" + key + "'");
      sc.boundary.heat_load[node] = scaled(values, pw);
    }
    for (auto& v : sc.boundary.heat_load)
      if (v.empty()) v.assign(n_t, 0.0);

    auto hist_for = [&](const std::string& id, const char* what, double factor) {
      auto it = hist.find(id);
      if (it == hist.end())
        throw schema_error("series.historical",
                           std::string("missing history for ") + what + " '" + id +
                               "' (expected " +
                               std::to_string(sc.horizon.history_steps) + " points)");
      return scaled(it->second, factor);
    };
    if (sc.horizon.history_steps > 0) {
      for (const auto& d : sc.fleet.gas_wells)
        sc.boundary.gas_well_history.push_back(hist_for(d.id, "gas well", 1.0));
      for (const auto& d : sc.fleet.gas_fired_units)
        sc.boundary.gas_unit_history.push_back(hist_for(d.id, "gas unit", pw));
      for (const auto& d : sc.fleet.gas_boilers)
        sc.boundary.boiler_history.push_back(hist_for(d.id, "boiler", pw));
      for (const auto& d : sc.fleet.chp_units)
        sc.boundary.chp_history.push_back(hist_for(d.id, "chp", pw));
      for (const auto& d : sc.fleet.heat_pumps)
        sc.boundary.heat_pump_history.push_back(hist_for(d.id, "heat pump", pw));
    } else {
      sc.boundary.gas_well_history.resize(sc.fleet.gas_wells.size());
      sc.boundary.gas_unit_history.resize(sc.fleet.gas_fired_units.size());
      sc.boundary.boiler_history.resize(sc.fleet.gas_boilers.size());
      sc.boundary.chp_history.resize(sc.fleet.chp_units.size());
      sc.boundary.heat_pump_history.resize(sc.fleet.heat_pumps.size());
    }
  }

  // ---- solver ----
  if (doc.contains("solver")) {
    const Json& s = doc["solver"];
    sc.solver.epsilon = s.value("epsilon", 0.0);
    sc.solver.violation_keep = s.value("violation_keep", 1);
    sc.solver.max_cga_iterations = s.value("max_cga_iterations", 50);
    sc.solver.gas_dx = s.value("gas_dx", 200.0);
    sc.solver.heat_dx = s.value("heat_dx", 100.0);
    sc.solver.feas_tol = s.value("feas_tol", 1e-8);
    sc.solver.gap_tol = s.value("gap_tol", 1e-8);
    sc.solver.security_tol = s.value("security_tol", 1e-6);
    sc.solver.max_ipm_iterations = s.value("max_ipm_iterations", 120);
    sc.solver.threads = s.value("threads", 1);
  }

  sc.validate();
  return sc;
}

inline Json scenario_to_json(const Scenario& sc) {
  Json doc;
  doc["name"] = sc.name;
  doc["units"] = {{"power", "W"}, {"pressure", "Pa"}, {"temperature", "K_relative"}};
  doc["horizon"] = {{"history_steps", sc.horizon.history_steps},
                    {"dispatch_steps", sc.horizon.dispatch_steps},
                    {"step_seconds", sc.horizon.step_seconds}};

  Json epn;
  epn["buses"] = sc.epn.n_buses;
  epn["slack_bus"] = sc.epn.slack_bus;
  epn["lines"] = Json::array();
  for (const auto& l : sc.epn.lines) {
    Json jl = {{"from", l.from}, {"to", l.to}, {"reactance", l.reactance}};
    if (l.flow_limit < PowerLine::kInfFlow) jl["limit"] = l.flow_limit;
    epn["lines"].push_back(jl);
  }
  Json edev;
  for (const auto& d : sc.fleet.thermal_units)
    edev["thermal_units"].push_back({{"id", d.id},
                                     {"bus", d.bus},
                                     {"lb", d.p_min},
                                     {"ub", d.p_max},
                                     {"ramp_up", d.ramp_up},
                                     {"ramp_down", d.ramp_down},
                                     {"cost", {d.cost_quad, d.cost_lin, d.cost_fixed}}});
  for (const auto& d : sc.fleet.gas_fired_units)
    edev["gas_fired_units"].push_back({{"id", d.id},
                                       {"bus", d.bus},
                                       {"gas_node", d.gas_node},
                                       {"power_per_gas", d.power_per_gas},
                                       {"lb", d.p_min},
                                       {"ub", d.p_max},
                                       {"ramp_up", d.ramp_up},
                                       {"ramp_down", d.ramp_down}});
  for (const auto& d : sc.fleet.chp_units)
    edev["chp_units"].push_back(
        {{"id", d.id},
         {"bus", d.bus},
         {"heat_node", d.heat_node},
         {"power_per_heat", d.power_per_heat},
         {"lb", d.p_min},
         {"ub", d.p_max},
         {"ramp_up", d.ramp_up},
         {"ramp_down", d.ramp_down},
         {"cost_power", {d.cost_quad_power, d.cost_lin_power, d.cost_fixed_power}},
         {"cost_heat", {d.cost_quad_heat, d.cost_lin_heat, d.cost_fixed_heat}}});
  for (const auto& d : sc.fleet.wind_farms)
    edev["wind_farms"].push_back({{"id", d.id}, {"bus", d.bus}});
  epn["devices"] = edev;
  doc["epn"] = epn;

  Json ngn;
  ngn["nodes"] = Json::array();
  for (const auto& n : sc.ngn.nodes)
    ngn["nodes"].push_back({{"id", n.id}, {"p_lb", n.p_min}, {"p_ub", n.p_max}});
  ngn["pipes"] = Json::array();
  for (const auto& p : sc.ngn.pipes)
    ngn["pipes"].push_back({{"from", p.from},
                            {"to", p.to},
                            {"length", p.geometry.length},
                            {"diameter", p.geometry.diameter},
                            {"cross_section", p.geometry.cross_section},
                            {"friction", p.geometry.friction},
                            {"incline", p.geometry.incline_angle},
                            {"sonic_speed", p.geometry.sonic_speed},
                            {"base_velocity", p.geometry.base_velocity}});
  if (sc.ngn.reference_node >= 0) ngn["reference_node"] = sc.ngn.reference_node;
  if (!sc.ngn.reference_pressure.empty())
    ngn["reference_pressure"] = sc.ngn.reference_pressure;
  Json gdev;
  for (const auto& d : sc.fleet.gas_wells)
    gdev["gas_wells"].push_back({{"id", d.id},
                                 {"gas_node", d.gas_node},
                                 {"lb", d.m_min},
                                 {"ub", d.m_max},
                                 {"ramp_up", d.ramp_up},
                                 {"ramp_down", d.ramp_down},
                                 {"cost", {d.cost_quad, d.cost_lin, d.cost_fixed}}});
  ngn["devices"] = gdev;
  doc["ngn"] = ngn;

  Json dhn;
  dhn["ambient_c"] = sc.dhn.ambient_c;
  dhn["nodes"] = Json::array();
  for (const auto& n : sc.dhn.nodes)
    dhn["nodes"].push_back({{"id", n.id}, {"t_lb", n.t_min}, {"t_ub", n.t_max}});
  dhn["pipes"] = Json::array();
  for (const auto& p : sc.dhn.pipes)
    dhn["pipes"].push_back({{"from", p.from},
                            {"to", p.to},
                            {"length", p.geometry.length},
                            {"cross_section", p.geometry.cross_section},
                            {"heat_loss", p.geometry.heat_loss},
                            {"specific_heat", p.geometry.specific_heat},
                            {"density", p.geometry.density},
                            {"mass_flow", p.geometry.mass_flow}});
  Json hdev;
  for (const auto& d : sc.fleet.gas_boilers)
    hdev["gas_boilers"].push_back({{"id", d.id},
                                   {"gas_node", d.gas_node},
                                   {"heat_node", d.heat_node},
                                   {"heat_per_gas", d.heat_per_gas},
                                   {"lb", d.h_min},
                                   {"ub", d.h_max},
                                   {"ramp_up", d.ramp_up},
                                   {"ramp_down", d.ramp_down}});
  for (const auto& d : sc.fleet.heat_pumps)
    hdev["heat_pumps"].push_back({{"id", d.id},
                                  {"bus", d.bus},
                                  {"heat_node", d.heat_node},
                                  {"heat_per_power", d.heat_per_power},
                                  {"lb", d.h_min},
                                  {"ub", d.h_max},
                                  {"ramp_up", d.ramp_up},
                                  {"ramp_down", d.ramp_down}});
  dhn["devices"] = hdev;
  doc["dhn"] = dhn;

  Json series;
  for (size_t i = 0; i < sc.fleet.wind_farms.size(); ++i)
    series["wind_available"][sc.fleet.wind_farms[i].id] = sc.boundary.wind_available[i];
  for (int b = 0; b < sc.epn.n_buses; ++b) {
    bool nonzero = false;
    for (double v : sc.boundary.power_load[b]) nonzero |= (v != 0.0);
    if (nonzero) series["power_load"][std::to_string(b)] = sc.boundary.power_load[b];
  }
  for (size_t i = 0; i < sc.ngn.nodes.size(); ++i) {
    bool nonzero = false;
    for (double v : sc.boundary.gas_load[i]) nonzero |= (v != 0.0);
    if (nonzero) series["gas_load"][sc.ngn.nodes[i].id] = sc.boundary.gas_load[i];
  }
  for (size_t i = 0; i < sc.dhn.nodes.size(); ++i) {
    bool nonzero = false;
    for (double v : sc.boundary.heat_load[i]) nonzero |= (v != 0.0);
    if (nonzero) series["heat_load"][sc.dhn.nodes[i].id] = sc.boundary.heat_load[i];
  }
  if (sc.horizon.history_steps > 0) {
    for (size_t i = 0; i < sc.fleet.gas_wells.size(); ++i)
      series["historical"][sc.fleet.gas_wells[i].id] = sc.boundary.gas_well_history[i];
    for (size_t i = 0; i < sc.fleet.gas_fired_units.size(); ++i)
      series["historical"][sc.fleet.gas_fired_units[i].id] =
          sc.boundary.gas_unit_history[i];
    for (size_t i = 0; i < sc.fleet.gas_boilers.size(); ++i)
      series["historical"][sc.fleet.gas_boilers[i].id] = sc.boundary.boiler_history[i];
    for (size_t i = 0; i < sc.fleet.chp_units.size(); ++i)
      series["historical"][sc.fleet.chp_units[i].id] = sc.boundary.chp_history[i];
    for (size_t i = 0; i < sc.fleet.heat_pumps.size(); ++i)
      series["historical"][sc.fleet.heat_pumps[i].id] = sc.boundary.heat_pump_history[i];
  }
  doc["series"] = series;

  doc["solver"] = {{"epsilon", sc.solver.epsilon},
                   {"violation_keep", sc.solver.violation_keep},
                   {"max_cga_iterations", sc.solver.max_cga_iterations},
                   {"gas_dx", sc.solver.gas_dx},
                   {"heat_dx", sc.solver.heat_dx},
                   {"feas_tol", sc.solver.feas_tol},
                   {"gap_tol", sc.solver.gap_tol},
                   {"security_tol", sc.solver.security_tol},
                   {"max_ipm_iterations", sc.solver.max_ipm_iterations},
                   {"threads", sc.solver.threads}};
  return doc;
}

inline void write_text_atomic(const std::filesystem::path& file, const std::string& text) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, file);
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& file) {
  write_text_atomic(file, scenario_to_json(sc).dump(1) + "\n");
}

}  // namespace oef
