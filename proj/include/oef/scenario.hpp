#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "oef/circuit.hpp"
#include "oef/spectral.hpp"
#include "oef/topology.hpp"

// Scenario: the full description of one integrated energy system in SI
// units (W, Pa, kg/s, K relative to ambient, seconds). Scenario files may
// use MW/bar/degrees Celsius; the JSON loader converts at ingestion.

namespace oef {

struct ThermalUnit {
  std::string id;
  int bus = -1;
  double p_min = 0.0, p_max = 0.0;       // W
  double ramp_up = 0.0, ramp_down = 0.0; // W per step
  double cost_quad = 0.0, cost_lin = 0.0, cost_fixed = 0.0;  // $/W^2/step, $/W/step, $/step
};

struct GasFiredUnit {
  std::string id;
  int bus = -1;
  int gas_node = -1;
  double power_per_gas = 0.0;  // r: W per (kg/s)
  double p_min = 0.0, p_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
};

struct ChpUnit {
  std::string id;
  int bus = -1;
  int heat_node = -1;
  double power_per_heat = 0.0;  // r: W yielded per W of heat
  double p_min = 0.0, p_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
  double cost_quad_power = 0.0, cost_lin_power = 0.0, cost_fixed_power = 0.0;
  double cost_quad_heat = 0.0, cost_lin_heat = 0.0, cost_fixed_heat = 0.0;
};

struct WindFarm {
  std::string id;
  int bus = -1;
};

struct GasWell {
  std::string id;
  int gas_node = -1;
  double m_min = 0.0, m_max = 0.0;        // kg/s
  double ramp_up = 0.0, ramp_down = 0.0;  // kg/s per step
  double cost_quad = 0.0, cost_lin = 0.0, cost_fixed = 0.0;
};

struct GasBoiler {
  std::string id;
  int gas_node = -1;
  int heat_node = -1;
  double heat_per_gas = 0.0;  // r: W of heat per (kg/s)
  double h_min = 0.0, h_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
};

struct HeatPump {
  std::string id;
  int bus = -1;
  int heat_node = -1;
  double heat_per_power = 0.0;  // r: W of heat per W of power
  double h_min = 0.0, h_max = 0.0;
  double ramp_up = 0.0, ramp_down = 0.0;
};

struct DeviceFleet {
  std::vector<ThermalUnit> thermal_units;
  std::vector<GasFiredUnit> gas_fired_units;
  std::vector<ChpUnit> chp_units;
  std::vector<WindFarm> wind_farms;
  std::vector<GasWell> gas_wells;
  std::vector<GasBoiler> gas_boilers;
  std::vector<HeatPump> heat_pumps;
};

struct PowerLine {
  int from = -1, to = -1;
  double reactance = 0.0;   // p.u.
  double flow_limit = kInfFlow;  // W; infinity drops the security row
  static constexpr double kInfFlow = 1e30;
};

struct EpnData {
  int n_buses = 0;
  int slack_bus = 0;
  std::vector<PowerLine> lines;
};

struct GasNodeData {
  std::string id;
  double p_min = 0.0, p_max = 0.0;  // Pa, absolute
};

struct GasPipeData {
  int from = -1, to = -1;
  GasPipeGeometry geometry;
};

struct NgnData {
  std::vector<GasNodeData> nodes;
  std::vector<GasPipeData> pipes;
  int reference_node = -1;                 // -1: resolve by source capacity
  std::vector<double> reference_pressure;  // Pa; length 1 or dispatch_steps
};

struct HeatNodeData {
  std::string id;
  double t_min = 0.0, t_max = 0.0;  // K relative to ambient
};

struct HeatPipeData {
  int from = -1, to = -1;
  HeatPipeGeometry geometry;  // carries the preset water mass flow
};

struct DhnData {
  std::vector<HeatNodeData> nodes;
  std::vector<HeatPipeData> pipes;
  double ambient_c = 10.0;  // only used at the I/O boundary
};

struct BoundaryData {
  std::vector<std::vector<double>> wind_available;  // [wind farm][dispatch step], W
  std::vector<std::vector<double>> power_load;      // [bus][dispatch step], W
  std::vector<std::vector<double>> gas_load;        // [gas node][total step], kg/s
  std::vector<std::vector<double>> heat_load;       // [heat node][total step], W
  // historical outputs over the history window
  std::vector<std::vector<double>> gas_well_history;   // [well], kg/s
  std::vector<std::vector<double>> gas_unit_history;   // [ngu], W of power
  std::vector<std::vector<double>> boiler_history;     // [boiler], W of heat
  std::vector<std::vector<double>> chp_history;        // [chp], W of heat
  std::vector<std::vector<double>> heat_pump_history;  // [hp], W of heat
};

struct SolverSettings {
  double epsilon = 0.0;  // smoothing penalty; 0 resolves to the auto rule
  int violation_keep = 1;        // N_r
  int max_cga_iterations = 50;
  double gas_dx = 200.0;   // m
  double heat_dx = 100.0;  // m
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  double security_tol = 1e-6;
  int max_ipm_iterations = 120;
  int threads = 1;
};

struct Scenario {
  std::string name;
  HorizonConfig horizon;
  EpnData epn;
  NgnData ngn;
  DhnData dhn;
  DeviceFleet fleet;
  BoundaryData boundary;
  SolverSettings solver;

  int gas_node_count() const { return static_cast<int>(ngn.nodes.size()); }
  int heat_node_count() const { return static_cast<int>(dhn.nodes.size()); }

  // default reference: the gas node with the largest connected source
  // capacity (ties to the lowest index)
  int resolve_reference_node() const {
    if (ngn.reference_node >= 0) return ngn.reference_node;
    if (ngn.nodes.empty()) return -1;
    std::vector<double> capacity(ngn.nodes.size(), 0.0);
    for (const auto& gw : fleet.gas_wells) capacity[gw.gas_node] += gw.m_max;
    int best = 0;
    for (size_t i = 1; i < capacity.size(); ++i)
      if (capacity[i] > capacity[best]) best = static_cast<int>(i);
    return best;
  }

  double reference_pressure_at(int dispatch_step) const {
    if (ngn.reference_pressure.empty()) return 0.0;
    if (ngn.reference_pressure.size() == 1) return ngn.reference_pressure[0];
    return ngn.reference_pressure[dispatch_step];
  }

  void validate() const;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("scenario: " + what);
}

inline void check_series(const std::vector<std::vector<double>>& series, size_t outer,
                         size_t len, const std::string& what) {
  require(series.size() == outer, what + ": expected " + std::to_string(outer) +
                                      " series, got " + std::to_string(series.size()));
  for (size_t i = 0; i < series.size(); ++i)
    require(series[i].size() == len, what + "[" + std::to_string(i) + "]: expected " +
                                         std::to_string(len) + " points, got " +
                                         std::to_string(series[i].size()));
}

inline void check_device_common(const std::string& id, double lo, double hi, double ru,
                                double rd) {
  require(lo <= hi, id + ": lower bound exceeds upper bound");
  require(ru >= 0.0 && rd >= 0.0, id + ": negative ramp limit");
}

}  // namespace detail

inline void Scenario::validate() const {
  using detail::require;
  horizon.validate();
  const size_t n_dt = static_cast<size_t>(horizon.dispatch_steps);
  const size_t n_t = static_cast<size_t>(horizon.total_steps());
  const size_t n_ht = static_cast<size_t>(horizon.history_steps);

  // --- EPN ---
  require(epn.n_buses >= 1, "epn: needs at least one bus");
  require(epn.slack_bus >= 0 && epn.slack_bus < epn.n_buses, "epn: slack bus out of range");
  {
    std::vector<Branch> branches;
    for (const auto& l : epn.lines) {
      require(l.from >= 0 && l.from < epn.n_buses && l.to >= 0 && l.to < epn.n_buses,
              "epn: line references an unknown bus");
      require(l.reactance > 0.0, "epn: non-positive line reactance");
      branches.push_back({l.from, l.to});
    }
    check_branches(epn.n_buses, branches);
    require(is_connected(epn.n_buses, branches), "epn: network is disconnected");
  }

  // --- NGN ---
  if (!ngn.nodes.empty()) {
    std::vector<Branch> branches;
    for (const auto& p : ngn.pipes) {
      require(p.from >= 0 && p.from < gas_node_count() && p.to >= 0 &&
                  p.to < gas_node_count(),
              "ngn: pipe references an unknown node");
      p.geometry.validate();
      branches.push_back({p.from, p.to});
    }
    require(is_connected(gas_node_count(), branches), "ngn: network is disconnected");
    for (const auto& n : ngn.nodes)
      require(n.p_min <= n.p_max, "ngn node " + n.id + ": p_min > p_max");
    if (ngn.reference_node >= 0)
      require(ngn.reference_node < gas_node_count(), "ngn: reference node out of range");
    require(ngn.reference_pressure.size() <= 1 ||
                ngn.reference_pressure.size() == n_dt,
            "ngn: reference pressure series must have 1 or dispatch_steps points");
  } else {
    require(ngn.pipes.empty(), "ngn: pipes without nodes");
  }

  // --- DHN ---
  if (!dhn.nodes.empty()) {
    std::vector<Branch> branches;
    std::vector<double> flows;
    for (const auto& p : dhn.pipes) {
      require(p.from >= 0 && p.from < heat_node_count() && p.to >= 0 &&
                  p.to < heat_node_count(),
              "dhn: pipe references an unknown node");
      p.geometry.validate();
      branches.push_back({p.from, p.to});
      flows.push_back(p.geometry.mass_flow);
    }
    for (const auto& n : dhn.nodes)
      require(n.t_min <= n.t_max, "dhn node " + n.id + ": t_min > t_max");
    // every node must head at least one branch: the branch-admittance model
    // leaves zero-outflow node temperatures pinned at ambient, which would
    // make their security bounds meaningless
    if (!dhn.pipes.empty()) {
      std::vector<double> outflow(dhn.nodes.size(), 0.0);
      for (const auto& p : dhn.pipes) outflow[p.from] += p.geometry.mass_flow;
      for (size_t i = 0; i < outflow.size(); ++i)
        require(outflow[i] > 0.0, "dhn node " + dhn.nodes[i].id +
                                      ": no outflow branch (water must circulate)");
    }
  } else {
    require(dhn.pipes.empty(), "dhn: pipes without nodes");
  }

  // --- devices ---
  for (const auto& d : fleet.thermal_units) {
    require(d.bus >= 0 && d.bus < epn.n_buses, d.id + ": dangling bus");
    detail::check_device_common(d.id, d.p_min, d.p_max, d.ramp_up, d.ramp_down);
    require(d.cost_quad >= 0.0, d.id + ": negative quadratic cost");
  }
  for (const auto& d : fleet.gas_fired_units) {
    require(d.bus >= 0 && d.bus < epn.n_buses, d.id + ": dangling bus");
    require(d.gas_node >= 0 && d.gas_node < gas_node_count(), d.id + ": dangling gas node");
    require(d.power_per_gas > 0.0, d.id + ": coupling ratio must be positive");
    detail::check_device_common(d.id, d.p_min, d.p_max, d.ramp_up, d.ramp_down);
  }
  for (const auto& d : fleet.chp_units) {
    require(d.bus >= 0 && d.bus < epn.n_buses, d.id + ": dangling bus");
    require(d.heat_node >= 0 && d.heat_node < heat_node_count(),
            d.id + ": dangling heat node");
    require(d.power_per_heat > 0.0, d.id + ": coupling ratio must be positive");
    detail::check_device_common(d.id, d.p_min, d.p_max, d.ramp_up, d.ramp_down);
    require(d.cost_quad_power >= 0.0 && d.cost_quad_heat >= 0.0,
            d.id + ": negative quadratic cost");
  }
  for (const auto& d : fleet.wind_farms)
    require(d.bus >= 0 && d.bus < epn.n_buses, d.id + ": dangling bus");
  for (const auto& d : fleet.gas_wells) {
    require(d.gas_node >= 0 && d.gas_node < gas_node_count(), d.id + ": dangling gas node");
    detail::check_device_common(d.id, d.m_min, d.m_max, d.ramp_up, d.ramp_down);
    require(d.cost_quad >= 0.0, d.id + ": negative quadratic cost");
  }
  for (const auto& d : fleet.gas_boilers) {
    require(d.gas_node >= 0 && d.gas_node < gas_node_count(), d.id + ": dangling gas node");
    require(d.heat_node >= 0 && d.heat_node < heat_node_count(),
            d.id + ": dangling heat node");
    require(d.heat_per_gas > 0.0, d.id + ": coupling ratio must be positive");
    detail::check_device_common(d.id, d.h_min, d.h_max, d.ramp_up, d.ramp_down);
  }
  for (const auto& d : fleet.heat_pumps) {
    require(d.bus >= 0 && d.bus < epn.n_buses, d.id + ": dangling bus");
    require(d.heat_node >= 0 && d.heat_node < heat_node_count(),
            d.id + ": dangling heat node");
    require(d.heat_per_power > 0.0, d.id + ": coupling ratio must be positive");
    detail::check_device_common(d.id, d.h_min, d.h_max, d.ramp_up, d.ramp_down);
  }

  // --- boundary series ---
  detail::check_series(boundary.wind_available, fleet.wind_farms.size(), n_dt,
                       "wind_available");
  detail::check_series(boundary.power_load, epn.n_buses, n_dt, "power_load");
  detail::check_series(boundary.gas_load, ngn.nodes.size(), n_t, "gas_load");
  detail::check_series(boundary.heat_load, dhn.nodes.size(), n_t, "heat_load");
  detail::check_series(boundary.gas_well_history, fleet.gas_wells.size(), n_ht,
                       "historical gas_well");
  detail::check_series(boundary.gas_unit_history, fleet.gas_fired_units.size(), n_ht,
                       "historical gas_unit");
  detail::check_series(boundary.boiler_history, fleet.gas_boilers.size(), n_ht,
                       "historical boiler");
  detail::check_series(boundary.chp_history, fleet.chp_units.size(), n_ht,
                       "historical chp");
  detail::check_series(boundary.heat_pump_history, fleet.heat_pumps.size(), n_ht,
                       "historical heat_pump");
  for (const auto& s : boundary.wind_available)
    for (double v : s) require(v >= 0.0, "wind availability must be non-negative");
  for (const auto* loads : {&boundary.power_load, &boundary.gas_load, &boundary.heat_load})
    for (const auto& s : *loads)
      for (double v : s) require(v >= 0.0, "loads must be non-negative");

  require(solver.violation_keep >= 1, "solver: violation_keep (N_r) must be >= 1");
  require(solver.max_cga_iterations >= 1, "solver: max_cga_iterations must be >= 1");
  require(solver.gas_dx > 0.0 && solver.heat_dx > 0.0, "solver: mesh steps must be positive");
}

// The smoothing penalty: tiny, auto-scaled from the linear cost
// coefficients so the curve-smoothing term stays far below operating cost.
inline double resolve_epsilon(const Scenario& sc) {
  if (sc.solver.epsilon > 0.0) return sc.solver.epsilon;
  std::vector<double> lin;
  for (const auto& d : sc.fleet.thermal_units) lin.push_back(std::abs(d.cost_lin));
  for (const auto& d : sc.fleet.chp_units) {
    lin.push_back(std::abs(d.cost_lin_power));
    lin.push_back(std::abs(d.cost_lin_heat));
  }
  for (const auto& d : sc.fleet.gas_wells) lin.push_back(std::abs(d.cost_lin));
  std::sort(lin.begin(), lin.end());
  const double median = lin.empty() ? 0.0 : lin[lin.size() / 2];
  if (median <= 0.0) return 1e-6;
  return 1e-6 * median * sc.horizon.dispatch_steps;
}

}  // namespace oef
