#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "oef/scenario.hpp"
#include "oef/units.hpp"

// Bundled scenarios: "micro" (2-bus / 2-node / 2-node, hand-checkable),
// "small" (9-bus EPN, 7-node NGN, 12-node DHN, day-ahead dispatch at 15 min
// with a one-day historical boundary), and the cascade generator that
// chains copies of an elementary system with a tie line and a tie pipe.
// All profiles are deterministic closed forms.

namespace oef {

namespace genprof {

// smooth daily profile: base + swing * (daily harmonic mix), tau in steps
inline double daily(double tau, double steps_per_day, double base, double swing,
                    double phase) {
  const double ang = 2.0 * std::numbers::pi * (tau / steps_per_day - phase);
  return base + swing * (0.62 * std::sin(ang) + 0.31 * std::sin(2.0 * ang + 0.7) +
                         0.07 * std::cos(3.0 * ang));
}

inline std::vector<double> daily_series(int n, double steps_per_day, double base,
                                        double swing, double phase) {
  std::vector<double> out(n);
  for (int t = 0; t < n; ++t) out[t] = daily(t, steps_per_day, base, swing, phase);
  return out;
}

}  // namespace genprof

inline Scenario make_micro_scenario() {
  using units::kMegawatt;
  Scenario sc;
  sc.name = "micro";
  sc.horizon = {4, 4, 900.0};

  sc.epn.n_buses = 2;
  sc.epn.slack_bus = 0;
  sc.epn.lines.push_back({0, 1, 0.1, 100 * kMegawatt});

  sc.ngn.nodes = {{"g0", 45e5, 55e5}, {"g1", 44e5, 55e5}};
  GasPipeData pipe;
  pipe.from = 0;
  pipe.to = 1;
  pipe.geometry = {.length = 10000, .diameter = 0.5, .cross_section = 0.0,
                   .friction = 0.01, .incline_angle = 0.0, .sonic_speed = 340.0,
                   .base_velocity = 5.0};
  sc.ngn.pipes.push_back(pipe);
  sc.ngn.reference_node = 0;
  sc.ngn.reference_pressure = {50e5};

  sc.dhn.ambient_c = 10.0;
  sc.dhn.nodes = {{"h0", 40.0, 95.0}, {"h1", 30.0, 90.0}};  // K relative
  HeatPipeData hp_pipe;
  hp_pipe.from = 0;
  hp_pipe.to = 1;
  hp_pipe.geometry = {.length = 1000, .cross_section = 0.05, .heat_loss = 1.0,
                      .specific_heat = 4182.0, .density = 975.0, .mass_flow = 150.0};
  sc.dhn.pipes.push_back(hp_pipe);
  hp_pipe.from = 1;
  hp_pipe.to = 0;
  sc.dhn.pipes.push_back(hp_pipe);

  GasFiredUnit ngu;
  ngu.id = "ngu1";
  ngu.bus = 0;
  ngu.gas_node = 1;
  ngu.power_per_gas = 20 * kMegawatt;  // per kg/s
  ngu.p_min = 5 * kMegawatt;
  ngu.p_max = 80 * kMegawatt;
  ngu.ramp_up = ngu.ramp_down = 20 * kMegawatt;
  sc.fleet.gas_fired_units.push_back(ngu);

  GasWell gw;
  gw.id = "gw1";
  gw.gas_node = 0;
  gw.m_min = 0.0;
  gw.m_max = 12.0;
  gw.ramp_up = gw.ramp_down = 3.0;
  gw.cost_quad = 0.5;
  gw.cost_lin = 150.0;
  gw.cost_fixed = 20.0;
  sc.fleet.gas_wells.push_back(gw);

  HeatPump hp;
  hp.id = "hp1";
  hp.bus = 1;
  hp.heat_node = 0;
  hp.heat_per_power = 3.0;
  hp.h_min = 0.0;
  hp.h_max = 30 * kMegawatt;
  hp.ramp_up = hp.ramp_down = 10 * kMegawatt;
  sc.fleet.heat_pumps.push_back(hp);

  sc.boundary.power_load = {{}, {}};
  sc.boundary.power_load[0] = {0, 0, 0, 0};
  sc.boundary.power_load[1] = {30 * kMegawatt, 36 * kMegawatt, 40 * kMegawatt,
                               34 * kMegawatt};
  sc.boundary.gas_load = {std::vector<double>(8, 0.0),
                          {3.0, 3.2, 3.4, 3.3, 3.0, 3.1, 3.5, 3.2}};
  sc.boundary.heat_load = {std::vector<double>(8, 0.0),
                           {10 * kMegawatt, 11 * kMegawatt, 12 * kMegawatt,
                            11 * kMegawatt, 10 * kMegawatt, 10.5 * kMegawatt,
                            12 * kMegawatt, 11 * kMegawatt}};
  sc.boundary.gas_well_history = {{4.8, 4.9, 5.1, 5.0}};
  sc.boundary.gas_unit_history = {{32 * kMegawatt, 33 * kMegawatt, 35 * kMegawatt,
                                   34 * kMegawatt}};
  sc.boundary.heat_pump_history = {{10.5 * kMegawatt, 11 * kMegawatt, 11.5 * kMegawatt,
                                    11 * kMegawatt}};
  return sc;
}

inline Scenario make_small_scenario() {
  using genprof::daily_series;
  using units::kMegawatt;
  Scenario sc;
  sc.name = "small";
  sc.horizon = {96, 96, 900.0};
  const int n_dt = 96, n_t = 192;
  const double spd = 96.0;  // steps per day

  // ---- EPN: 9 buses, ring with spurs ----
  sc.epn.n_buses = 9;
  sc.epn.slack_bus = 0;
  auto line = [&](int f, int t, double x, double lim_mw) {
    sc.epn.lines.push_back({f, t, x, lim_mw * kMegawatt});
  };
  line(0, 1, 0.06, 160);
  line(1, 2, 0.08, 120);
  line(2, 3, 0.07, 120);
  line(3, 4, 0.09, 120);
  line(4, 5, 0.06, 140);
  line(5, 0, 0.08, 160);
  line(2, 5, 0.11, 90);
  line(1, 6, 0.10, 80);
  line(4, 7, 0.10, 90);
  line(6, 8, 0.12, 60);

  // ---- NGN: 7 nodes, tree ----
  auto gas_node = [&](const char* id, double lb_bar, double ub_bar) {
    sc.ngn.nodes.push_back({id, lb_bar * units::kBar, ub_bar * units::kBar});
  };
  gas_node("g0", 44, 56);
  gas_node("g1", 44, 55);
  gas_node("g2", 44, 56);
  gas_node("g3", 43, 55);
  gas_node("g4", 42, 55);
  gas_node("g5", 43, 55);
  gas_node("g6", 42, 55);
  auto gas_pipe = [&](int f, int t, double km, double diam, double vbar) {
    GasPipeData p;
    p.from = f;
    p.to = t;
    p.geometry = {.length = km * 1000.0, .diameter = diam, .cross_section = 0.0,
                  .friction = 0.01, .incline_angle = 0.0, .sonic_speed = 340.0,
                  .base_velocity = vbar};
    sc.ngn.pipes.push_back(p);
  };
  gas_pipe(0, 1, 25, 0.6, 5.0);
  gas_pipe(1, 2, 20, 0.5, 4.0);
  gas_pipe(1, 3, 18, 0.6, 5.0);
  gas_pipe(3, 4, 15, 0.5, 4.5);
  gas_pipe(3, 5, 22, 0.5, 4.5);
  gas_pipe(5, 6, 12, 0.45, 4.0);
  sc.ngn.reference_node = 0;
  sc.ngn.reference_pressure = {50e5};

  // ---- DHN: 12-node circulating ring with a chord ----
  sc.dhn.ambient_c = 10.0;
  for (int i = 0; i < 12; ++i)
    sc.dhn.nodes.push_back({"h" + std::to_string(i), 40.0, 95.0});
  auto heat_pipe = [&](int f, int t, double km, double flow) {
    HeatPipeData p;
    p.from = f;
    p.to = t;
    p.geometry = {.length = km * 1000.0, .cross_section = 0.08, .heat_loss = 1.2,
                  .specific_heat = 4182.0, .density = 975.0, .mass_flow = flow};
    sc.dhn.pipes.push_back(p);
  };
  // ring h0 -> h1 -> ... -> h11 -> h0; segments h2..h7 run lighter because
  // of the h2 -> h7 chord
  for (int i = 0; i < 12; ++i) {
    const bool light = (i >= 2 && i < 7);
    heat_pipe(i, (i + 1) % 12, 1.5 + 0.1 * i, light ? 220.0 : 300.0);
  }
  heat_pipe(2, 7, 2.5, 80.0);

  // ---- devices ----
  ThermalUnit tpu;
  tpu.id = "tpu1";
  tpu.bus = 0;
  tpu.p_min = 20 * kMegawatt;
  tpu.p_max = 150 * kMegawatt;
  tpu.ramp_up = tpu.ramp_down = 30 * kMegawatt;
  tpu.cost_quad = 0.004 / (kMegawatt * kMegawatt);
  tpu.cost_lin = 8.0 / kMegawatt;
  tpu.cost_fixed = 42.0;
  sc.fleet.thermal_units.push_back(tpu);

  GasFiredUnit ngu;
  ngu.id = "ngu1";
  ngu.bus = 3;
  ngu.gas_node = 4;
  ngu.power_per_gas = 20 * kMegawatt;
  ngu.p_min = 10 * kMegawatt;
  ngu.p_max = 120 * kMegawatt;
  ngu.ramp_up = ngu.ramp_down = 40 * kMegawatt;
  sc.fleet.gas_fired_units.push_back(ngu);

  ChpUnit chp;
  chp.id = "chp1";
  chp.bus = 6;
  chp.heat_node = 0;
  chp.power_per_heat = 1.3;
  chp.p_min = 15 * kMegawatt;
  chp.p_max = 90 * kMegawatt;
  chp.ramp_up = chp.ramp_down = 25 * kMegawatt;
  chp.cost_quad_power = 0.003 / (kMegawatt * kMegawatt);
  chp.cost_lin_power = 6.0 / kMegawatt;
  chp.cost_fixed_power = 30.0;
  chp.cost_quad_heat = 0.001 / (kMegawatt * kMegawatt);
  chp.cost_lin_heat = 2.5 / kMegawatt;
  chp.cost_fixed_heat = 12.0;
  sc.fleet.chp_units.push_back(chp);

  WindFarm wind;
  wind.id = "wt1";
  wind.bus = 5;
  sc.fleet.wind_farms.push_back(wind);

  GasWell gw1;
  gw1.id = "gw1";
  gw1.gas_node = 0;
  gw1.m_min = 0.0;
  gw1.m_max = 25.0;
  gw1.ramp_up = gw1.ramp_down = 5.0;
  gw1.cost_quad = 0.8;
  gw1.cost_lin = 140.0;
  gw1.cost_fixed = 25.0;
  sc.fleet.gas_wells.push_back(gw1);
  GasWell gw2;
  gw2.id = "gw2";
  gw2.gas_node = 2;
  gw2.m_min = 0.0;
  gw2.m_max = 20.0;
  gw2.ramp_up = gw2.ramp_down = 5.0;
  gw2.cost_quad = 1.2;
  gw2.cost_lin = 165.0;
  gw2.cost_fixed = 18.0;
  sc.fleet.gas_wells.push_back(gw2);

  GasBoiler gb;
  gb.id = "gb1";
  gb.gas_node = 5;
  gb.heat_node = 6;
  gb.heat_per_gas = 45 * kMegawatt;
  gb.h_min = 0.0;
  gb.h_max = 40 * kMegawatt;
  gb.ramp_up = gb.ramp_down = 10 * kMegawatt;
  sc.fleet.gas_boilers.push_back(gb);

  HeatPump hp;
  hp.id = "hp1";
  hp.bus = 8;
  hp.heat_node = 9;
  hp.heat_per_power = 3.0;
  hp.h_min = 0.0;
  hp.h_max = 25 * kMegawatt;
  hp.ramp_up = hp.ramp_down = 8 * kMegawatt;
  sc.fleet.heat_pumps.push_back(hp);

  // ---- boundary ----
  sc.boundary.wind_available = {daily_series(n_dt, spd, 48 * kMegawatt, 30 * kMegawatt,
                                             0.55)};
  for (auto& v : sc.boundary.wind_available[0]) v = std::max(v, 0.0);
  sc.boundary.power_load.assign(9, std::vector<double>(n_dt, 0.0));
  sc.boundary.power_load[2] = daily_series(n_dt, spd, 70 * kMegawatt, 22 * kMegawatt, 0.0);
  sc.boundary.power_load[4] = daily_series(n_dt, spd, 55 * kMegawatt, 18 * kMegawatt, 0.04);
  sc.boundary.power_load[7] = daily_series(n_dt, spd, 45 * kMegawatt, 14 * kMegawatt, -0.03);

  sc.boundary.gas_load.assign(7, std::vector<double>(n_t, 0.0));
  sc.boundary.gas_load[6] = daily_series(n_t, spd, 12.0, 3.5, 0.1);
  sc.boundary.heat_load.assign(12, std::vector<double>(n_t, 0.0));
  sc.boundary.heat_load[3] = daily_series(n_t, spd, 20 * kMegawatt, 6 * kMegawatt, 0.5);
  sc.boundary.heat_load[9] = daily_series(n_t, spd, 14 * kMegawatt, 4 * kMegawatt, 0.46);

  // historical day: load-following schedules answering the same daily
  // shapes the dispatch day sees
  sc.boundary.gas_well_history = {daily_series(96, spd, 10.5, 2.4, 0.08),
                                  daily_series(96, spd, 6.0, 1.4, 0.08)};
  sc.boundary.gas_unit_history = {daily_series(96, spd, 62 * kMegawatt, 16 * kMegawatt,
                                               0.02)};
  sc.boundary.boiler_history = {daily_series(96, spd, 16 * kMegawatt, 4 * kMegawatt, 0.48)};
  sc.boundary.chp_history = {daily_series(96, spd, 22 * kMegawatt, 5 * kMegawatt, 0.5)};
  sc.boundary.heat_pump_history = {daily_series(96, spd, 7 * kMegawatt, 2 * kMegawatt,
                                                0.46)};
  return sc;
}

// Chain `factor` copies of the elementary scenario: every two neighboring
// copies are joined by one tie line between their power networks and one
// tie pipe between their gas networks. Heating networks stay per-copy.
inline Scenario make_cascade_scenario(const Scenario& unit, int factor) {
  if (factor < 1) throw std::invalid_argument("cascade: factor must be >= 1");
  Scenario sc;
  sc.name = unit.name + "-x" + std::to_string(factor);
  sc.horizon = unit.horizon;
  sc.solver = unit.solver;
  sc.dhn.ambient_c = unit.dhn.ambient_c;

  const int nb = unit.epn.n_buses;
  const int ng = static_cast<int>(unit.ngn.nodes.size());
  const int nh = static_cast<int>(unit.dhn.nodes.size());
  sc.epn.n_buses = nb * factor;
  sc.epn.slack_bus = unit.epn.slack_bus;

  auto suffixed = [](const std::string& id, int copy) {
    return id + "_c" + std::to_string(copy);
  };

  for (int c = 0; c < factor; ++c) {
    for (const auto& l : unit.epn.lines)
      sc.epn.lines.push_back({l.from + c * nb, l.to + c * nb, l.reactance, l.flow_limit});
    for (const auto& n : unit.ngn.nodes)
      sc.ngn.nodes.push_back({suffixed(n.id, c), n.p_min, n.p_max});
    for (const auto& p : unit.ngn.pipes) {
      auto q = p;
      q.from += c * ng;
      q.to += c * ng;
      sc.ngn.pipes.push_back(q);
    }
    for (const auto& n : unit.dhn.nodes)
      sc.dhn.nodes.push_back({suffixed(n.id, c), n.t_min, n.t_max});
    for (const auto& p : unit.dhn.pipes) {
      auto q = p;
      q.from += c * nh;
      q.to += c * nh;
      sc.dhn.pipes.push_back(q);
    }
    for (auto d : unit.fleet.thermal_units) {
      d.id = suffixed(d.id, c);
      d.bus += c * nb;
      sc.fleet.thermal_units.push_back(d);
    }
    for (auto d : unit.fleet.gas_fired_units) {
      d.id = suffixed(d.id, c);
      d.bus += c * nb;
      d.gas_node += c * ng;
      sc.fleet.gas_fired_units.push_back(d);
    }
    for (auto d : unit.fleet.chp_units) {
      d.id = suffixed(d.id, c);
      d.bus += c * nb;
      d.heat_node += c * nh;
      sc.fleet.chp_units.push_back(d);
    }
    for (auto d : unit.fleet.wind_farms) {
      d.id = suffixed(d.id, c);
      d.bus += c * nb;
      sc.fleet.wind_farms.push_back(d);
    }
    for (auto d : unit.fleet.gas_wells) {
      d.id = suffixed(d.id, c);
      d.gas_node += c * ng;
      sc.fleet.gas_wells.push_back(d);
    }
    for (auto d : unit.fleet.gas_boilers) {
      d.id = suffixed(d.id, c);
      d.gas_node += c * ng;
      d.heat_node += c * nh;
      sc.fleet.gas_boilers.push_back(d);
    }
    for (auto d : unit.fleet.heat_pumps) {
      d.id = suffixed(d.id, c);
      d.bus += c * nb;
      d.heat_node += c * nh;
      sc.fleet.heat_pumps.push_back(d);
    }
    for (const auto& s : unit.boundary.wind_available)
      sc.boundary.wind_available.push_back(s);
    for (const auto& s : unit.boundary.gas_well_history)
      sc.boundary.gas_well_history.push_back(s);
    for (const auto& s : unit.boundary.gas_unit_history)
      sc.boundary.gas_unit_history.push_back(s);
    for (const auto& s : unit.boundary.boiler_history)
      sc.boundary.boiler_history.push_back(s);
    for (const auto& s : unit.boundary.chp_history) sc.boundary.chp_history.push_back(s);
    for (const auto& s : unit.boundary.heat_pump_history)
      sc.boundary.heat_pump_history.push_back(s);
  }
  sc.boundary.power_load.assign(sc.epn.n_buses, {});
  sc.boundary.gas_load.assign(sc.ngn.nodes.size(), {});
  sc.boundary.heat_load.assign(sc.dhn.nodes.size(), {});
  for (int c = 0; c < factor; ++c) {
    for (int b = 0; b < nb; ++b)
      sc.boundary.power_load[c * nb + b] = unit.boundary.power_load[b];
    for (int g = 0; g < ng; ++g)
      sc.boundary.gas_load[c * ng + g] = unit.boundary.gas_load[g];
    for (int h = 0; h < nh; ++h)
      sc.boundary.heat_load[c * nh + h] = unit.boundary.heat_load[h];
  }

  // ties between neighbours
  for (int c = 0; c + 1 < factor; ++c) {
    sc.epn.lines.push_back(
        {c * nb + (nb - 1), (c + 1) * nb, 0.08, 200.0 * units::kMegawatt});
    GasPipeData tie;
    tie.from = c * ng + (ng - 1);
    tie.to = (c + 1) * ng;
    tie.geometry = {.length = 20000, .diameter = 0.6, .cross_section = 0.0,
                    .friction = 0.01, .incline_angle = 0.0, .sonic_speed = 340.0,
                    .base_velocity = 4.0};
    sc.ngn.pipes.push_back(tie);
  }
  sc.ngn.reference_node = unit.resolve_reference_node();
  sc.ngn.reference_pressure = unit.ngn.reference_pressure;
  return sc;
}

}  // namespace oef
