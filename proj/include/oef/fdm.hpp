#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oef/oef_model.hpp"

// Time-domain finite-difference baseline. Gas pipes use a box scheme
// (backward Euler in time, central differences at segment midpoints) on the
// linearized gas system; heat pipes use backward Euler with first-order
// upwind differencing along the flow direction. Pipe-end mesh variables tie
// to node variables by equality; node balances close the network. The same
// stencils back both the forward simulator and the FDM dispatch model, so
// the two discretize identical dynamics.

namespace oef {

struct FdmMesh {
  struct GasPipeMesh {
    int segments = 0;
    double dx = 0.0;
    GasLineParams par;
    int p_offset = 0, m_offset = 0;  // into the per-step state vector
  };
  struct HeatPipeMesh {
    int segments = 0;
    double dx = 0.0;
    HeatLineParams par;
    double cpm = 0.0;  // c_p * mass flow
    int t_offset = 0, h_offset = 0;
  };
  std::vector<GasPipeMesh> gas;
  std::vector<HeatPipeMesh> heat;
  int gas_node_offset = 0;   // node pressures
  int heat_node_offset = 0;  // node temperatures
  int state_size = 0;
  long gas_points = 0, heat_points = 0;
};

inline FdmMesh build_fdm_mesh(const Scenario& sc) {
  FdmMesh mesh;
  int cursor = 0;
  for (const auto& pipe : sc.ngn.pipes) {
    FdmMesh::GasPipeMesh gm;
    gm.segments = std::max(1, static_cast<int>(std::ceil(pipe.geometry.length /
                                                         sc.solver.gas_dx)));
    gm.dx = pipe.geometry.length / gm.segments;
    gm.par = gas_distributed_params(pipe.geometry);
    gm.p_offset = cursor;
    cursor += gm.segments + 1;
    gm.m_offset = cursor;
    cursor += gm.segments + 1;
    mesh.gas_points += gm.segments + 1;
    mesh.gas.push_back(gm);
  }
  for (const auto& pipe : sc.dhn.pipes) {
    FdmMesh::HeatPipeMesh hm;
    hm.segments = std::max(1, static_cast<int>(std::ceil(pipe.geometry.length /
                                                         sc.solver.heat_dx)));
    hm.dx = pipe.geometry.length / hm.segments;
    hm.par = heat_distributed_params(pipe.geometry);
    hm.cpm = pipe.geometry.specific_heat * pipe.geometry.mass_flow;
    hm.t_offset = cursor;
    cursor += hm.segments + 1;
    hm.h_offset = cursor;
    cursor += hm.segments + 1;
    mesh.heat_points += hm.segments + 1;
    mesh.heat.push_back(hm);
  }
  mesh.gas_node_offset = cursor;
  cursor += sc.gas_node_count();
  mesh.heat_node_offset = cursor;
  cursor += sc.heat_node_count();
  mesh.state_size = cursor;
  return mesh;
}

// injections per node per global time index, from historical outputs over
// the history window and, when provided, solved schedules over dispatch
struct InjectionSeries {
  Eigen::MatrixXd gas;   // [gas node][time]
  Eigen::MatrixXd heat;  // [heat node][time]
};

inline InjectionSeries historical_injections(const Scenario& sc, int steps) {
  InjectionSeries inj;
  inj.gas = Eigen::MatrixXd::Zero(std::max(1, sc.gas_node_count()), steps);
  inj.heat = Eigen::MatrixXd::Zero(std::max(1, sc.heat_node_count()), steps);
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < sc.gas_node_count(); ++i)
      inj.gas(i, t) -= sc.boundary.gas_load[i][t];
    for (int i = 0; i < sc.heat_node_count(); ++i)
      inj.heat(i, t) -= sc.boundary.heat_load[i][t];
    for (size_t d = 0; d < sc.fleet.gas_wells.size(); ++d)
      inj.gas(sc.fleet.gas_wells[d].gas_node, t) += sc.boundary.gas_well_history[d][t];
    for (size_t d = 0; d < sc.fleet.gas_fired_units.size(); ++d)
      inj.gas(sc.fleet.gas_fired_units[d].gas_node, t) -=
          sc.boundary.gas_unit_history[d][t] / sc.fleet.gas_fired_units[d].power_per_gas;
    for (size_t d = 0; d < sc.fleet.gas_boilers.size(); ++d) {
      inj.gas(sc.fleet.gas_boilers[d].gas_node, t) -=
          sc.boundary.boiler_history[d][t] / sc.fleet.gas_boilers[d].heat_per_gas;
      inj.heat(sc.fleet.gas_boilers[d].heat_node, t) += sc.boundary.boiler_history[d][t];
    }
    for (size_t d = 0; d < sc.fleet.chp_units.size(); ++d)
      inj.heat(sc.fleet.chp_units[d].heat_node, t) += sc.boundary.chp_history[d][t];
    for (size_t d = 0; d < sc.fleet.heat_pumps.size(); ++d)
      inj.heat(sc.fleet.heat_pumps[d].heat_node, t) += sc.boundary.heat_pump_history[d][t];
  }
  return inj;
}

namespace fdmdetail {

struct StencilRow {
  std::vector<std::pair<int, double>> now;   // coefficients on the current step
  std::vector<std::pair<int, double>> prev;  // coefficients on the previous step
  double constant = 0.0;                     // boundary constant (injections enter separately)
};

// All rows of the per-step system. Node balance rows receive the injection
// of their node (marked via node index so callers can add device terms).
struct StepSystem {
  std::vector<StencilRow> rows;
  std::vector<int> gas_balance_row;   // row index per gas node
  std::vector<int> heat_balance_row;  // row index per heat node
};

inline StepSystem build_step_system(const Scenario& sc, const FdmMesh& mesh, double dt,
                                    bool steady, int pinned_gas_node,
                                    double pinned_pressure) {
  StepSystem sys;
  auto add_row = [&]() -> StencilRow& {
    sys.rows.emplace_back();
    return sys.rows.back();
  };

  for (size_t pi = 0; pi < mesh.gas.size(); ++pi) {
    const auto& gm = mesh.gas[pi];
    const auto& par = gm.par;
    for (int s = 0; s < gm.segments; ++s) {
      const int p0 = gm.p_offset + s, p1 = gm.p_offset + s + 1;
      const int m0 = gm.m_offset + s, m1 = gm.m_offset + s + 1;
      auto& momentum = add_row();
      momentum.now = {{p1, 1.0 / gm.dx + par.source_gain / 2.0},
                      {p0, -1.0 / gm.dx + par.source_gain / 2.0},
                      {m0, par.resistance / 2.0},
                      {m1, par.resistance / 2.0}};
      if (!steady) {
        const double c = par.inertance / (2.0 * dt);
        momentum.now[2].second += c;
        momentum.now[3].second += c;
        momentum.prev = {{m0, c}, {m1, c}};
      }
      auto& mass = add_row();
      mass.now = {{m1, 1.0 / gm.dx}, {m0, -1.0 / gm.dx}};
      if (!steady) {
        const double c = par.capacitance / (2.0 * dt);
        mass.now.emplace_back(p0, c);
        mass.now.emplace_back(p1, c);
        mass.prev = {{p0, c}, {p1, c}};
      }
    }
    // pressure continuity at both ends
    const int from = sc.ngn.pipes[pi].from, to = sc.ngn.pipes[pi].to;
    auto& tie_from = add_row();
    tie_from.now = {{gm.p_offset, 1.0}, {mesh.gas_node_offset + from, -1.0}};
    auto& tie_to = add_row();
    tie_to.now = {{gm.p_offset + gm.segments, 1.0}, {mesh.gas_node_offset + to, -1.0}};
  }
  sys.gas_balance_row.assign(sc.gas_node_count(), -1);
  for (int i = 0; i < sc.gas_node_count(); ++i) {
    auto& row = add_row();
    sys.gas_balance_row[i] = static_cast<int>(sys.rows.size()) - 1;
    if (steady && i == pinned_gas_node) {
      // slack node: pressure pinned, its balance left to the datum
      row.now = {{mesh.gas_node_offset + i, 1.0}};
      row.constant = pinned_pressure;
      continue;
    }
    // orientation: outflow minus inflow equals the node injection
    for (size_t pi = 0; pi < mesh.gas.size(); ++pi) {
      const auto& gm = mesh.gas[pi];
      if (sc.ngn.pipes[pi].from == i) row.now.emplace_back(gm.m_offset, 1.0);
      if (sc.ngn.pipes[pi].to == i) row.now.emplace_back(gm.m_offset + gm.segments, -1.0);
    }
  }

  for (size_t pi = 0; pi < mesh.heat.size(); ++pi) {
    const auto& hm = mesh.heat[pi];
    const auto& par = hm.par;
    for (int s = 1; s <= hm.segments; ++s) {
      const int t0 = hm.t_offset + s - 1, t1 = hm.t_offset + s;
      const int h0 = hm.h_offset + s - 1, h1 = hm.h_offset + s;
      auto& grad = add_row();
      grad.now = {{t1, 1.0 / hm.dx}, {t0, -1.0 / hm.dx}, {h1, par.resistance}};
      if (!steady) {
        const double c = par.inertance / dt;
        grad.now[2].second += c;
        grad.prev = {{h1, c}};
      }
      auto& flux = add_row();
      flux.now = {{h1, 1.0 / hm.dx}, {h0, -1.0 / hm.dx}, {t1, par.conductance}};
      if (!steady) {
        const double c = par.capacitance / dt;
        flux.now[2].second += c;
        flux.prev = {{t1, c}};
      }
    }
    const int from = sc.dhn.pipes[pi].from;
    auto& tie = add_row();
    tie.now = {{hm.t_offset, 1.0}, {mesh.heat_node_offset + from, -1.0}};
    auto& enthalpy = add_row();  // h(0) = c_p m T(0)
    enthalpy.now = {{hm.h_offset, 1.0}, {hm.t_offset, -hm.cpm}};
  }
  sys.heat_balance_row.assign(sc.heat_node_count(), -1);
  for (int i = 0; i < sc.heat_node_count(); ++i) {
    auto& row = add_row();
    sys.heat_balance_row[i] = static_cast<int>(sys.rows.size()) - 1;
    for (size_t pi = 0; pi < mesh.heat.size(); ++pi) {
      const auto& hm = mesh.heat[pi];
      if (sc.dhn.pipes[pi].from == i) row.now.emplace_back(hm.h_offset, 1.0);
      if (sc.dhn.pipes[pi].to == i) row.now.emplace_back(hm.h_offset + hm.segments, -1.0);
    }
  }
  if (static_cast<int>(sys.rows.size()) != mesh.state_size)
    throw std::logic_error("fdm: step system is not square");
  return sys;
}

}  // namespace fdmdetail

struct FdmSimOutput {
  Eigen::MatrixXd node_pressure;     // [gas node][steps], Pa absolute
  Eigen::MatrixXd node_temperature;  // [heat node][steps], K relative
  std::vector<double> gas_stored;    // line-pack integral per step, kg
  std::vector<double> gas_net_inflow;  // net boundary inflow per step, kg/s
  Eigen::VectorXd final_state;
};

// mass stored in the pipes: integral of C' p over length (trapezoid)
inline double line_pack(const FdmMesh& mesh, const Eigen::VectorXd& state) {
  double total = 0.0;
  for (const auto& gm : mesh.gas) {
    for (int s = 0; s < gm.segments; ++s) {
      const double pm = 0.5 * (state(gm.p_offset + s) + state(gm.p_offset + s + 1));
      total += gm.par.capacitance * gm.dx * pm;
    }
  }
  return total;
}

inline Eigen::VectorXd fdm_steady_state(const Scenario& sc, const FdmMesh& mesh,
                                        const Eigen::VectorXd& gas_inj,
                                        const Eigen::VectorXd& heat_inj,
                                        int pinned_gas_node, double pinned_pressure) {
  auto sys = fdmdetail::build_step_system(sc, mesh, sc.horizon.step_seconds, true,
                                          pinned_gas_node, pinned_pressure);
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.state_size);
  for (size_t r = 0; r < sys.rows.size(); ++r) {
    for (const auto& [c, v] : sys.rows[r].now) trips.emplace_back(static_cast<int>(r), c, v);
    rhs(r) = sys.rows[r].constant;
  }
  for (int i = 0; i < sc.gas_node_count(); ++i)
    if (!(i == pinned_gas_node)) rhs(sys.gas_balance_row[i]) += gas_inj(i);
  for (int i = 0; i < sc.heat_node_count(); ++i)
    rhs(sys.heat_balance_row[i]) += heat_inj(i);
  Eigen::SparseMatrix<double> m(mesh.state_size, mesh.state_size);
  m.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(m);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("fdm: singular steady-state system");
  return lu.solve(rhs);
}

// March the box/upwind system over `steps` steps with the given injections
// (columns are time). The initial state column feeds step 0.
inline FdmSimOutput simulate_fdm(const Scenario& sc, const FdmMesh& mesh,
                                 const InjectionSeries& inj, int steps,
                                 const Eigen::VectorXd& initial_state) {
  auto sys = fdmdetail::build_step_system(sc, mesh, sc.horizon.step_seconds, false, -1,
                                          0.0);
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t r = 0; r < sys.rows.size(); ++r)
    for (const auto& [c, v] : sys.rows[r].now) trips.emplace_back(static_cast<int>(r), c, v);
  Eigen::SparseMatrix<double> m(mesh.state_size, mesh.state_size);
  m.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(m);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("fdm: singular marching system");

  FdmSimOutput out;
  out.node_pressure.resize(sc.gas_node_count(), steps);
  out.node_temperature.resize(sc.heat_node_count(), steps);
  out.gas_stored.resize(steps);
  out.gas_net_inflow.resize(steps);
  Eigen::VectorXd state = initial_state;
  for (int t = 0; t < steps; ++t) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.state_size);
    for (size_t r = 0; r < sys.rows.size(); ++r) {
      double acc = sys.rows[r].constant;
      for (const auto& [c, v] : sys.rows[r].prev) acc += v * state(c);
      rhs(r) = acc;
    }
    double net_in = 0.0;
    for (int i = 0; i < sc.gas_node_count(); ++i) {
      rhs(sys.gas_balance_row[i]) += inj.gas(i, t);
      net_in += inj.gas(i, t);
    }
    for (int i = 0; i < sc.heat_node_count(); ++i)
      rhs(sys.heat_balance_row[i]) += inj.heat(i, t);
    state = lu.solve(rhs);
    for (int i = 0; i < sc.gas_node_count(); ++i)
      out.node_pressure(i, t) = state(mesh.gas_node_offset + i);
    for (int i = 0; i < sc.heat_node_count(); ++i)
      out.node_temperature(i, t) = state(mesh.heat_node_offset + i);
    out.gas_stored[t] = line_pack(mesh, state);
    out.gas_net_inflow[t] = net_in;
  }
  out.final_state = state;
  return out;
}

// Initial mesh state for the dispatch window: steady state at the first
// historical boundary point, then the historical interval marched forward.
inline Eigen::VectorXd fdm_initial_state(const Scenario& sc, const FdmMesh& mesh) {
  const int n_ht = sc.horizon.history_steps;
  auto inj = historical_injections(sc, std::max(1, n_ht));
  const int pin = sc.gas_node_count() > 0 ? sc.resolve_reference_node() : -1;
  const double pin_p = sc.reference_pressure_at(0);
  Eigen::VectorXd state = fdm_steady_state(sc, mesh, inj.gas.col(0), inj.heat.col(0), pin,
                                           pin_p);
  if (n_ht > 0) {
    auto sim = simulate_fdm(sc, mesh, inj, n_ht, state);
    state = sim.final_state;
  }
  return state;
}

struct FdmAssembly {
  QpModel model;
  EcmIndex index;  // time-domain variables only
  FdmMesh mesh;
  // mesh variable ids: [dispatch step][state index]
  std::vector<std::vector<int>> state_vars;
};

// The FDM dispatch model: the same device, balance and EPN-security rows as
// the frequency-domain form, with pipe dynamics as stencil equality rows
// over dispatch-window mesh variables and the historical terminal state as
// the initial condition.
inline FdmAssembly assemble_fdm_model(const Scenario& sc, const EcmContext& ctx) {
  using namespace builder;
  FdmAssembly out;
  out.mesh = build_fdm_mesh(sc);
  QpModel& m = out.model;
  EcmIndex& ix = out.index;
  const int n_dt = sc.horizon.dispatch_steps;
  const int n_ht = sc.horizon.history_steps;

  // time-domain device variables, output bounds
  for (int f = 0; f < kTimeFamilyCount; ++f) {
    auto series = series_of(sc, static_cast<TimeFamily>(f));
    ix.time_vars[f].resize(series.size());
    for (size_t d = 0; d < series.size(); ++d) {
      ix.time_vars[f][d].resize(n_dt);
      for (int t = 0; t < n_dt; ++t) {
        double ub = series[d].ub;
        if (f == kWindP) ub = sc.boundary.wind_available[d][t];
        ix.time_vars[f][d][t] =
            m.add_variable(series[d].id + "[t" + std::to_string(t) + "]", series[d].lb, ub);
      }
    }
  }

  // mesh variables; node pressures/temperatures carry the security bounds
  out.state_vars.assign(n_dt, std::vector<int>(out.mesh.state_size, -1));
  for (int t = 0; t < n_dt; ++t) {
    for (size_t pi = 0; pi < out.mesh.gas.size(); ++pi) {
      const auto& gm = out.mesh.gas[pi];
      for (int s = 0; s <= gm.segments; ++s) {
        out.state_vars[t][gm.p_offset + s] = m.add_variable(
            "gpipe" + std::to_string(pi) + ".p" + std::to_string(s) + "[t" +
            std::to_string(t) + "]");
        out.state_vars[t][gm.m_offset + s] = m.add_variable(
            "gpipe" + std::to_string(pi) + ".m" + std::to_string(s) + "[t" +
            std::to_string(t) + "]");
      }
    }
    for (size_t pi = 0; pi < out.mesh.heat.size(); ++pi) {
      const auto& hm = out.mesh.heat[pi];
      for (int s = 0; s <= hm.segments; ++s) {
        out.state_vars[t][hm.t_offset + s] = m.add_variable(
            "hpipe" + std::to_string(pi) + ".T" + std::to_string(s) + "[t" +
            std::to_string(t) + "]");
        out.state_vars[t][hm.h_offset + s] = m.add_variable(
            "hpipe" + std::to_string(pi) + ".h" + std::to_string(s) + "[t" +
            std::to_string(t) + "]");
      }
    }
    for (int i = 0; i < sc.gas_node_count(); ++i)
      out.state_vars[t][out.mesh.gas_node_offset + i] =
          m.add_variable(sc.ngn.nodes[i].id + ".p[t" + std::to_string(t) + "]",
                         sc.ngn.nodes[i].p_min, sc.ngn.nodes[i].p_max);
    for (int i = 0; i < sc.heat_node_count(); ++i)
      out.state_vars[t][out.mesh.heat_node_offset + i] =
          m.add_variable(sc.dhn.nodes[i].id + ".T[t" + std::to_string(t) + "]",
                         sc.dhn.nodes[i].t_min, sc.dhn.nodes[i].t_max);
  }

  // device rows shared with the frequency-domain form
  for (int f = 0; f < kTimeFamilyCount; ++f) {
    auto series = series_of(sc, static_cast<TimeFamily>(f));
    for (size_t d = 0; d < series.size(); ++d) {
      if (!series[d].has_ramp) continue;
      const auto& vars = ix.time_vars[f][d];
      for (int t = 0; t < n_dt; ++t) {
        if (t == 0) {
          if (!series[d].has_history) continue;
          m.add_row(RowLabel::kRamping, series[d].history_last - series[d].ramp_down,
                    series[d].history_last + series[d].ramp_up, {{vars[0], 1.0}});
        } else {
          m.add_row(RowLabel::kRamping, -series[d].ramp_down, series[d].ramp_up,
                    {{vars[t], 1.0}, {vars[t - 1], -1.0}});
        }
      }
    }
  }
  for (size_t d = 0; d < sc.fleet.gas_fired_units.size(); ++d)
    for (int t = 0; t < n_dt; ++t)
      m.add_equality(RowLabel::kCoupling, 0.0,
                     {{ix.time_vars[kNguM][d][t], sc.fleet.gas_fired_units[d].power_per_gas},
                      {ix.time_vars[kNguP][d][t], -1.0}});
  for (size_t d = 0; d < sc.fleet.chp_units.size(); ++d)
    for (int t = 0; t < n_dt; ++t)
      m.add_equality(RowLabel::kCoupling, 0.0,
                     {{ix.time_vars[kChpH][d][t], sc.fleet.chp_units[d].power_per_heat},
                      {ix.time_vars[kChpP][d][t], -1.0}});
  for (size_t d = 0; d < sc.fleet.gas_boilers.size(); ++d)
    for (int t = 0; t < n_dt; ++t)
      m.add_equality(RowLabel::kCoupling, 0.0,
                     {{ix.time_vars[kGbM][d][t], sc.fleet.gas_boilers[d].heat_per_gas},
                      {ix.time_vars[kGbH][d][t], -1.0}});
  for (size_t d = 0; d < sc.fleet.heat_pumps.size(); ++d)
    for (int t = 0; t < n_dt; ++t)
      m.add_equality(RowLabel::kCoupling, 0.0,
                     {{ix.time_vars[kHpP][d][t], sc.fleet.heat_pumps[d].heat_per_power},
                      {ix.time_vars[kHpH][d][t], -1.0}});

  for (int t = 0; t < n_dt; ++t) {
    std::vector<std::pair<int, double>> row;
    for (TimeFamily f : {kTpuP, kNguP, kChpP, kWindP})
      for (const auto& dev : ix.time_vars[f]) row.emplace_back(dev[t], 1.0);
    for (const auto& dev : ix.time_vars[kHpP]) row.emplace_back(dev[t], -1.0);
    double load = 0.0;
    for (int b = 0; b < sc.epn.n_buses; ++b) load += sc.boundary.power_load[b][t];
    m.add_equality(RowLabel::kBalance, load, std::move(row));
  }
  if (sc.gas_node_count() > 0) {
    std::vector<std::pair<int, double>> row;
    double total_load = 0.0;
    for (int t = 0; t < n_dt; ++t) {
      for (const auto& dev : ix.time_vars[kGwM]) row.emplace_back(dev[t], 1.0);
      for (const auto& dev : ix.time_vars[kNguM]) row.emplace_back(dev[t], -1.0);
      for (const auto& dev : ix.time_vars[kGbM]) row.emplace_back(dev[t], -1.0);
      for (int i = 0; i < sc.gas_node_count(); ++i)
        total_load += sc.boundary.gas_load[i][n_ht + t];
    }
    m.add_equality(RowLabel::kBalance, total_load, std::move(row));
  }
  if (sc.heat_node_count() > 0) {
    std::vector<std::pair<int, double>> row;
    double total_load = 0.0;
    for (int t = 0; t < n_dt; ++t) {
      for (const auto& dev : ix.time_vars[kChpH]) row.emplace_back(dev[t], 1.0);
      for (const auto& dev : ix.time_vars[kGbH]) row.emplace_back(dev[t], 1.0);
      for (const auto& dev : ix.time_vars[kHpH]) row.emplace_back(dev[t], 1.0);
      for (int i = 0; i < sc.heat_node_count(); ++i)
        total_load += sc.boundary.heat_load[i][n_ht + t];
    }
    m.add_row(RowLabel::kBalance, total_load, kInf, std::move(row));
  }

  if (ctx.has_ptdf) {
    std::vector<std::pair<int, double>> entries;
    for (size_t l = 0; l < sc.epn.lines.size(); ++l) {
      if (sc.epn.lines[l].flow_limit >= PowerLine::kInfFlow) continue;
      for (int t = 0; t < n_dt; ++t) {
        double lo, hi;
        epn_security_row(sc, ctx, ix, static_cast<int>(l), t, entries, lo, hi);
        m.add_row(RowLabel::kEpnSecurity, lo, hi, entries);
      }
    }
  }

  // stencil and node-coupling rows over the dispatch window
  const Eigen::VectorXd init = fdm_initial_state(sc, out.mesh);
  auto sys = fdmdetail::build_step_system(sc, out.mesh, sc.horizon.step_seconds, false,
                                          -1, 0.0);
  for (int t = 0; t < n_dt; ++t) {
    for (size_t r = 0; r < sys.rows.size(); ++r) {
      const auto& srow = sys.rows[r];
      std::vector<std::pair<int, double>> entries;
      double rhs = srow.constant;
      for (const auto& [c, v] : srow.now) entries.emplace_back(out.state_vars[t][c], v);
      for (const auto& [c, v] : srow.prev) {
        if (t == 0)
          rhs += v * init(c);
        else
          entries.emplace_back(out.state_vars[t - 1][c], -v);
      }
      // node balance rows carry the device injections of their node
      // node balances: (outflow - inflow) - device injections = -load
      bool is_balance = false;
      for (int i = 0; i < sc.gas_node_count(); ++i) {
        if (sys.gas_balance_row[i] != static_cast<int>(r)) continue;
        is_balance = true;
        for (size_t d = 0; d < sc.fleet.gas_wells.size(); ++d)
          if (sc.fleet.gas_wells[d].gas_node == i)
            entries.emplace_back(ix.time_vars[kGwM][d][t], -1.0);
        for (size_t d = 0; d < sc.fleet.gas_fired_units.size(); ++d)
          if (sc.fleet.gas_fired_units[d].gas_node == i)
            entries.emplace_back(ix.time_vars[kNguM][d][t], 1.0);
        for (size_t d = 0; d < sc.fleet.gas_boilers.size(); ++d)
          if (sc.fleet.gas_boilers[d].gas_node == i)
            entries.emplace_back(ix.time_vars[kGbM][d][t], 1.0);
        rhs -= sc.boundary.gas_load[i][n_ht + t];
        m.add_equality(RowLabel::kFdmNodeCoupling, rhs, std::move(entries));
        break;
      }
      if (is_balance) continue;
      for (int i = 0; i < sc.heat_node_count(); ++i) {
        if (sys.heat_balance_row[i] != static_cast<int>(r)) continue;
        is_balance = true;
        for (size_t d = 0; d < sc.fleet.chp_units.size(); ++d)
          if (sc.fleet.chp_units[d].heat_node == i)
            entries.emplace_back(ix.time_vars[kChpH][d][t], -1.0);
        for (size_t d = 0; d < sc.fleet.gas_boilers.size(); ++d)
          if (sc.fleet.gas_boilers[d].heat_node == i)
            entries.emplace_back(ix.time_vars[kGbH][d][t], -1.0);
        for (size_t d = 0; d < sc.fleet.heat_pumps.size(); ++d)
          if (sc.fleet.heat_pumps[d].heat_node == i)
            entries.emplace_back(ix.time_vars[kHpH][d][t], -1.0);
        rhs -= sc.boundary.heat_load[i][n_ht + t];
        m.add_equality(RowLabel::kFdmNodeCoupling, rhs, std::move(entries));
        break;
      }
      if (is_balance) continue;
      const bool is_tie = srow.prev.empty();
      m.add_equality(is_tie ? RowLabel::kFdmNodeCoupling : RowLabel::kFdmStencil, rhs,
                     std::move(entries));
    }
  }

  // operating-cost objective
  for (size_t d = 0; d < sc.fleet.thermal_units.size(); ++d) {
    const auto& u = sc.fleet.thermal_units[d];
    for (int t = 0; t < n_dt; ++t) {
      const int v = ix.time_vars[kTpuP][d][t];
      m.add_quadratic_cost(v, u.cost_quad);
      m.add_linear_cost(v, u.cost_lin);
      m.add_constant_cost(u.cost_fixed);
    }
  }
  for (size_t d = 0; d < sc.fleet.chp_units.size(); ++d) {
    const auto& u = sc.fleet.chp_units[d];
    for (int t = 0; t < n_dt; ++t) {
      const int vp = ix.time_vars[kChpP][d][t];
      m.add_quadratic_cost(vp, u.cost_quad_power);
      m.add_linear_cost(vp, u.cost_lin_power);
      const int vh = ix.time_vars[kChpH][d][t];
      m.add_quadratic_cost(vh, u.cost_quad_heat);
      m.add_linear_cost(vh, u.cost_lin_heat);
      m.add_constant_cost(u.cost_fixed_power + u.cost_fixed_heat);
    }
  }
  for (size_t d = 0; d < sc.fleet.gas_wells.size(); ++d) {
    const auto& u = sc.fleet.gas_wells[d];
    for (int t = 0; t < n_dt; ++t) {
      const int v = ix.time_vars[kGwM][d][t];
      m.add_quadratic_cost(v, u.cost_quad);
      m.add_linear_cost(v, u.cost_lin);
      m.add_constant_cost(u.cost_fixed);
    }
  }
  return out;
}

}  // namespace oef
