#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "oef/oef_model.hpp"

// Forward evaluation of monitored quantities from a solved controllable
// point (line power through the PTDF, node pressure and temperature through
// the per-frequency impedance rows and the synthesis sum), and the security
// check that partitions violations into the six (network x side) sets.

namespace oef {

struct MonitoredState {
  Eigen::MatrixXd line_flow;    // [line][dispatch step], W
  Eigen::MatrixXd pressure;     // [gas node][dispatch step], Pa absolute
  Eigen::MatrixXd temperature;  // [heat node][dispatch step], K relative
};

// [node][kappa] injection phasors reconstructed from device phasor values
// plus the load constants
inline std::vector<std::vector<Complex>> injection_phasors(const Scenario& sc,
                                                           const EcmContext& ctx,
                                                           const EcmIndex& ix,
                                                           const std::vector<double>& x,
                                                           bool gas) {
  const int n_nodes = gas ? sc.gas_node_count() : sc.heat_node_count();
  const int nf = sc.horizon.freq_count();
  const auto& load_ph = gas ? ctx.gas_load_ph : ctx.heat_load_ph;
  std::vector<std::vector<Complex>> inj(n_nodes, std::vector<Complex>(nf, {0.0, 0.0}));
  for (int i = 0; i < n_nodes; ++i)
    for (int k = 0; k < nf; ++k) inj[i][k] = -load_ph[i][k];
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    if (kFreqFamilyInfo[f].gas_side != gas) continue;
    const auto family = static_cast<FreqFamily>(f);
    for (int d = 0; d < builder::freq_family_count(sc, family); ++d) {
      const int node = builder::freq_family_node(sc, family, d);
      for (int k = 0; k < nf; ++k) {
        const auto [re, im] = ix.freq_vars[f][d][k];
        inj[node][k] += kFreqFamilyInfo[f].sign * Complex{x[re], x[im]};
      }
    }
  }
  return inj;
}

// [bus][dispatch step] net power injections from device schedules and loads
inline Eigen::MatrixXd bus_injections(const Scenario& sc, const EcmIndex& ix,
                                      const std::vector<double>& x) {
  const int n_dt = sc.horizon.dispatch_steps;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(sc.epn.n_buses, n_dt);
  for (int t = 0; t < n_dt; ++t)
    for (int b = 0; b < sc.epn.n_buses; ++b) p(b, t) = -sc.boundary.power_load[b][t];
  auto add = [&](TimeFamily f, auto bus_of, double sign) {
    for (size_t d = 0; d < ix.time_vars[f].size(); ++d)
      for (int t = 0; t < n_dt; ++t)
        p(bus_of(static_cast<int>(d)), t) += sign * x[ix.time_vars[f][d][t]];
  };
  add(kTpuP, [&](int d) { return sc.fleet.thermal_units[d].bus; }, +1.0);
  add(kNguP, [&](int d) { return sc.fleet.gas_fired_units[d].bus; }, +1.0);
  add(kChpP, [&](int d) { return sc.fleet.chp_units[d].bus; }, +1.0);
  add(kWindP, [&](int d) { return sc.fleet.wind_farms[d].bus; }, +1.0);
  add(kHpP, [&](int d) { return sc.fleet.heat_pumps[d].bus; }, -1.0);
  return p;
}

inline MonitoredState evaluate_monitored(const Scenario& sc, const EcmContext& ctx,
                                         const std::vector<std::vector<Complex>>& gas_inj,
                                         const std::vector<std::vector<Complex>>& heat_inj,
                                         const Eigen::MatrixXd& bus_inj) {
  const int n_dt = sc.horizon.dispatch_steps;
  const int n_t = sc.horizon.total_steps();
  const int nf = sc.horizon.freq_count();
  const int first = sc.horizon.first_dispatch_index();
  MonitoredState st;

  st.line_flow.resize(sc.epn.lines.size(), n_dt);
  if (ctx.has_ptdf) st.line_flow = ctx.ptdf.rows * bus_inj;

  st.pressure.resize(sc.gas_node_count(), n_dt);
  for (int i = 0; i < sc.gas_node_count(); ++i) {
    // Z row dotted with the injection phasors, synthesized per time step
    std::vector<Complex> response(nf, Complex{0.0, 0.0});
    for (int k = 0; k < nf; ++k)
      for (int j = 0; j < sc.gas_node_count(); ++j)
        response[k] += ctx.gas_z[k](i, j) * gas_inj[j][k];
    for (int t = 0; t < n_dt; ++t)
      st.pressure(i, t) =
          sc.reference_pressure_at(t) + inverse_dft(response, first + t, n_t);
  }

  st.temperature.resize(sc.heat_node_count(), n_dt);
  for (int i = 0; i < sc.heat_node_count(); ++i) {
    std::vector<Complex> response(nf, Complex{0.0, 0.0});
    for (int k = 0; k < nf; ++k)
      for (int j = 0; j < sc.heat_node_count(); ++j)
        response[k] += ctx.heat_z[k](i, j) * heat_inj[j][k];
    for (int t = 0; t < n_dt; ++t)
      st.temperature(i, t) = inverse_dft(response, first + t, n_t);
  }
  return st;
}

enum ViolationKind {
  kEpnLower = 0,
  kEpnUpper,
  kNgnLower,
  kNgnUpper,
  kDhnLower,
  kDhnUpper,
  kViolationKindCount,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case kEpnLower: return "epn-lb";
    case kEpnUpper: return "epn-ub";
    case kNgnLower: return "ngn-lb";
    case kNgnUpper: return "ngn-ub";
    case kDhnLower: return "dhn-lb";
    case kDhnUpper: return "dhn-ub";
    default: return "?";
  }
}

struct ViolationRecord {
  int target = -1;  // line or node index
  int dispatch_step = -1;
  double magnitude = 0.0;  // physical units, > 0
};

struct ViolationSets {
  std::array<std::vector<ViolationRecord>, kViolationKindCount> sets;
  bool empty() const {
    for (const auto& s : sets)
      if (!s.empty()) return false;
    return true;
  }
  long total() const {
    long n = 0;
    for (const auto& s : sets) n += static_cast<long>(s.size());
    return n;
  }
};

// Violations below tol * max(|bound|, 1) are solver noise and ignored.
inline ViolationSets security_check(const Scenario& sc, const MonitoredState& st,
                                    double tol) {
  ViolationSets out;
  const int n_dt = sc.horizon.dispatch_steps;
  auto threshold = [&](double bound) { return tol * std::max(std::abs(bound), 1.0); };
  for (size_t l = 0; l < sc.epn.lines.size(); ++l) {
    const double lim = sc.epn.lines[l].flow_limit;
    if (lim >= PowerLine::kInfFlow) continue;
    for (int t = 0; t < n_dt; ++t) {
      const double v = st.line_flow(l, t);
      if (v < -lim - threshold(lim))
        out.sets[kEpnLower].push_back({static_cast<int>(l), t, -lim - v});
      if (v > lim + threshold(lim))
        out.sets[kEpnUpper].push_back({static_cast<int>(l), t, v - lim});
    }
  }
  for (int i = 0; i < sc.gas_node_count(); ++i) {
    for (int t = 0; t < n_dt; ++t) {
      const double v = st.pressure(i, t);
      const double lb = sc.ngn.nodes[i].p_min, ub = sc.ngn.nodes[i].p_max;
      if (v < lb - threshold(lb)) out.sets[kNgnLower].push_back({i, t, lb - v});
      if (v > ub + threshold(ub)) out.sets[kNgnUpper].push_back({i, t, v - ub});
    }
  }
  for (int i = 0; i < sc.heat_node_count(); ++i) {
    for (int t = 0; t < n_dt; ++t) {
      const double v = st.temperature(i, t);
      const double lb = sc.dhn.nodes[i].t_min, ub = sc.dhn.nodes[i].t_max;
      if (v < lb - threshold(lb)) out.sets[kDhnLower].push_back({i, t, lb - v});
      if (v > ub + threshold(ub)) out.sets[kDhnUpper].push_back({i, t, v - ub});
    }
  }
  return out;
}

}  // namespace oef
