#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "oef/network.hpp"
#include "oef/qp_model.hpp"
#include "oef/scenario.hpp"
#include "oef/spectral.hpp"

// Assembly of the frequency-domain dispatch model: device constraints,
// network balances, security limits, energy circuit rows per frequency
// component and the time-frequency conversion rows coupling both variable
// domains. Three forms share one builder:
//   kBaseline  - monitored pressure/temperature variables present, circuit
//                rows in admittance form, security as variable bounds
//   kProjected - monitored variables eliminated; security expressed through
//                impedance-projected rows over controllable phasors
//   kRaw       - projected form with every security row removed (the
//                starting point for lazy constraint generation)

namespace oef {

enum class ModelForm { kBaseline, kProjected, kRaw };

// time-domain controllable series
enum TimeFamily {
  kTpuP = 0,
  kNguP,
  kChpP,
  kWindP,
  kHpP,
  kGwM,
  kNguM,
  kGbM,
  kChpH,
  kGbH,
  kHpH,
  kTimeFamilyCount,
};

// frequency-coupled series (phasors + historical boundary)
enum FreqFamily {
  kFreqGasWell = 0,   // gas production
  kFreqNguGas,        // gas consumption
  kFreqBoilerGas,     // gas consumption
  kFreqChpHeat,       // heat production
  kFreqBoilerHeat,    // heat production
  kFreqHpHeat,        // heat production
  kFreqFamilyCount,
};

struct FreqFamilyInfo {
  TimeFamily time_family;
  bool gas_side;    // attaches to the NGN (else DHN)
  double sign;      // +1 production into the network, -1 consumption
};

inline constexpr std::array<FreqFamilyInfo, kFreqFamilyCount> kFreqFamilyInfo{{
    {kGwM, true, +1.0},
    {kNguM, true, -1.0},
    {kGbM, true, -1.0},
    {kChpH, false, +1.0},
    {kGbH, false, +1.0},
    {kHpH, false, +1.0},
}};

struct EcmIndex {
  // [family][device][dispatch step] -> variable id
  std::array<std::vector<std::vector<int>>, kTimeFamilyCount> time_vars;
  // [freq family][device][kappa] -> (re, im) variable ids
  std::array<std::vector<std::vector<std::pair<int, int>>>, kFreqFamilyCount> freq_vars;
  // baseline-only monitored variables
  std::vector<std::vector<int>> gas_p_time;                        // [node][step]
  std::vector<std::vector<std::pair<int, int>>> gas_p_freq;        // [node][kappa]
  std::vector<std::vector<int>> heat_t_time;                       // [node][step]
  std::vector<std::vector<std::pair<int, int>>> heat_t_freq;       // [node][kappa]
  std::vector<std::vector<std::pair<int, int>>> heat_tbf_freq;     // [branch][kappa]
  long monitored_variable_count = 0;
};

struct EcmContext {
  PtdfMatrix ptdf;                      // valid when the EPN has lines
  bool has_ptdf = false;
  int reference_node = -1;
  std::vector<SparseComplex> gas_y;     // per kappa, full node set
  std::vector<Eigen::MatrixXcd> gas_z;  // per kappa, reference row/col zero
  IncidenceSet dhn_inc;
  std::vector<SparseComplex> heat_y;    // per kappa, branch admittance
  std::vector<Eigen::MatrixXcd> heat_z; // per kappa, node impedance
  std::vector<std::vector<Complex>> gas_load_ph;   // [node][kappa]
  std::vector<std::vector<Complex>> heat_load_ph;  // [node][kappa]
  double epsilon = 1e-6;
};

inline EcmContext build_ecm_context(const Scenario& sc) {
  EcmContext ctx;
  const int nf = sc.horizon.freq_count();
  ctx.epsilon = resolve_epsilon(sc);

  if (!sc.epn.lines.empty()) {
    std::vector<PowerLineModel> lines;
    for (const auto& l : sc.epn.lines) lines.push_back({l.from, l.to, l.reactance});
    ctx.ptdf = compute_ptdf(sc.epn.n_buses, lines, sc.epn.slack_bus);
    ctx.has_ptdf = true;
  }

  if (!sc.ngn.nodes.empty()) {
    ctx.reference_node = sc.resolve_reference_node();
    std::vector<Branch> branches;
    std::vector<GasLineParams> params;
    std::vector<double> lengths;
    for (const auto& p : sc.ngn.pipes) {
      branches.push_back({p.from, p.to});
      params.push_back(gas_distributed_params(p.geometry));
      lengths.push_back(p.geometry.length);
    }
    ctx.gas_y.resize(nf);
    ctx.gas_z.resize(nf);
    for (int k = 0; k < nf; ++k) {
      auto models = gas_branch_models(branches, params, lengths, sc.horizon.omega(k));
      ctx.gas_y[k] = gas_node_admittance(sc.gas_node_count(), models);
      ctx.gas_z[k] = gas_node_impedance(ctx.gas_y[k], ctx.reference_node).z;
    }
    ctx.gas_load_ph.resize(sc.ngn.nodes.size());
    for (size_t i = 0; i < sc.ngn.nodes.size(); ++i)
      ctx.gas_load_ph[i] = forward_dft(sc.boundary.gas_load[i]);
  }

  if (!sc.dhn.nodes.empty() && !sc.dhn.pipes.empty()) {
    std::vector<Branch> branches;
    std::vector<double> flows;
    std::vector<HeatLineParams> params;
    for (const auto& p : sc.dhn.pipes) {
      branches.push_back({p.from, p.to});
      flows.push_back(p.geometry.mass_flow);
      params.push_back(heat_distributed_params(p.geometry));
    }
    ctx.dhn_inc = build_incidence(sc.heat_node_count(), branches, flows);
    ctx.heat_y.resize(nf);
    ctx.heat_z.resize(nf);
    for (int k = 0; k < nf; ++k) {
      std::vector<HeatBranchModel> models(branches.size());
      for (size_t b = 0; b < branches.size(); ++b) {
        models[b].from = branches[b].from;
        models[b].to = branches[b].to;
        models[b].transmission = heat_transmission_factor(
            params[b], sc.horizon.omega(k), sc.dhn.pipes[b].geometry.length);
        models[b].heat_capacity_flow =
            sc.dhn.pipes[b].geometry.specific_heat * sc.dhn.pipes[b].geometry.mass_flow;
      }
      ctx.heat_y[k] = heat_branch_admittance(ctx.dhn_inc, models);
      ctx.heat_z[k] = heat_node_impedance(ctx.heat_y[k], ctx.dhn_inc).z;
    }
    ctx.heat_load_ph.resize(sc.dhn.nodes.size());
    for (size_t i = 0; i < sc.dhn.nodes.size(); ++i)
      ctx.heat_load_ph[i] = forward_dft(sc.boundary.heat_load[i]);
  }
  return ctx;
}

namespace builder {

struct DeviceSeries {
  std::string id;
  double lb = 0.0, ub = 0.0;
  double ramp_up = kInf, ramp_down = kInf;
  bool has_ramp = false;
  double history_last = 0.0;  // output at the final historical step
  bool has_history = false;
};

inline std::vector<DeviceSeries> series_of(const Scenario& sc, TimeFamily family) {
  std::vector<DeviceSeries> out;
  const auto& b = sc.boundary;
  auto last = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); };
  switch (family) {
    case kTpuP:
      for (const auto& d : sc.fleet.thermal_units)
        out.push_back({d.id + ".P", d.p_min, d.p_max, d.ramp_up, d.ramp_down, true, 0.0,
                       false});
      break;
    case kNguP:
      for (size_t i = 0; i < sc.fleet.gas_fired_units.size(); ++i) {
        const auto& d = sc.fleet.gas_fired_units[i];
        out.push_back({d.id + ".P", d.p_min, d.p_max, d.ramp_up, d.ramp_down, true,
                       last(b.gas_unit_history[i]), sc.horizon.history_steps > 0});
      }
      break;
    case kChpP:
      for (size_t i = 0; i < sc.fleet.chp_units.size(); ++i) {
        const auto& d = sc.fleet.chp_units[i];
        out.push_back({d.id + ".P", d.p_min, d.p_max, d.ramp_up, d.ramp_down, true,
                       last(b.chp_history[i]) * d.power_per_heat,
                       sc.horizon.history_steps > 0});
      }
      break;
    case kWindP:
      for (const auto& d : sc.fleet.wind_farms)
        out.push_back({d.id + ".P", 0.0, kInf, kInf, kInf, false, 0.0, false});
      break;
    case kHpP:
      for (const auto& d : sc.fleet.heat_pumps)
        out.push_back({d.id + ".P", d.h_min / d.heat_per_power,
                       d.h_max / d.heat_per_power, kInf, kInf, false, 0.0, false});
      break;
    case kGwM:
      for (size_t i = 0; i < sc.fleet.gas_wells.size(); ++i) {
        const auto& d = sc.fleet.gas_wells[i];
        out.push_back({d.id + ".m", d.m_min, d.m_max, d.ramp_up, d.ramp_down, true,
                       last(b.gas_well_history[i]), sc.horizon.history_steps > 0});
      }
      break;
    case kNguM:
      for (const auto& d : sc.fleet.gas_fired_units)
        out.push_back({d.id + ".m", d.p_min / d.power_per_gas, d.p_max / d.power_per_gas,
                       kInf, kInf, false, 0.0, false});
      break;
    case kGbM:
      for (const auto& d : sc.fleet.gas_boilers)
        out.push_back({d.id + ".m", d.h_min / d.heat_per_gas, d.h_max / d.heat_per_gas,
                       kInf, kInf, false, 0.0, false});
      break;
    case kChpH:
      for (const auto& d : sc.fleet.chp_units)
        out.push_back({d.id + ".h", d.p_min / d.power_per_heat, d.p_max / d.power_per_heat,
                       kInf, kInf, false, 0.0, false});
      break;
    case kGbH:
      for (size_t i = 0; i < sc.fleet.gas_boilers.size(); ++i) {
        const auto& d = sc.fleet.gas_boilers[i];
        out.push_back({d.id + ".h", d.h_min, d.h_max, d.ramp_up, d.ramp_down, true,
                       last(b.boiler_history[i]), sc.horizon.history_steps > 0});
      }
      break;
    case kHpH:
      for (size_t i = 0; i < sc.fleet.heat_pumps.size(); ++i) {
        const auto& d = sc.fleet.heat_pumps[i];
        out.push_back({d.id + ".h", d.h_min, d.h_max, d.ramp_up, d.ramp_down, true,
                       last(b.heat_pump_history[i]), sc.horizon.history_steps > 0});
      }
      break;
    default:
      break;
  }
  return out;
}

// full-horizon series the phasors of a frequency family must reproduce over
// the historical window
inline std::vector<double> history_of(const Scenario& sc, FreqFamily family, int device) {
  const auto& b = sc.boundary;
  switch (family) {
    case kFreqGasWell: return b.gas_well_history[device];
    case kFreqNguGas: {
      auto v = b.gas_unit_history[device];
      for (auto& x : v) x /= sc.fleet.gas_fired_units[device].power_per_gas;
      return v;
    }
    case kFreqBoilerGas: {
      auto v = b.boiler_history[device];
      for (auto& x : v) x /= sc.fleet.gas_boilers[device].heat_per_gas;
      return v;
    }
    case kFreqChpHeat: return b.chp_history[device];
    case kFreqBoilerHeat: return b.boiler_history[device];
    case kFreqHpHeat: return b.heat_pump_history[device];
    default: return {};
  }
}

inline int freq_family_count(const Scenario& sc, FreqFamily family) {
  switch (family) {
    case kFreqGasWell: return static_cast<int>(sc.fleet.gas_wells.size());
    case kFreqNguGas: return static_cast<int>(sc.fleet.gas_fired_units.size());
    case kFreqBoilerGas: return static_cast<int>(sc.fleet.gas_boilers.size());
    case kFreqChpHeat: return static_cast<int>(sc.fleet.chp_units.size());
    case kFreqBoilerHeat: return static_cast<int>(sc.fleet.gas_boilers.size());
    case kFreqHpHeat: return static_cast<int>(sc.fleet.heat_pumps.size());
    default: return 0;
  }
}

inline int freq_family_node(const Scenario& sc, FreqFamily family, int device) {
  switch (family) {
    case kFreqGasWell: return sc.fleet.gas_wells[device].gas_node;
    case kFreqNguGas: return sc.fleet.gas_fired_units[device].gas_node;
    case kFreqBoilerGas: return sc.fleet.gas_boilers[device].gas_node;
    case kFreqChpHeat: return sc.fleet.chp_units[device].heat_node;
    case kFreqBoilerHeat: return sc.fleet.gas_boilers[device].heat_node;
    case kFreqHpHeat: return sc.fleet.heat_pumps[device].heat_node;
    default: return -1;
  }
}

// characteristic output magnitude, used to normalize the smoothing penalty
// across unit systems
inline double freq_family_scale(const Scenario& sc, FreqFamily family, int device) {
  double cap = 0.0;
  switch (family) {
    case kFreqGasWell: cap = sc.fleet.gas_wells[device].m_max; break;
    case kFreqNguGas:
      cap = sc.fleet.gas_fired_units[device].p_max /
            sc.fleet.gas_fired_units[device].power_per_gas;
      break;
    case kFreqBoilerGas:
      cap = sc.fleet.gas_boilers[device].h_max / sc.fleet.gas_boilers[device].heat_per_gas;
      break;
    case kFreqChpHeat:
      cap = sc.fleet.chp_units[device].p_max / sc.fleet.chp_units[device].power_per_heat;
      break;
    case kFreqBoilerHeat: cap = sc.fleet.gas_boilers[device].h_max; break;
    case kFreqHpHeat: cap = sc.fleet.heat_pumps[device].h_max; break;
    default: break;
  }
  return std::max(std::abs(cap), 1e-9);
}

inline std::string freq_family_tag(FreqFamily family) {
  switch (family) {
    case kFreqGasWell: return "gw.m";
    case kFreqNguGas: return "ngu.m";
    case kFreqBoilerGas: return "gb.m";
    case kFreqChpHeat: return "chp.h";
    case kFreqBoilerHeat: return "gb.h";
    case kFreqHpHeat: return "hp.h";
    default: return "?";
  }
}

inline std::string freq_device_id(const Scenario& sc, FreqFamily family, int device) {
  switch (family) {
    case kFreqGasWell: return sc.fleet.gas_wells[device].id;
    case kFreqNguGas: return sc.fleet.gas_fired_units[device].id;
    case kFreqBoilerGas: return sc.fleet.gas_boilers[device].id;
    case kFreqChpHeat: return sc.fleet.chp_units[device].id;
    case kFreqBoilerHeat: return sc.fleet.gas_boilers[device].id;
    case kFreqHpHeat: return sc.fleet.heat_pumps[device].id;
    default: return "?";
  }
}

}  // namespace builder

struct EcmAssembly {
  QpModel model;
  EcmIndex index;
  ModelForm form = ModelForm::kBaseline;
};

// One projected security row: a monitored bound rewritten over controllable
// phasor variables (the load contribution is folded into the bounds).
struct ProjectedSecurityRow {
  bool gas = true;  // NGN pressure (else DHN temperature)
  int node = -1;
  int dispatch_step = -1;
  std::vector<std::pair<int, double>> entries;
  double lo = -kInf, hi = kInf;
};

namespace builder {

// Re(w^{tau kappa} Z[i, node_d] * phasor_d) expanded over (re, im) parts of
// every device phasor on the network; the load phasors produce the constant.
inline void projected_row_for(const Scenario& sc, const EcmContext& ctx,
                              const EcmIndex& index, bool gas, int node, int tau_global,
                              std::vector<std::pair<int, double>>& entries,
                              double& load_constant) {
  const int n_total = sc.horizon.total_steps();
  const int nf = sc.horizon.freq_count();
  const auto& z = gas ? ctx.gas_z : ctx.heat_z;
  const auto& load_ph = gas ? ctx.gas_load_ph : ctx.heat_load_ph;
  entries.clear();
  load_constant = 0.0;
  auto row_w = idft_row(tau_global, n_total, nf);
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    const auto info = kFreqFamilyInfo[f];
    if (info.gas_side != gas) continue;
    const auto family = static_cast<FreqFamily>(f);
    const int count = freq_family_count(sc, family);
    for (int d = 0; d < count; ++d) {
      const int dev_node = freq_family_node(sc, family, d);
      for (int k = 0; k < nf; ++k) {
        const Complex coef = row_w[k] * z[k](node, dev_node) * info.sign;
        if (coef == Complex{0.0, 0.0}) continue;
        const auto [re, im] = index.freq_vars[f][d][k];
        entries.emplace_back(re, coef.real());
        entries.emplace_back(im, -coef.imag());
      }
    }
  }
  const int n_nodes = gas ? sc.gas_node_count() : sc.heat_node_count();
  for (int j = 0; j < n_nodes; ++j) {
    for (int k = 0; k < nf; ++k) {
      const Complex contrib = row_w[k] * z[k](node, j) * (-load_ph[j][k]);
      load_constant += contrib.real();
    }
  }
}

}  // namespace builder

inline std::vector<ProjectedSecurityRow> build_projected_security_rows(
    const Scenario& sc, const EcmContext& ctx, const EcmIndex& index) {
  std::vector<ProjectedSecurityRow> rows;
  const int n_dt = sc.horizon.dispatch_steps;
  const int first = sc.horizon.first_dispatch_index();
  for (int i = 0; i < sc.gas_node_count(); ++i) {
    for (int t = 0; t < n_dt; ++t) {
      ProjectedSecurityRow row;
      row.gas = true;
      row.node = i;
      row.dispatch_step = t;
      double load_c = 0.0;
      builder::projected_row_for(sc, ctx, index, true, i, first + t, row.entries, load_c);
      const double ref = sc.reference_pressure_at(t);
      row.lo = sc.ngn.nodes[i].p_min - ref - load_c;
      row.hi = sc.ngn.nodes[i].p_max - ref - load_c;
      rows.push_back(std::move(row));
    }
  }
  for (int i = 0; i < sc.heat_node_count(); ++i) {
    for (int t = 0; t < n_dt; ++t) {
      ProjectedSecurityRow row;
      row.gas = false;
      row.node = i;
      row.dispatch_step = t;
      double load_c = 0.0;
      builder::projected_row_for(sc, ctx, index, false, i, first + t, row.entries, load_c);
      row.lo = sc.dhn.nodes[i].t_min - load_c;
      row.hi = sc.dhn.nodes[i].t_max - load_c;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// PTDF line-limit row over device variables; the bus-load contribution is
// folded into the returned bounds.
inline void epn_security_row(const Scenario& sc, const EcmContext& ctx,
                             const EcmIndex& index, int line, int dispatch_step,
                             std::vector<std::pair<int, double>>& entries, double& lo,
                             double& hi) {
  entries.clear();
  const auto& row = ctx.ptdf.rows;
  auto add_family = [&](TimeFamily fam, auto bus_of, double sign) {
    const auto& vars = index.time_vars[fam];
    for (size_t d = 0; d < vars.size(); ++d) {
      const double c = sign * row(line, bus_of(static_cast<int>(d)));
      if (c != 0.0) entries.emplace_back(vars[d][dispatch_step], c);
    }
  };
  add_family(kTpuP, [&](int d) { return sc.fleet.thermal_units[d].bus; }, +1.0);
  add_family(kNguP, [&](int d) { return sc.fleet.gas_fired_units[d].bus; }, +1.0);
  add_family(kChpP, [&](int d) { return sc.fleet.chp_units[d].bus; }, +1.0);
  add_family(kWindP, [&](int d) { return sc.fleet.wind_farms[d].bus; }, +1.0);
  add_family(kHpP, [&](int d) { return sc.fleet.heat_pumps[d].bus; }, -1.0);
  double load_c = 0.0;
  for (int b = 0; b < sc.epn.n_buses; ++b)
    load_c += row(line, b) * sc.boundary.power_load[b][dispatch_step];
  const double lim = sc.epn.lines[line].flow_limit;
  lo = -lim + load_c;
  hi = lim + load_c;
}

inline EcmAssembly assemble_oef_model(const Scenario& sc, const EcmContext& ctx,
                                      ModelForm form) {
  using namespace builder;
  EcmAssembly out;
  out.form = form;
  QpModel& m = out.model;
  EcmIndex& ix = out.index;
  const int n_dt = sc.horizon.dispatch_steps;
  const int n_ht = sc.horizon.history_steps;
  const int n_t = sc.horizon.total_steps();
  const int nf = sc.horizon.freq_count();
  const auto mask = freedom_mask(n_t);
  const bool with_monitored = form == ModelForm::kBaseline;

  // ---- variables: time-domain controllables with output bounds ----
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

  // ---- variables: frequency-domain controllables with freedom-degree fixes ----
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    const auto family = static_cast<FreqFamily>(f);
    const int count = freq_family_count(sc, family);
    ix.freq_vars[f].resize(count);
    for (int d = 0; d < count; ++d) {
      ix.freq_vars[f][d].resize(nf);
      const std::string base = freq_device_id(sc, family, d) + "." +
                               (kFreqFamilyInfo[f].gas_side ? "m" : "h");
      // valid magnitude box: one-sided coefficients satisfy |c| <= 2 max|x|
      const double mag = 2.0 * freq_family_scale(sc, family, d);
      for (int k = 0; k < nf; ++k) {
        const std::string suffix = "[k" + std::to_string(k) + "]";
        const int re = m.add_variable(base + ".re" + suffix, -mag, mag);
        const int im = m.add_variable(base + ".im" + suffix, -mag, mag);
        ix.freq_vars[f][d][k] = {re, im};
      }
      for (int k : mask) m.fix_variable(ix.freq_vars[f][d][k].second, 0.0);
    }
  }

  // ---- variables: monitored quantities (baseline only) ----
  if (with_monitored) {
    ix.gas_p_time.resize(sc.gas_node_count());
    ix.gas_p_freq.resize(sc.gas_node_count());
    for (int i = 0; i < sc.gas_node_count(); ++i) {
      ix.gas_p_time[i].resize(n_dt);
      for (int t = 0; t < n_dt; ++t) {
        const double ref = sc.reference_pressure_at(t);
        ix.gas_p_time[i][t] =
            m.add_variable(sc.ngn.nodes[i].id + ".p[t" + std::to_string(t) + "]",
                           sc.ngn.nodes[i].p_min - ref, sc.ngn.nodes[i].p_max - ref);
        ++ix.monitored_variable_count;
      }
      ix.gas_p_freq[i].resize(nf);
      double ref_mag = 0.0;
      for (int t = 0; t < n_dt; ++t)
        ref_mag = std::max(ref_mag, std::abs(sc.reference_pressure_at(t)));
      const double p_mag = 2.0 * (std::max(std::abs(sc.ngn.nodes[i].p_min),
                                           std::abs(sc.ngn.nodes[i].p_max)) +
                                  ref_mag);
      for (int k = 0; k < nf; ++k) {
        const std::string suffix = "[k" + std::to_string(k) + "]";
        ix.gas_p_freq[i][k] = {
            m.add_variable(sc.ngn.nodes[i].id + ".p.re" + suffix, -p_mag, p_mag),
            m.add_variable(sc.ngn.nodes[i].id + ".p.im" + suffix, -p_mag, p_mag)};
        ix.monitored_variable_count += 2;
      }
      // No freedom-degree fixes here: monitored phasors keep both parts at
      // every frequency (the circuit rows determine them; the synthesis rows
      // read only the real combination). The reference node is the one
      // exception: its response is the datum and is pinned outright.
      if (i == ctx.reference_node) {
        for (int k = 0; k < nf; ++k) {
          m.fix_variable(ix.gas_p_freq[i][k].first, 0.0);
          m.fix_variable(ix.gas_p_freq[i][k].second, 0.0);
        }
      }
    }
    ix.heat_t_time.resize(sc.heat_node_count());
    ix.heat_t_freq.resize(sc.heat_node_count());
    for (int i = 0; i < sc.heat_node_count(); ++i) {
      ix.heat_t_time[i].resize(n_dt);
      for (int t = 0; t < n_dt; ++t) {
        ix.heat_t_time[i][t] =
            m.add_variable(sc.dhn.nodes[i].id + ".T[t" + std::to_string(t) + "]",
                           sc.dhn.nodes[i].t_min, sc.dhn.nodes[i].t_max);
        ++ix.monitored_variable_count;
      }
      ix.heat_t_freq[i].resize(nf);
      const double t_mag = 2.0 * std::max(std::abs(sc.dhn.nodes[i].t_min),
                                          std::abs(sc.dhn.nodes[i].t_max));
      for (int k = 0; k < nf; ++k) {
        const std::string suffix = "[k" + std::to_string(k) + "]";
        ix.heat_t_freq[i][k] = {
            m.add_variable(sc.dhn.nodes[i].id + ".T.re" + suffix, -t_mag, t_mag),
            m.add_variable(sc.dhn.nodes[i].id + ".T.im" + suffix, -t_mag, t_mag)};
        ix.monitored_variable_count += 2;
      }
    }
    ix.heat_tbf_freq.resize(sc.dhn.pipes.size());
    double tbf_mag = 1.0;
    for (const auto& node : sc.dhn.nodes)
      tbf_mag = std::max({tbf_mag, std::abs(node.t_min), std::abs(node.t_max)});
    tbf_mag *= 2.0;
    for (size_t b = 0; b < sc.dhn.pipes.size(); ++b) {
      ix.heat_tbf_freq[b].resize(nf);
      for (int k = 0; k < nf; ++k) {
        const std::string base = "dhn.pipe" + std::to_string(b) + ".Tbf";
        const std::string suffix = "[k" + std::to_string(k) + "]";
        ix.heat_tbf_freq[b][k] = {m.add_variable(base + ".re" + suffix, -tbf_mag, tbf_mag),
                                  m.add_variable(base + ".im" + suffix, -tbf_mag, tbf_mag)};
        ix.monitored_variable_count += 2;
      }
    }
  }

  // ---- ramping rows ----
  for (int f = 0; f < kTimeFamilyCount; ++f) {
    auto series = series_of(sc, static_cast<TimeFamily>(f));
    for (size_t d = 0; d < series.size(); ++d) {
      if (!series[d].has_ramp) continue;
      const auto& vars = ix.time_vars[f][d];
      for (int t = 0; t < n_dt; ++t) {
        if (t == 0) {
          if (!series[d].has_history) continue;  // first step unconstrained
          m.add_row(RowLabel::kRamping, series[d].history_last - series[d].ramp_down,
                    series[d].history_last + series[d].ramp_up, {{vars[0], 1.0}});
        } else {
          m.add_row(RowLabel::kRamping, -series[d].ramp_down, series[d].ramp_up,
                    {{vars[t], 1.0}, {vars[t - 1], -1.0}});
        }
      }
    }
  }

  // ---- coupling rows ----
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

  // ---- balance rows ----
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
    // inequality: transmission losses are covered by extra production
    m.add_row(RowLabel::kBalance, total_load, kInf, std::move(row));
  }

  // ---- EPN security rows ----
  if (form != ModelForm::kRaw && ctx.has_ptdf) {
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

  // ---- time-frequency conversion rows for controllables (incl. history) ----
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    const auto family = static_cast<FreqFamily>(f);
    const int count = freq_family_count(sc, family);
    const TimeFamily tf = kFreqFamilyInfo[f].time_family;
    for (int d = 0; d < count; ++d) {
      const auto hist = history_of(sc, family, d);
      for (int tau = 0; tau < n_t; ++tau) {
        auto row_w = idft_row(tau, n_t, nf);
        std::vector<std::pair<int, double>> row;
        row.reserve(2 * nf + 1);
        for (int k = 0; k < nf; ++k) {
          const auto [re, im] = ix.freq_vars[f][d][k];
          row.emplace_back(re, row_w[k].real());
          row.emplace_back(im, -row_w[k].imag());
        }
        if (tau < n_ht) {
          m.add_row(RowLabel::kHistoricalBoundary, hist[tau], hist[tau], std::move(row));
        } else {
          row.emplace_back(ix.time_vars[tf][d][tau - n_ht], -1.0);
          m.add_equality(RowLabel::kTfConversion, 0.0, std::move(row));
        }
      }
    }
  }

  if (with_monitored) {
    // ---- NGN circuit rows (admittance form, reference row pinned) ----
    for (int k = 0; k < nf; ++k) {
      if (sc.gas_node_count() == 0) break;
      Eigen::MatrixXcd y(ctx.gas_y[k]);
      for (int i = 0; i < sc.gas_node_count(); ++i) {
        if (i == ctx.reference_node) continue;  // datum rows replaced by the pin
        std::vector<std::pair<int, double>> re_row, im_row;
        for (int j = 0; j < sc.gas_node_count(); ++j) {
          const Complex c = y(i, j);
          if (c == Complex{0.0, 0.0}) continue;
          const auto [pre, pim] = ix.gas_p_freq[j][k];
          re_row.emplace_back(pre, c.real());
          re_row.emplace_back(pim, -c.imag());
          im_row.emplace_back(pre, c.imag());
          im_row.emplace_back(pim, c.real());
        }
        // minus the device injections of Eq (35)
        for (int f = 0; f < kFreqFamilyCount; ++f) {
          if (!kFreqFamilyInfo[f].gas_side) continue;
          const auto family = static_cast<FreqFamily>(f);
          for (int d = 0; d < freq_family_count(sc, family); ++d) {
            if (freq_family_node(sc, family, d) != i) continue;
            const auto [re, im] = ix.freq_vars[f][d][k];
            re_row.emplace_back(re, -kFreqFamilyInfo[f].sign);
            im_row.emplace_back(im, -kFreqFamilyInfo[f].sign);
          }
        }
        const Complex rhs = -ctx.gas_load_ph[i][k];
        m.add_equality(RowLabel::kNgnCircuit, rhs.real(), std::move(re_row));
        m.add_equality(RowLabel::kNgnCircuit, rhs.imag(), std::move(im_row));
      }
    }

    // ---- DHN circuit rows ----
    const int n_hb = static_cast<int>(sc.dhn.pipes.size());
    for (int k = 0; k < nf && sc.heat_node_count() > 0 && n_hb > 0; ++k) {
      Eigen::MatrixXcd y(ctx.heat_y[k]);
      Eigen::MatrixXd weight(ctx.dhn_inc.a_out_weight);
      // branch rows: A~+^T h_n = Y_h,b T_bf
      for (int b = 0; b < n_hb; ++b) {
        std::vector<std::pair<int, double>> re_row, im_row;
        Complex rhs{0.0, 0.0};
        const int head = sc.dhn.pipes[b].from;
        const double w = weight(head, b);
        for (int f = 0; f < kFreqFamilyCount; ++f) {
          if (kFreqFamilyInfo[f].gas_side) continue;
          const auto family = static_cast<FreqFamily>(f);
          for (int d = 0; d < freq_family_count(sc, family); ++d) {
            if (freq_family_node(sc, family, d) != head) continue;
            const auto [re, im] = ix.freq_vars[f][d][k];
            re_row.emplace_back(re, w * kFreqFamilyInfo[f].sign);
            im_row.emplace_back(im, w * kFreqFamilyInfo[f].sign);
          }
        }
        rhs += Complex{w, 0.0} * ctx.heat_load_ph[head][k];
        for (int b2 = 0; b2 < n_hb; ++b2) {
          const Complex c = -y(b, b2);
          if (c == Complex{0.0, 0.0}) continue;
          const auto [tre, tim] = ix.heat_tbf_freq[b2][k];
          re_row.emplace_back(tre, c.real());
          re_row.emplace_back(tim, -c.imag());
          im_row.emplace_back(tre, c.imag());
          im_row.emplace_back(tim, c.real());
        }
        m.add_equality(RowLabel::kDhnCircuit, rhs.real(), std::move(re_row));
        m.add_equality(RowLabel::kDhnCircuit, rhs.imag(), std::move(im_row));
      }
      // node rows: T_n = A~+ T_bf
      for (int i = 0; i < sc.heat_node_count(); ++i) {
        std::vector<std::pair<int, double>> re_row, im_row;
        const auto [tre, tim] = ix.heat_t_freq[i][k];
        re_row.emplace_back(tre, 1.0);
        im_row.emplace_back(tim, 1.0);
        for (int b = 0; b < n_hb; ++b) {
          const double w = weight(i, b);
          if (w == 0.0) continue;
          const auto [bre, bim] = ix.heat_tbf_freq[b][k];
          re_row.emplace_back(bre, -w);
          im_row.emplace_back(bim, -w);
        }
        m.add_equality(RowLabel::kDhnCircuit, 0.0, std::move(re_row));
        m.add_equality(RowLabel::kDhnCircuit, 0.0, std::move(im_row));
      }
    }

    // ---- tf conversion for monitored quantities (dispatch window only) ----
    const int first = sc.horizon.first_dispatch_index();
    for (int i = 0; i < sc.gas_node_count(); ++i) {
      for (int t = 0; t < n_dt; ++t) {
        auto row_w = idft_row(first + t, n_t, nf);
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < nf; ++k) {
          const auto [re, im] = ix.gas_p_freq[i][k];
          row.emplace_back(re, row_w[k].real());
          row.emplace_back(im, -row_w[k].imag());
        }
        row.emplace_back(ix.gas_p_time[i][t], -1.0);
        m.add_equality(RowLabel::kTfConversion, 0.0, std::move(row));
      }
    }
    for (int i = 0; i < sc.heat_node_count(); ++i) {
      for (int t = 0; t < n_dt; ++t) {
        auto row_w = idft_row(first + t, n_t, nf);
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < nf; ++k) {
          const auto [re, im] = ix.heat_t_freq[i][k];
          row.emplace_back(re, row_w[k].real());
          row.emplace_back(im, -row_w[k].imag());
        }
        row.emplace_back(ix.heat_t_time[i][t], -1.0);
        m.add_equality(RowLabel::kTfConversion, 0.0, std::move(row));
      }
    }
  }

  // ---- projected security rows ----
  if (form == ModelForm::kProjected) {
    for (auto& row : build_projected_security_rows(sc, ctx, ix))
      m.add_row(row.gas ? RowLabel::kNgnSecurity : RowLabel::kDhnSecurity, row.lo, row.hi,
                std::move(row.entries));
  }

  // ---- objective ----
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
  // smoothing penalty on high-frequency phasor magnitudes, normalized per
  // device so gas and heat quantities weigh alike
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    const auto family = static_cast<FreqFamily>(f);
    for (int d = 0; d < freq_family_count(sc, family); ++d) {
      const double scale = freq_family_scale(sc, family, d);
      for (int k = 1; k < nf; ++k) {
        const double w = ctx.epsilon * k / (scale * scale);
        const auto [re, im] = ix.freq_vars[f][d][k];
        m.add_quadratic_cost(re, w);
        m.add_quadratic_cost(im, w);
      }
    }
  }
  return out;
}

}  // namespace oef
