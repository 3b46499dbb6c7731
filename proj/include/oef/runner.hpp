#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

#include "oef/cga.hpp"
#include "oef/fdm.hpp"
#include "oef/flowcalc.hpp"
#include "oef/qp_solver.hpp"

// Method pipelines: the finite-difference baseline, the frequency-domain
// baseline, its projected (compact) form, and the projected form solved by
// lazy constraint generation. All four return the same solution shape with
// the Table-style timing split (modeling / optimizing / security check).

namespace oef {

enum class Method { kFdm, kEcm, kEcmVsp, kEcmVspCga };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kFdm: return "fdm";
    case Method::kEcm: return "ecm";
    case Method::kEcmVsp: return "ecm-vsp";
    case Method::kEcmVspCga: return "ecm-vsp-cga";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "fdm") return Method::kFdm;
  if (name == "ecm") return Method::kEcm;
  if (name == "ecm-vsp") return Method::kEcmVsp;
  if (name == "ecm-vsp-cga") return Method::kEcmVspCga;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected fdm | ecm | ecm-vsp | ecm-vsp-cga)");
}

struct Timings {
  double modeling = 0.0;
  double optimizing = 0.0;
  double security = 0.0;
  double total() const { return modeling + optimizing + security; }
};

struct DispatchSolution {
  Method method = Method::kEcm;
  SolveStatus status = SolveStatus::kNumericalTrouble;
  bool secure = false;
  double objective = 0.0;
  double w1 = 0.0, w2 = 0.0;
  std::array<std::vector<std::vector<double>>, kTimeFamilyCount> schedules;
  std::array<std::vector<std::vector<Complex>>, kFreqFamilyCount> phasors;
  MonitoredState monitored;
  ModelStats stats;
  Timings timings;
  CgaTrace trace;  // populated by the constraint-generation pipeline
  int ipm_iterations = 0;
  double primal_residual = 0.0, dual_residual = 0.0, relative_gap = 0.0;
};

namespace rundetail {

inline void extract_schedules(const Scenario& sc, const EcmIndex& ix,
                              const std::vector<double>& x, DispatchSolution& out) {
  const int n_dt = sc.horizon.dispatch_steps;
  for (int f = 0; f < kTimeFamilyCount; ++f) {
    out.schedules[f].resize(ix.time_vars[f].size());
    for (size_t d = 0; d < ix.time_vars[f].size(); ++d) {
      out.schedules[f][d].resize(n_dt);
      for (int t = 0; t < n_dt; ++t) out.schedules[f][d][t] = x[ix.time_vars[f][d][t]];
    }
  }
  const int nf = sc.horizon.freq_count();
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    out.phasors[f].resize(ix.freq_vars[f].size());
    for (size_t d = 0; d < ix.freq_vars[f].size(); ++d) {
      out.phasors[f][d].resize(nf);
      for (int k = 0; k < nf; ++k) {
        const auto [re, im] = ix.freq_vars[f][d][k];
        out.phasors[f][d][k] = {x[re], x[im]};
      }
    }
  }
}

inline double compute_w1(const Scenario& sc, const DispatchSolution& sol) {
  double w1 = 0.0;
  const int n_dt = sc.horizon.dispatch_steps;
  for (size_t d = 0; d < sc.fleet.thermal_units.size(); ++d) {
    const auto& u = sc.fleet.thermal_units[d];
    for (int t = 0; t < n_dt; ++t) {
      const double p = sol.schedules[kTpuP][d][t];
      w1 += u.cost_quad * p * p + u.cost_lin * p + u.cost_fixed;
    }
  }
  for (size_t d = 0; d < sc.fleet.chp_units.size(); ++d) {
    const auto& u = sc.fleet.chp_units[d];
    for (int t = 0; t < n_dt; ++t) {
      const double p = sol.schedules[kChpP][d][t];
      const double h = sol.schedules[kChpH][d][t];
      w1 += u.cost_quad_power * p * p + u.cost_lin_power * p + u.cost_fixed_power;
      w1 += u.cost_quad_heat * h * h + u.cost_lin_heat * h + u.cost_fixed_heat;
    }
  }
  for (size_t d = 0; d < sc.fleet.gas_wells.size(); ++d) {
    const auto& u = sc.fleet.gas_wells[d];
    for (int t = 0; t < n_dt; ++t) {
      const double v = sol.schedules[kGwM][d][t];
      w1 += u.cost_quad * v * v + u.cost_lin * v + u.cost_fixed;
    }
  }
  return w1;
}

inline double compute_w2(const Scenario& sc, const EcmContext& ctx,
                         const DispatchSolution& sol) {
  double w2 = 0.0;
  const int nf = sc.horizon.freq_count();
  for (int f = 0; f < kFreqFamilyCount; ++f) {
    const auto family = static_cast<FreqFamily>(f);
    for (size_t d = 0; d < sol.phasors[f].size(); ++d) {
      const double scale = builder::freq_family_scale(sc, family, static_cast<int>(d));
      for (int k = 1; k < nf; ++k)
        w2 += ctx.epsilon * k * std::norm(sol.phasors[f][d][k]) / (scale * scale);
    }
  }
  return w2;
}

}  // namespace rundetail

inline DispatchSolution run_method(const Scenario& sc, Method method,
                                   const IpmOptions& ipm_overrides = {}) {
  using Clock = std::chrono::steady_clock;
  auto elapsed = [](auto since) {
    return std::chrono::duration<double>(Clock::now() - since).count();
  };
  IpmOptions ipm = ipm_overrides;
  ipm.feas_tol = sc.solver.feas_tol;
  ipm.gap_tol = sc.solver.gap_tol;
  ipm.max_iterations = sc.solver.max_ipm_iterations;

  DispatchSolution sol;
  sol.method = method;

  const auto t_model = Clock::now();
  EcmContext ctx = build_ecm_context(sc);

  if (method == Method::kFdm) {
    auto assembly = assemble_fdm_model(sc, ctx);
    sol.stats = assembly.model.stats();
    sol.timings.modeling = elapsed(t_model);

    auto result = solve_qp(assembly.model, ipm);
    sol.timings.optimizing = result.wall_seconds;
    sol.status = result.status;
    sol.ipm_iterations = result.iterations;
    sol.primal_residual = result.primal_residual;
    sol.dual_residual = result.dual_residual;
    sol.relative_gap = result.relative_gap;
    if (result.status != SolveStatus::kOptimal) return sol;
    sol.objective = result.objective;
    rundetail::extract_schedules(sc, assembly.index, result.x, sol);
    sol.w1 = rundetail::compute_w1(sc, sol);
    sol.w2 = 0.0;

    const auto t_sec = Clock::now();
    const int n_dt = sc.horizon.dispatch_steps;
    sol.monitored.pressure.resize(sc.gas_node_count(), n_dt);
    sol.monitored.temperature.resize(sc.heat_node_count(), n_dt);
    for (int t = 0; t < n_dt; ++t) {
      for (int i = 0; i < sc.gas_node_count(); ++i)
        sol.monitored.pressure(i, t) =
            result.x[assembly.state_vars[t][assembly.mesh.gas_node_offset + i]];
      for (int i = 0; i < sc.heat_node_count(); ++i)
        sol.monitored.temperature(i, t) =
            result.x[assembly.state_vars[t][assembly.mesh.heat_node_offset + i]];
    }
    auto buses = bus_injections(sc, assembly.index, result.x);
    sol.monitored.line_flow.resize(sc.epn.lines.size(), n_dt);
    if (ctx.has_ptdf) sol.monitored.line_flow = ctx.ptdf.rows * buses;
    sol.secure = security_check(sc, sol.monitored, sc.solver.security_tol).empty();
    sol.timings.security = elapsed(t_sec);
    return sol;
  }

  if (method == Method::kEcmVspCga) {
    sol.timings.modeling = elapsed(t_model);
    const auto t_run = Clock::now();
    auto result = cga_solve(sc, ctx, ipm);
    sol.timings.modeling += elapsed(t_run) - [&] {
      double opt = 0.0;
      for (const auto& it : result.trace.iterations) opt += it.solve_seconds;
      return opt + result.security_seconds;
    }();
    for (const auto& it : result.trace.iterations)
      sol.timings.optimizing += it.solve_seconds;
    sol.timings.security = result.security_seconds;
    sol.trace = result.trace;
    sol.stats = result.assembly.model.stats();
    sol.status = result.solve.status;
    sol.ipm_iterations = result.solve.iterations;
    sol.primal_residual = result.solve.primal_residual;
    sol.dual_residual = result.solve.dual_residual;
    sol.relative_gap = result.solve.relative_gap;
    if (result.solve.status != SolveStatus::kOptimal) return sol;
    sol.objective = result.solve.objective;
    rundetail::extract_schedules(sc, result.assembly.index, result.solve.x, sol);
    sol.w1 = rundetail::compute_w1(sc, sol);
    sol.w2 = rundetail::compute_w2(sc, ctx, sol);
    sol.monitored = result.monitored;
    sol.secure = result.trace.secure;
    return sol;
  }

  const ModelForm form =
      method == Method::kEcm ? ModelForm::kBaseline : ModelForm::kProjected;
  auto assembly = assemble_oef_model(sc, ctx, form);
  sol.stats = assembly.model.stats();
  sol.timings.modeling = elapsed(t_model);

  auto result = solve_qp(assembly.model, ipm);
  sol.timings.optimizing = result.wall_seconds;
  sol.status = result.status;
  sol.ipm_iterations = result.iterations;
  sol.primal_residual = result.primal_residual;
  sol.dual_residual = result.dual_residual;
  sol.relative_gap = result.relative_gap;
  if (result.status != SolveStatus::kOptimal) return sol;
  sol.objective = result.objective;
  rundetail::extract_schedules(sc, assembly.index, result.x, sol);
  sol.w1 = rundetail::compute_w1(sc, sol);
  sol.w2 = rundetail::compute_w2(sc, ctx, sol);

  const auto t_sec = Clock::now();
  auto gas_inj = injection_phasors(sc, ctx, assembly.index, result.x, true);
  auto heat_inj = injection_phasors(sc, ctx, assembly.index, result.x, false);
  auto buses = bus_injections(sc, assembly.index, result.x);
  sol.monitored = evaluate_monitored(sc, ctx, gas_inj, heat_inj, buses);
  sol.secure = security_check(sc, sol.monitored, sc.solver.security_tol).empty();
  sol.timings.security = elapsed(t_sec);
  return sol;
}

}  // namespace oef
