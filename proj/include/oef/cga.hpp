#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "oef/flowcalc.hpp"
#include "oef/qp_solver.hpp"

// Lazy security-constraint generation: start from the projected model with
// every security row removed, solve, evaluate the monitored quantities,
// and re-add only the rows whose bounds are violated, keeping the N_r most
// severe violations per (violation kind, time step). Added cuts persist
// across iterations and a (kind, target, step) triple is added at most once.

namespace oef {

struct CgaIteration {
  double solve_seconds = 0.0;
  double objective = 0.0;
  long violations_found = 0;
  long cuts_added = 0;
};

struct CgaTrace {
  std::vector<CgaIteration> iterations;
  bool secure = false;
  long total_cuts = 0;
};

struct CgaResult {
  EcmAssembly assembly;  // final model including the generated cuts
  SolveResult solve;     // last solve
  CgaTrace trace;
  MonitoredState monitored;
  double security_seconds = 0.0;
};

inline CgaResult cga_solve(const Scenario& sc, const EcmContext& ctx,
                           const IpmOptions& ipm) {
  CgaResult out;
  out.assembly = assemble_oef_model(sc, ctx, ModelForm::kRaw);
  const auto security_rows = build_projected_security_rows(sc, ctx, out.assembly.index);
  const int n_dt = sc.horizon.dispatch_steps;
  const int gas_nodes = sc.gas_node_count();
  auto projected_row_at = [&](bool gas, int node, int t) -> const ProjectedSecurityRow& {
    const size_t idx = gas ? static_cast<size_t>(node) * n_dt + t
                           : static_cast<size_t>(gas_nodes) * n_dt +
                                 static_cast<size_t>(node) * n_dt + t;
    return security_rows[idx];
  };

  std::set<std::tuple<int, int, int>> added;  // (kind, target, step)
  const int n_r = sc.solver.violation_keep;

  for (int iter = 0; iter < sc.solver.max_cga_iterations; ++iter) {
    out.solve = solve_qp(out.assembly.model, ipm);
    if (out.solve.status != SolveStatus::kOptimal) {
      CgaIteration rec;
      rec.solve_seconds = out.solve.wall_seconds;
      out.trace.iterations.push_back(rec);
      throw std::runtime_error("cga: solver returned '" +
                               std::string(to_string(out.solve.status)) +
                               "' at iteration " + std::to_string(iter + 1));
    }

    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    auto gas_inj = injection_phasors(sc, ctx, out.assembly.index, out.solve.x, true);
    auto heat_inj = injection_phasors(sc, ctx, out.assembly.index, out.solve.x, false);
    auto buses = bus_injections(sc, out.assembly.index, out.solve.x);
    out.monitored = evaluate_monitored(sc, ctx, gas_inj, heat_inj, buses);
    auto violations = security_check(sc, out.monitored, sc.solver.security_tol);
    out.security_seconds += std::chrono::duration<double>(Clock::now() - t0).count();

    CgaIteration rec;
    rec.solve_seconds = out.solve.wall_seconds;
    rec.objective = out.solve.objective;
    rec.violations_found = violations.total();

    if (violations.empty()) {
      out.trace.iterations.push_back(rec);
      out.trace.secure = true;
      return out;
    }

    // filter per kind per time step, most severe first, ties to the lowest
    // target index
    for (int kind = 0; kind < kViolationKindCount; ++kind) {
      auto& set = violations.sets[kind];
      std::sort(set.begin(), set.end(), [](const ViolationRecord& a,
                                           const ViolationRecord& b) {
        if (a.dispatch_step != b.dispatch_step) return a.dispatch_step < b.dispatch_step;
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        return a.target < b.target;
      });
      int kept_at_step = 0;
      int current_step = -1;
      for (const auto& v : set) {
        if (v.dispatch_step != current_step) {
          current_step = v.dispatch_step;
          kept_at_step = 0;
        }
        if (kept_at_step >= n_r) continue;
        ++kept_at_step;
        if (!added.insert({kind, v.target, v.dispatch_step}).second) continue;

        if (kind == kEpnLower || kind == kEpnUpper) {
          std::vector<std::pair<int, double>> entries;
          double lo, hi;
          epn_security_row(sc, ctx, out.assembly.index, v.target, v.dispatch_step,
                           entries, lo, hi);
          if (kind == kEpnLower)
            out.assembly.model.add_row(RowLabel::kEpnSecurity, lo, kInf, entries);
          else
            out.assembly.model.add_row(RowLabel::kEpnSecurity, -kInf, hi, entries);
        } else {
          const bool gas = (kind == kNgnLower || kind == kNgnUpper);
          const bool lower = (kind == kNgnLower || kind == kDhnLower);
          const auto& row = projected_row_at(gas, v.target, v.dispatch_step);
          out.assembly.model.add_row(
              gas ? RowLabel::kNgnSecurity : RowLabel::kDhnSecurity,
              lower ? row.lo : -kInf, lower ? kInf : row.hi, row.entries);
        }
        ++rec.cuts_added;
      }
    }
    out.trace.total_cuts += rec.cuts_added;
    out.trace.iterations.push_back(rec);

    if (rec.cuts_added == 0) {
      // violations persisted but every cut is already present: numerical
      // disagreement between the model rows and the check; report insecure
      out.trace.secure = false;
      return out;
    }
  }
  out.trace.secure = false;
  return out;
}

}  // namespace oef
