#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oef/runner.hpp"
#include "oef/scenario_gen.hpp"

using oef::Method;
using oef::ModelForm;
using oef::SolveStatus;

namespace {

// closed-form variable counts for one scenario (derived from the variable
// families and index sets; cross-checked against the assembled models)
struct Counts {
  long time_series = 0;
  long freq_series = 0;
  long monitored = 0;
};

Counts expected_counts(const oef::Scenario& sc) {
  Counts c;
  const auto& f = sc.fleet;
  const long devices_time =
      static_cast<long>(f.thermal_units.size() + 2 * f.gas_fired_units.size() +
                        2 * f.chp_units.size() + f.wind_farms.size() +
                        2 * f.heat_pumps.size() + f.gas_wells.size() +
                        2 * f.gas_boilers.size());
  c.time_series = devices_time * sc.horizon.dispatch_steps;
  const long freq_series =
      static_cast<long>(f.gas_wells.size() + f.gas_fired_units.size() +
                        2 * f.gas_boilers.size() + f.chp_units.size() +
                        f.heat_pumps.size());
  c.freq_series = freq_series * 2 * sc.horizon.freq_count();
  const long monitored_nodes = sc.gas_node_count() + sc.heat_node_count();
  c.monitored = monitored_nodes * sc.horizon.dispatch_steps +
                (monitored_nodes + static_cast<long>(sc.dhn.pipes.size())) * 2 *
                    sc.horizon.freq_count();
  return c;
}

}  // namespace

TEST_CASE("variable counts match the closed-form index-set formulas") {
  auto sc = oef::make_micro_scenario();
  auto ctx = oef::build_ecm_context(sc);
  auto counts = expected_counts(sc);

  auto baseline = oef::assemble_oef_model(sc, ctx, ModelForm::kBaseline);
  CHECK(baseline.model.variable_count() ==
        counts.time_series + counts.freq_series + counts.monitored);
  CHECK(baseline.index.monitored_variable_count == counts.monitored);

  auto projected = oef::assemble_oef_model(sc, ctx, ModelForm::kProjected);
  CHECK(projected.model.variable_count() == counts.time_series + counts.freq_series);
  // the variable drop equals the monitored count exactly
  CHECK(baseline.model.variable_count() - projected.model.variable_count() ==
        counts.monitored);

  auto raw = oef::assemble_oef_model(sc, ctx, ModelForm::kRaw);
  CHECK(raw.model.variable_count() == projected.model.variable_count());
  // raw strips exactly the security rows
  const auto ps = projected.model.stats();
  const auto rs = raw.model.stats();
  long security_rows = 0;
  for (const char* label : {"epn-security", "ngn-security", "dhn-security"}) {
    auto it = ps.rows_per_label.find(label);
    if (it != ps.rows_per_label.end()) security_rows += it->second;
  }
  CHECK(ps.constraints - rs.constraints == security_rows);
  CHECK(rs.rows_per_label.count("epn-security") == 0);
}

TEST_CASE("empty gas and heat networks reduce to a dc dispatch qp") {
  oef::Scenario sc = oef::make_micro_scenario();
  sc.ngn = {};
  sc.dhn = {};
  sc.fleet.gas_fired_units.clear();
  sc.fleet.gas_wells.clear();
  sc.fleet.heat_pumps.clear();
  oef::ThermalUnit tpu;
  tpu.id = "t1";
  tpu.bus = 0;
  tpu.p_min = 0;
  tpu.p_max = 100e6;
  tpu.ramp_up = tpu.ramp_down = 50e6;
  tpu.cost_quad = 2e-12;
  tpu.cost_lin = 3e-5;
  tpu.cost_fixed = 10.0;
  sc.fleet.thermal_units.push_back(tpu);
  sc.boundary.gas_load.clear();
  sc.boundary.heat_load.clear();
  sc.boundary.gas_well_history.clear();
  sc.boundary.gas_unit_history.clear();
  sc.boundary.heat_pump_history.clear();
  REQUIRE_NOTHROW(sc.validate());

  auto ctx = oef::build_ecm_context(sc);
  auto assembly = oef::assemble_oef_model(sc, ctx, ModelForm::kBaseline);
  auto stats = assembly.model.stats();
  CHECK(stats.rows_per_label.count("ngn-circuit") == 0);
  CHECK(stats.rows_per_label.count("dhn-circuit") == 0);
  CHECK(stats.rows_per_label.count("tf-conversion") == 0);
  auto r = oef::solve_qp(assembly.model);
  REQUIRE(r.status == SolveStatus::kOptimal);
  // all load served by the single unit
  for (int t = 0; t < 4; ++t)
    CHECK(r.x[assembly.index.time_vars[oef::kTpuP][0][t]] ==
          Catch::Approx(sc.boundary.power_load[1][t]).epsilon(1e-6));
}

TEST_CASE("micro scenario: baseline model solves and audits clean") {
  auto sc = oef::make_micro_scenario();
  auto sol = oef::run_method(sc, Method::kEcm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.secure);

  const int n_dt = sc.horizon.dispatch_steps;
  const int n_ht = sc.horizon.history_steps;

  // power balance per step
  for (int t = 0; t < n_dt; ++t) {
    double gen = sol.schedules[oef::kNguP][0][t];
    double demand = sc.boundary.power_load[1][t] + sol.schedules[oef::kHpP][0][t];
    CHECK(gen == Catch::Approx(demand).margin(1e-6 * demand + 1e-3));
  }
  // horizon gas balance
  double supply = 0, use = 0;
  for (int t = 0; t < n_dt; ++t) {
    supply += sol.schedules[oef::kGwM][0][t];
    use += sol.schedules[oef::kNguM][0][t] + sc.boundary.gas_load[1][n_ht + t];
  }
  CHECK(supply == Catch::Approx(use).epsilon(1e-8));
  // heat covers the load plus losses
  double heat = 0, heat_load = 0;
  for (int t = 0; t < n_dt; ++t) {
    heat += sol.schedules[oef::kHpH][0][t];
    heat_load += sc.boundary.heat_load[1][n_ht + t];
  }
  CHECK(heat >= heat_load - 1.0);

  // phasor / time-series DFT-pair consistency: the phasors are the forward
  // transform of history + dispatch
  for (int f = 0; f < oef::kFreqFamilyCount; ++f) {
    const auto family = static_cast<oef::FreqFamily>(f);
    for (size_t d = 0; d < sol.phasors[f].size(); ++d) {
      auto series = oef::builder::history_of(sc, family, static_cast<int>(d));
      const auto tf = oef::kFreqFamilyInfo[f].time_family;
      for (int t = 0; t < n_dt; ++t) series.push_back(sol.schedules[tf][d][t]);
      auto coeffs = oef::forward_dft(series);
      double scale = 0.0;
      for (double v : series) scale = std::max(scale, std::abs(v));
      for (int k = 0; k < sc.horizon.freq_count(); ++k)
        CHECK(std::abs(coeffs[k] - sol.phasors[f][d][k]) <=
              1e-6 * std::max(1.0, scale));
    }
  }
  // W2 stays far below W1
  CHECK(sol.w2 <= 1e-3 * sol.w1);
  CHECK(sol.objective == Catch::Approx(sol.w1 + sol.w2).epsilon(1e-9));
}

TEST_CASE("micro scenario: the three frequency-domain pipelines agree") {
  auto sc = oef::make_micro_scenario();
  auto ecm = oef::run_method(sc, Method::kEcm);
  auto vsp = oef::run_method(sc, Method::kEcmVsp);
  auto cga = oef::run_method(sc, Method::kEcmVspCga);
  REQUIRE(ecm.status == SolveStatus::kOptimal);
  REQUIRE(vsp.status == SolveStatus::kOptimal);
  REQUIRE(cga.status == SolveStatus::kOptimal);
  CHECK(vsp.objective == Catch::Approx(ecm.objective).epsilon(1e-6));
  CHECK(cga.objective == Catch::Approx(ecm.objective).epsilon(1e-6));
  CHECK(cga.secure);
  // relaxation ordering along cga iterations
  for (size_t i = 1; i < cga.trace.iterations.size(); ++i)
    CHECK(cga.trace.iterations[i].objective >=
          cga.trace.iterations[i - 1].objective - 1e-6 * std::abs(cga.objective));
  // compaction orderings
  CHECK(vsp.stats.variables < ecm.stats.variables);
  CHECK(cga.stats.constraints <= vsp.stats.constraints);

  // the monitored trajectories of baseline and projected forms coincide
  for (int i = 0; i < sc.gas_node_count(); ++i)
    for (int t = 0; t < sc.horizon.dispatch_steps; ++t)
      CHECK(ecm.monitored.pressure(i, t) ==
            Catch::Approx(vsp.monitored.pressure(i, t)).margin(2e-2));
}

TEST_CASE("baseline monitored variables equal the flowcalc evaluation") {
  auto sc = oef::make_micro_scenario();
  auto ctx = oef::build_ecm_context(sc);
  auto assembly = oef::assemble_oef_model(sc, ctx, ModelForm::kBaseline);
  auto r = oef::solve_qp(assembly.model);
  REQUIRE(r.status == SolveStatus::kOptimal);
  auto gas_inj = oef::injection_phasors(sc, ctx, assembly.index, r.x, true);
  auto heat_inj = oef::injection_phasors(sc, ctx, assembly.index, r.x, false);
  auto buses = oef::bus_injections(sc, assembly.index, r.x);
  auto st = oef::evaluate_monitored(sc, ctx, gas_inj, heat_inj, buses);
  for (int i = 0; i < sc.gas_node_count(); ++i)
    for (int t = 0; t < sc.horizon.dispatch_steps; ++t) {
      const double from_vars = r.x[assembly.index.gas_p_time[i][t]] +
                               sc.reference_pressure_at(t);
      CHECK(st.pressure(i, t) == Catch::Approx(from_vars).margin(1e-3));
    }
  for (int i = 0; i < sc.heat_node_count(); ++i)
    for (int t = 0; t < sc.horizon.dispatch_steps; ++t)
      CHECK(st.temperature(i, t) ==
            Catch::Approx(r.x[assembly.index.heat_t_time[i][t]]).margin(1e-6));
}

TEST_CASE("projected security rows match the baseline pipeline on random phasors") {
  auto sc = oef::make_micro_scenario();
  auto ctx = oef::build_ecm_context(sc);
  auto assembly = oef::assemble_oef_model(sc, ctx, ModelForm::kRaw);
  auto rows = oef::build_projected_security_rows(sc, ctx, assembly.index);

  // random but freedom-feasible phasor assignment
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(assembly.model.variable_count(), 0.0);
  const auto mask = oef::freedom_mask(sc.horizon.total_steps());
  for (int f = 0; f < oef::kFreqFamilyCount; ++f)
    for (auto& dev : assembly.index.freq_vars[f])
      for (int k = 0; k < sc.horizon.freq_count(); ++k) {
        x[dev[k].first] = u(rng);
        x[dev[k].second] = u(rng);
        for (int mk : mask)
          if (mk == k) x[dev[k].second] = 0.0;
      }

  // oracle: solve the circuit equations and synthesize the time series
  auto gas_inj = oef::injection_phasors(sc, ctx, assembly.index, x, true);
  auto heat_inj = oef::injection_phasors(sc, ctx, assembly.index, x, false);
  Eigen::MatrixXd buses = Eigen::MatrixXd::Zero(sc.epn.n_buses, sc.horizon.dispatch_steps);
  auto st = oef::evaluate_monitored(sc, ctx, gas_inj, heat_inj, buses);

  for (const auto& row : rows) {
    double acc = 0.0;
    for (const auto& [var, coef] : row.entries) acc += coef * x[var];
    const int t = row.dispatch_step;
    if (row.gas) {
      const double direct = st.pressure(row.node, t) - sc.reference_pressure_at(t);
      // row.lo = p_min - ref - load_constant, so acc + load_constant = deviation
      const double via_row = acc + (sc.ngn.nodes[row.node].p_min -
                                    sc.reference_pressure_at(t) - row.lo);
      CHECK(via_row == Catch::Approx(direct).margin(1e-6 * std::max(1.0, std::abs(direct))));
    } else {
      const double direct = st.temperature(row.node, t);
      const double via_row = acc + (sc.dhn.nodes[row.node].t_min - row.lo);
      CHECK(via_row == Catch::Approx(direct).margin(1e-8 * std::max(1.0, std::abs(direct))));
    }
  }
}
