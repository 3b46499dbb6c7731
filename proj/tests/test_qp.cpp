#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oef/qp_model.hpp"
#include "oef/qp_solver.hpp"

using oef::QpModel;
using oef::RowLabel;
using oef::SolveStatus;

TEST_CASE("textbook box qp") {
  QpModel m;
  int x = m.add_variable("x", 3.0, oef::kInf);
  m.add_quadratic_cost(x, 1.0);
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.x[0] == Catch::Approx(3.0).margin(1e-6));
  CHECK(r.objective == Catch::Approx(9.0).margin(1e-5));
}

TEST_CASE("contradictory bounds are infeasible") {
  QpModel m;
  int x = m.add_variable("x");
  m.tighten_bounds(x, 1.0, oef::kInf);
  m.tighten_bounds(x, -oef::kInf, 0.0);
  m.add_quadratic_cost(x, 1.0);
  auto r = oef::solve_qp(m);
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK(r.x.empty());
}

TEST_CASE("conflicting equality rows are infeasible") {
  QpModel m;
  int x = m.add_variable("x");
  int y = m.add_variable("y");
  m.add_quadratic_cost(x, 1.0);
  m.add_quadratic_cost(y, 1.0);
  m.add_equality(RowLabel::kBalance, 1.0, {{x, 1.0}, {y, 1.0}});
  m.add_equality(RowLabel::kBalance, 3.0, {{x, 1.0}, {y, 1.0}});
  auto r = oef::solve_qp(m);
  CHECK(r.status == SolveStatus::kInfeasible);
}

TEST_CASE("equality qp has the analytic least-norm solution") {
  QpModel m;
  std::vector<int> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(m.add_variable("x" + std::to_string(i)));
  for (int v : xs) m.add_quadratic_cost(v, 0.5);
  std::vector<std::pair<int, double>> row;
  for (int v : xs) row.emplace_back(v, 1.0);
  m.add_equality(RowLabel::kBalance, 10.0, row);
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  for (int i = 0; i < 5; ++i) CHECK(r.x[i] == Catch::Approx(2.0).margin(1e-7));
}

TEST_CASE("fixed variables and pinned ranges") {
  QpModel m;
  int x = m.add_variable("x", 4.0, 4.0);
  int y = m.add_variable("y", 0.0, 10.0);
  m.add_quadratic_cost(y, 1.0);
  m.add_linear_cost(y, -4.0);
  m.add_equality(RowLabel::kCoupling, 6.0, {{x, 1.0}, {y, 0.0}, {y, 1.0}});
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.x[0] == Catch::Approx(4.0).margin(1e-8));
  CHECK(r.x[1] == Catch::Approx(2.0).margin(1e-7));
}

TEST_CASE("single-variable rows become bounds") {
  QpModel m;
  int x = m.add_variable("x");
  m.add_quadratic_cost(x, 1.0);
  m.add_linear_cost(x, -10.0);
  m.add_row(RowLabel::kEpnSecurity, -oef::kInf, 4.0, {{x, 2.0}});
  CHECK(m.rows().empty());
  CHECK(m.upper_bounds()[0] == Catch::Approx(2.0));
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.x[0] == Catch::Approx(2.0).margin(1e-6));

  // negative coefficient flips the side
  QpModel m2;
  int w = m2.add_variable("w");
  m2.add_row(RowLabel::kEpnSecurity, -oef::kInf, -6.0, {{w, -3.0}});
  CHECK(m2.lower_bounds()[0] == Catch::Approx(2.0));
}

TEST_CASE("range rows and ramp-style constraints") {
  QpModel m;
  int a = m.add_variable("a", 0.0, 10.0);
  int b = m.add_variable("b", 0.0, 10.0);
  m.add_quadratic_cost(a, 1.0);
  m.add_quadratic_cost(b, 1.0);
  m.add_linear_cost(a, -20.0);  // wants a = 10
  m.add_linear_cost(b, -2.0);   // wants b = 1
  m.add_row(RowLabel::kRamping, -3.0, 3.0, {{a, 1.0}, {b, -1.0}});
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  // optimum pushes the ramp to its upper side
  CHECK(r.x[0] - r.x[1] == Catch::Approx(3.0).margin(1e-6));
}

TEST_CASE("random sparse qps satisfy kkt residuals") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 30, me = 8, mi = 18;
    QpModel m;
    for (int i = 0; i < n; ++i)
      m.add_variable("x" + std::to_string(i), -20.0, 20.0);
    for (int i = 0; i < n; ++i) {
      m.add_quadratic_cost(i, 0.05 + 0.5 * std::abs(u(rng)));
      m.add_linear_cost(i, u(rng));
    }
    for (int r = 0; r < me; ++r) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < 5; ++k) row.emplace_back(rng() % n, u(rng) + 2.0);
      m.add_equality(RowLabel::kBalance, u(rng), row);
    }
    for (int r = 0; r < mi; ++r) {
      std::vector<std::pair<int, double>> row;
      for (int k = 0; k < 4; ++k) row.emplace_back(rng() % n, u(rng));
      m.add_row(RowLabel::kEpnSecurity, -5.0 - std::abs(u(rng)), 5.0 + std::abs(u(rng)),
                row);
    }
    auto r = oef::solve_qp(m);
    REQUIRE(r.status == SolveStatus::kOptimal);
    // independent residual audit straight off the model rows
    CHECK(m.max_row_violation(r.x) < 1e-6);
    for (int i = 0; i < n; ++i) {
      CHECK(r.x[i] >= m.lower_bounds()[i] - 1e-7);
      CHECK(r.x[i] <= m.upper_bounds()[i] + 1e-7);
    }
    CHECK(r.primal_residual < 1e-8);
    CHECK(r.dual_residual < 1e-8);
    CHECK(r.relative_gap < 1e-8);
  }
}

TEST_CASE("determinism across repeated solves") {
  QpModel m;
  for (int i = 0; i < 12; ++i) m.add_variable("x" + std::to_string(i), -3.0, 7.0);
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    m.add_quadratic_cost(i, 0.3 + std::abs(u(rng)));
    m.add_linear_cost(i, u(rng));
  }
  for (int r = 0; r < 6; ++r)
    m.add_row(RowLabel::kBalance, -2.0, 2.0,
              {{(r * 3) % 12, 1.0}, {(r * 5 + 1) % 12, -0.5}, {(r * 7 + 2) % 12, 0.25}});
  auto r1 = oef::solve_qp(m);
  auto r2 = oef::solve_qp(m);
  REQUIRE(r1.status == SolveStatus::kOptimal);
  REQUIRE(r2.status == SolveStatus::kOptimal);
  CHECK(r1.objective == r2.objective);
  for (size_t i = 0; i < r1.x.size(); ++i) CHECK(r1.x[i] == r2.x[i]);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("badly scaled data still converges") {
  // mimics SI magnitudes: powers ~1e8 against coefficients ~1e-12
  QpModel m;
  int p1 = m.add_variable("p1", 0.0, 3e8);
  int p2 = m.add_variable("p2", 0.0, 2e8);
  m.add_quadratic_cost(p1, 4e-12);
  m.add_linear_cost(p1, 3.2e-5);
  m.add_quadratic_cost(p2, 9e-12);
  m.add_linear_cost(p2, 2.1e-5);
  m.add_equality(RowLabel::kBalance, 2.5e8, {{p1, 1.0}, {p2, 1.0}});
  auto r = oef::solve_qp(m);
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.x[0] + r.x[1] == Catch::Approx(2.5e8).epsilon(1e-8));
  // analytic optimum of the two-generator dispatch
  // d/dp [4e-12 p^2 + 3.2e-5 p + 9e-12 (D-p)^2 + 2.1e-5 (D-p)] = 0
  const double p_opt = (2.0 * 9e-12 * 2.5e8 + 2.1e-5 - 3.2e-5) / (2.0 * (4e-12 + 9e-12));
  CHECK(r.x[0] == Catch::Approx(p_opt).epsilon(1e-6));
}

TEST_CASE("stats follow the bounds convention") {
  QpModel m;
  int a = m.add_variable("a");
  int b = m.add_variable("b");
  m.add_row(RowLabel::kCoupling, 0.0, 0.0, {{a, 1.0}, {b, -2.0}});
  m.add_row(RowLabel::kEpnSecurity, -oef::kInf, 5.0, {{a, 1.0}});  // becomes a bound
  auto s = m.stats();
  CHECK(s.variables == 2);
  CHECK(s.constraints == 1);
  CHECK(s.nonzeros == 2);
  CHECK(s.density == Catch::Approx(1.0));
  CHECK(s.rows_per_label.at("coupling") == 1);
  CHECK(s.rows_per_label.count("epn-security") == 0);
}
