#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "oef/qp_model.hpp"

// Primal-dual interior-point method (Mehrotra predictor-corrector) for the
// convex QPs produced by the model builders:
//
//   min 1/2 x'Qx + c'x   s.t.  A x = b,  G x + s = h,  s >= 0
//
// Equalities collect rows with lo == hi plus fixed variables; every finite
// row side and variable bound contributes one inequality row. The Newton
// systems are solved through a single symbolic LDL^T factorization of the
// quasi-definite KKT matrix with static regularization and iterative
// refinement against the unregularized system. Problem data is Ruiz-
// equilibrated internally; convergence is always judged on unscaled
// residuals, so reported solutions honor the caller's tolerances.

namespace oef {

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericalTrouble,
  kIterationLimit,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalTrouble: return "numerical-trouble";
    case SolveStatus::kIterationLimit: return "iteration-limit";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericalTrouble;
  std::vector<double> x;  // present iff optimal
  std::vector<double> eq_duals, in_duals, slacks;  // standard-form order
  double objective = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  int iterations = 0;
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double relative_gap = std::numeric_limits<double>::infinity();
};

struct IpmOptions {
  double feas_tol = 1e-8;   // primal feasibility, scaled, per row
  double gap_tol = 1e-8;    // relative complementarity gap
  double dual_tol = 1e-6;   // stationarity, scaled, per gradient component
  int max_iterations = 120;
  bool verbose = false;
};

namespace detail {

struct StandardForm {
  int n = 0, me = 0, mi = 0;
  Eigen::SparseMatrix<double> a, g;      // unscaled
  Eigen::VectorXd b, h, q, c;            // q = Hessian diagonal
  double c0 = 0.0;
};

inline StandardForm to_standard_form(const QpModel& model) {
  StandardForm sf;
  sf.n = model.variable_count();
  const auto& lb = model.lower_bounds();
  const auto& ub = model.upper_bounds();
  auto qd = model.quad_diag();
  auto lin = model.linear();
  // model semantics: quad_diag[i] * x_i^2, so the Hessian diagonal is twice that
  sf.q = 2.0 * Eigen::Map<Eigen::VectorXd>(qd.data(), sf.n);
  sf.c = Eigen::Map<Eigen::VectorXd>(lin.data(), sf.n);
  sf.c0 = model.constant();

  std::vector<Eigen::Triplet<double>> ta, tg;
  std::vector<double> bv, hv;
  auto push_eq = [&](int row, int col, double val) { ta.emplace_back(row, col, val); };

  // fixed variables enter as equalities so both slacks never pinch
  for (int i = 0; i < sf.n; ++i) {
    if (lb[i] == ub[i] && std::isfinite(lb[i])) {
      push_eq(static_cast<int>(bv.size()), i, 1.0);
      bv.push_back(lb[i]);
    }
  }
  for (const auto& row : model.rows()) {
    const auto* cols = model.row_cols().data() + row.offset;
    const auto* vals = model.row_vals().data() + row.offset;
    if (row.lo == row.hi) {
      const int r = static_cast<int>(bv.size());
      for (int k = 0; k < row.nnz; ++k) push_eq(r, cols[k], vals[k]);
      bv.push_back(row.lo);
    } else {
      if (std::isfinite(row.hi)) {
        const int r = static_cast<int>(hv.size());
        for (int k = 0; k < row.nnz; ++k) tg.emplace_back(r, cols[k], vals[k]);
        hv.push_back(row.hi);
      }
      if (std::isfinite(row.lo)) {
        const int r = static_cast<int>(hv.size());
        for (int k = 0; k < row.nnz; ++k) tg.emplace_back(r, cols[k], -vals[k]);
        hv.push_back(-row.lo);
      }
    }
  }
  for (int i = 0; i < sf.n; ++i) {
    if (lb[i] == ub[i]) continue;
    if (std::isfinite(ub[i])) {
      tg.emplace_back(static_cast<int>(hv.size()), i, 1.0);
      hv.push_back(ub[i]);
    }
    if (std::isfinite(lb[i])) {
      tg.emplace_back(static_cast<int>(hv.size()), i, -1.0);
      hv.push_back(-lb[i]);
    }
  }
  sf.me = static_cast<int>(bv.size());
  sf.mi = static_cast<int>(hv.size());
  sf.a.resize(sf.me, sf.n);
  sf.a.setFromTriplets(ta.begin(), ta.end());
  sf.g.resize(sf.mi, sf.n);
  sf.g.setFromTriplets(tg.begin(), tg.end());
  sf.b = Eigen::Map<Eigen::VectorXd>(bv.data(), sf.me);
  sf.h = Eigen::Map<Eigen::VectorXd>(hv.data(), sf.mi);
  return sf;
}

// Ruiz equilibration of the stacked constraint matrix; returns column and
// row scalings (applied as diag(e) * M * diag(d)).
inline void ruiz_scaling(const StandardForm& sf, const Eigen::VectorXd& d_init,
                         Eigen::VectorXd& d, Eigen::VectorXd& ea,
                         Eigen::VectorXd& eg, int passes = 10) {
  d = d_init;
  ea = Eigen::VectorXd::Ones(sf.me);
  eg = Eigen::VectorXd::Ones(sf.mi);
  for (int pass = 0; pass < passes; ++pass) {
    Eigen::VectorXd col_max = Eigen::VectorXd::Zero(sf.n);
    Eigen::VectorXd row_max_a = Eigen::VectorXd::Zero(sf.me);
    Eigen::VectorXd row_max_g = Eigen::VectorXd::Zero(sf.mi);
    for (int j = 0; j < sf.a.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.a, j); it; ++it) {
        const double v = std::abs(it.value()) * d(it.col()) * ea(it.row());
        col_max(it.col()) = std::max(col_max(it.col()), v);
        row_max_a(it.row()) = std::max(row_max_a(it.row()), v);
      }
    for (int j = 0; j < sf.g.outerSize(); ++j)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.g, j); it; ++it) {
        const double v = std::abs(it.value()) * d(it.col()) * eg(it.row());
        col_max(it.col()) = std::max(col_max(it.col()), v);
        row_max_g(it.row()) = std::max(row_max_g(it.row()), v);
      }
    for (int i = 0; i < sf.n; ++i)
      if (col_max(i) > 0.0) d(i) /= std::sqrt(col_max(i));
    for (int i = 0; i < sf.me; ++i)
      if (row_max_a(i) > 0.0) ea(i) /= std::sqrt(row_max_a(i));
    for (int i = 0; i < sf.mi; ++i)
      if (row_max_g(i) > 0.0) eg(i) /= std::sqrt(row_max_g(i));
  }
}

}  // namespace detail

inline SolveResult solve_qp(const QpModel& model, const IpmOptions& opt = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto finish = [&](SolveResult r) {
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
  };

  SolveResult res;
  if (!model.bounds_consistent() || model.empty_row_conflict()) {
    res.status = SolveStatus::kInfeasible;
    return finish(res);
  }

  const auto sf = detail::to_standard_form(model);
  const int n = sf.n, me = sf.me, mi = sf.mi;
  if (n == 0) {
    res.status = SolveStatus::kOptimal;
    res.objective = sf.c0;
    res.relative_gap = res.primal_residual = res.dual_residual = 0.0;
    return finish(res);
  }

  // --- scaling ---
  // seed variable scales from bound magnitudes so right-hand sides land
  // near unity after the row equilibration
  Eigen::VectorXd d_init = Eigen::VectorXd::Ones(n);
  {
    const auto& lb = model.lower_bounds();
    const auto& ub = model.upper_bounds();
    for (int i = 0; i < n; ++i) {
      double mag = 1.0;
      if (std::isfinite(lb[i])) mag = std::max(mag, std::abs(lb[i]));
      if (std::isfinite(ub[i])) mag = std::max(mag, std::abs(ub[i]));
      d_init(i) = mag;
    }
  }
  Eigen::VectorXd d, ea, eg;
  detail::ruiz_scaling(sf, d_init, d, ea, eg);
  Eigen::SparseMatrix<double> as = ea.asDiagonal() * sf.a * d.asDiagonal();
  Eigen::SparseMatrix<double> gs = eg.asDiagonal() * sf.g * d.asDiagonal();
  Eigen::VectorXd bs = ea.cwiseProduct(sf.b);
  Eigen::VectorXd hs = eg.cwiseProduct(sf.h);
  Eigen::VectorXd qs = sf.q.cwiseProduct(d.cwiseProduct(d));
  Eigen::VectorXd cs = sf.c.cwiseProduct(d);
  // bring the objective gradient to O(1) in scaled space; tiny physical
  // cost coefficients otherwise leave the dual equations numerically mute
  double grad_mag = std::max(qs.size() ? qs.cwiseAbs().maxCoeff() : 0.0,
                             cs.size() ? cs.cwiseAbs().maxCoeff() : 0.0);
  double cost_scale = (grad_mag > 0.0) ? 1.0 / grad_mag : 1.0;
  cost_scale = std::clamp(cost_scale, 1e-8, 1e12);
  qs *= cost_scale;
  cs *= cost_scale;

  // --- KKT skeleton ---
  const int dim = n + me + mi;
  double reg = 1e-8;
  std::vector<Eigen::Triplet<double>> tk;
  tk.reserve(static_cast<size_t>(n + me + mi) + 2 * as.nonZeros() + 2 * gs.nonZeros());
  for (int i = 0; i < n; ++i) tk.emplace_back(i, i, qs(i) + reg);
  for (int j = 0; j < as.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(as, j); it; ++it) {
      tk.emplace_back(n + it.row(), it.col(), it.value());
      tk.emplace_back(it.col(), n + it.row(), it.value());
    }
  for (int i = 0; i < me; ++i) tk.emplace_back(n + i, n + i, -reg);
  for (int j = 0; j < gs.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(gs, j); it; ++it) {
      tk.emplace_back(n + me + it.row(), it.col(), it.value());
      tk.emplace_back(it.col(), n + me + it.row(), it.value());
    }
  for (int i = 0; i < mi; ++i) tk.emplace_back(n + me + i, n + me + i, -1.0);
  Eigen::SparseMatrix<double> kkt(dim, dim);
  kkt.setFromTriplets(tk.begin(), tk.end());
  kkt.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  ldlt.analyzePattern(kkt);

  // diagonal slots for the regularization refresh
  std::vector<long> diag_pos(dim, -1);
  for (int col = 0; col < dim; ++col)
    for (long k = kkt.outerIndexPtr()[col]; k < kkt.outerIndexPtr()[col + 1]; ++k)
      if (kkt.innerIndexPtr()[k] == col) {
        diag_pos[col] = k;
        break;
      }
  Eigen::VectorXd w_for_reg = Eigen::VectorXd::Ones(mi);
  auto refresh_diag = [&]() {
    double* vals = kkt.valuePtr();
    for (int i = 0; i < n; ++i) vals[diag_pos[i]] = qs(i) + reg;
    for (int i = 0; i < me; ++i) vals[diag_pos[n + i]] = -reg;
    for (int i = 0; i < mi; ++i) vals[diag_pos[n + me + i]] = -(w_for_reg(i) + reg);
  };
  // factorize, escalating the regularization if the pivoting-free LDL^T
  // breaks down
  auto factorize = [&]() {
    reg = 1e-8;
    for (int attempt = 0; attempt < 6; ++attempt) {
      refresh_diag();
      ldlt.factorize(kkt);
      if (ldlt.info() == Eigen::Success) return true;
      reg *= 100.0;
    }
    return false;
  };

  // exact (unregularized) KKT product for iterative refinement
  Eigen::VectorXd w_cur = Eigen::VectorXd::Ones(mi);
  auto apply_exact = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = kkt.selfadjointView<Eigen::Lower>() * v;
    out.head(n) -= reg * v.head(n);
    out.segment(n, me) += reg * v.segment(n, me);
    out.tail(mi) += reg * v.tail(mi);
    return out;
  };
  auto kkt_solve = [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd sol = ldlt.solve(rhs);
    double prev_norm = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 5; ++pass) {
      Eigen::VectorXd r = rhs - apply_exact(sol);
      const double rn = r.cwiseAbs().maxCoeff();
      if (rn < 1e-11 * (1.0 + rhs.cwiseAbs().maxCoeff()) || rn >= 0.5 * prev_norm) break;
      prev_norm = rn;
      sol += ldlt.solve(r);
    }
    return sol;
  };

  // --- Mehrotra starting point: least-squares KKT solve with unit slack
  // scaling, then shift the slack pair strictly inside the cone ---
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(mi);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(mi);

  // Active-set polish: once the interior point has identified which
  // inequalities bind, one equality-constrained KKT solve pins stationarity
  // to machine precision. Accepted only if the polished point verifies.
  auto try_polish = [&]() -> bool {
    std::vector<int> act;
    std::vector<int> act_pos(mi, -1);
    for (int i = 0; i < mi; ++i)
      if (s(i) <= z(i)) {
        act_pos[i] = static_cast<int>(act.size());
        act.push_back(i);
      }
    const int ma = static_cast<int>(act.size());
    const int dimp = n + me + ma;
    double dp = 1e-9;
    Eigen::SparseMatrix<double> kp(dimp, dimp);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> pldlt;
    bool factored = false;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt, dp *= 100.0) {
      std::vector<Eigen::Triplet<double>> tp;
      for (int i = 0; i < n; ++i) tp.emplace_back(i, i, qs(i) + dp);
      for (int j = 0; j < as.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(as, j); it; ++it) {
          tp.emplace_back(n + it.row(), it.col(), it.value());
          tp.emplace_back(it.col(), n + it.row(), it.value());
        }
      for (int i = 0; i < me; ++i) tp.emplace_back(n + i, n + i, -dp);
      for (int j = 0; j < gs.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gs, j); it; ++it) {
          const int pos = act_pos[it.row()];
          if (pos < 0) continue;
          tp.emplace_back(n + me + pos, it.col(), it.value());
          tp.emplace_back(it.col(), n + me + pos, it.value());
        }
      for (int i = 0; i < ma; ++i) tp.emplace_back(n + me + i, n + me + i, -dp);
      kp.setFromTriplets(tp.begin(), tp.end());
      pldlt.compute(kp);
      factored = (pldlt.info() == Eigen::Success);
    }
    dp /= 100.0;  // value actually used
    if (!factored) {
      if (opt.verbose) std::fprintf(stderr, "      polish: factorization failed\n");
      return false;
    }
    Eigen::VectorXd prhs(dimp);
    prhs.head(n) = -cs;
    if (me) prhs.segment(n, me) = bs;
    for (int i = 0; i < ma; ++i) prhs(n + me + i) = hs(act[i]);
    auto apply_p = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd out = kp.selfadjointView<Eigen::Lower>() * v;
      out.head(n) -= dp * v.head(n);
      out.tail(me + ma) += dp * v.tail(me + ma);
      return out;
    };
    Eigen::VectorXd sol = pldlt.solve(prhs);
    for (int pass = 0; pass < 4; ++pass) {
      Eigen::VectorXd r = prhs - apply_p(sol);
      if (r.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + prhs.cwiseAbs().maxCoeff())) break;
      sol += pldlt.solve(r);
    }
    Eigen::VectorXd xp = sol.head(n);
    // verify in scaled space before accepting
    if (me && (as * xp - bs).cwiseAbs().maxCoeff() > 1e-8) {
      if (opt.verbose)
        std::fprintf(stderr, "      polish: eq residual %.2e\n",
                     (as * xp - bs).cwiseAbs().maxCoeff());
      return false;
    }
    Eigen::VectorXd slack_p;
    if (mi) {
      slack_p = hs - gs * xp;
      if (slack_p.minCoeff() < -1e-8) {
        if (opt.verbose)
          std::fprintf(stderr, "      polish: slack %.2e\n", slack_p.minCoeff());
        return false;
      }
    }
    for (int i = 0; i < ma; ++i)
      if (sol(n + me + i) < -1e-6) {
        if (opt.verbose) std::fprintf(stderr, "      polish: negative dual\n");
        return false;
      }
    if (opt.verbose) std::fprintf(stderr, "      polish: accepted (%d active)\n", ma);
    x = xp;
    if (me) y = sol.segment(n, me);
    if (mi) {
      z.setZero();
      for (int i = 0; i < ma; ++i) z(act[i]) = std::max(0.0, sol(n + me + i));
      s = slack_p.cwiseMax(1e-14);
    }
    return true;
  };
  bool polished = false;
  {
    w_for_reg.setOnes();
    if (!factorize()) {
      res.status = SolveStatus::kNumericalTrouble;
      return finish(res);
    }
    Eigen::VectorXd rhs0(dim);
    rhs0.head(n) = -cs;
    if (me) rhs0.segment(n, me) = bs;
    if (mi) rhs0.tail(mi) = hs;
    Eigen::VectorXd sol0 = ldlt.solve(rhs0);
    x = sol0.head(n);
    if (me) y = sol0.segment(n, me);
    if (mi) {
      Eigen::VectorXd z_raw = sol0.tail(mi);
      Eigen::VectorXd s_raw = hs - gs * x;
      const double shift_s = std::max(0.0, -1.5 * s_raw.minCoeff());
      const double shift_z = std::max(0.0, -1.5 * z_raw.minCoeff());
      s = s_raw.array() + shift_s;
      z = z_raw.array() + shift_z;
      const double dot = s.dot(z);
      const double s_sum = s.sum(), z_sum = z.sum();
      const double ds = (z_sum > 0) ? 0.5 * dot / z_sum : 1.0;
      const double dz = (s_sum > 0) ? 0.5 * dot / s_sum : 1.0;
      s.array() += ds + 1e-8;
      z.array() += dz + 1e-8;
    }
  }


  double best_primal = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    // ----- scaled KKT residuals (the problem is equilibrated to O(1)) -----
    Eigen::VectorXd qx = qs.cwiseProduct(x);
    Eigen::VectorXd aty = me ? (as.transpose() * y).eval() : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd gtz = mi ? (gs.transpose() * z).eval() : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rd = qx + cs + aty + gtz;
    Eigen::VectorXd re = me ? (as * x - bs).eval() : Eigen::VectorXd();
    Eigen::VectorXd ri = mi ? (gs * x + s - hs).eval() : Eigen::VectorXd();

    // per-column stationarity: the cancellation in each gradient component
    // is judged against the largest term that feeds that component, so
    // costless wide-range variables still get pinned tightly
    double r_dual = 0.0;
    {
      Eigen::VectorXd colterm = cs.cwiseAbs().cwiseMax(qx.cwiseAbs());
      for (int j = 0; j < as.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(as, j); it; ++it)
          colterm(it.col()) =
              std::max(colterm(it.col()), std::abs(it.value() * y(it.row())));
      for (int j = 0; j < gs.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(gs, j); it; ++it)
          colterm(it.col()) =
              std::max(colterm(it.col()), std::abs(it.value() * z(it.row())));
      for (int i = 0; i < n; ++i)
        r_dual = std::max(r_dual, std::abs(rd(i)) / (1.0 + colterm(i)));
    }
    // per-row primal residuals, each judged against its own right-hand side
    // and largest summand
    auto row_residual = [&](const Eigen::SparseMatrix<double>& mat,
                            const Eigen::VectorXd& rhs, const Eigen::VectorXd& resid) {
      Eigen::VectorXd term = Eigen::VectorXd::Zero(mat.rows());
      for (int j = 0; j < mat.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, j); it; ++it)
          term(it.row()) =
              std::max(term(it.row()), std::abs(it.value() * x(it.col())));
      double worst = 0.0;
      for (int i = 0; i < mat.rows(); ++i)
        worst = std::max(worst,
                         std::abs(resid(i)) / (1.0 + std::abs(rhs(i)) + term(i)));
      return worst;
    };
    const double r_eq = me ? row_residual(as, bs, re) : 0.0;
    const double r_in = mi ? row_residual(gs, hs, ri) : 0.0;

    const double obj =
        (0.5 * x.dot(qs.cwiseProduct(x)) + cs.dot(x)) / cost_scale + sf.c0;
    const double comp = mi ? s.dot(z) / cost_scale : 0.0;
    const double rel_gap = std::abs(comp) / (1.0 + std::abs(obj));

    res.iterations = iter;
    res.primal_residual = std::max(r_eq, r_in);
    res.dual_residual = r_dual;
    res.relative_gap = rel_gap;

    if (opt.verbose)
      std::fprintf(stderr, "ipm %3d  obj %+.8e  pri %.2e  dua %.2e  gap %.2e  mu %.2e\n",
                   iter, obj, res.primal_residual, r_dual, rel_gap,
                   mi ? s.dot(z) / mi : 0.0);

    if (res.primal_residual <= opt.feas_tol && r_dual <= opt.dual_tol &&
        rel_gap <= opt.gap_tol) {
      if (!polished) {
        polished = true;
        if (try_polish()) continue;  // re-audit the sharpened point
      }
      res.status = SolveStatus::kOptimal;
      res.objective = obj;
      Eigen::VectorXd xu = d.cwiseProduct(x);
      res.x.assign(xu.data(), xu.data() + n);
      Eigen::VectorXd yu = me ? (ea.cwiseProduct(y) / cost_scale).eval() : Eigen::VectorXd();
      Eigen::VectorXd zu = mi ? (eg.cwiseProduct(z) / cost_scale).eval() : Eigen::VectorXd();
      Eigen::VectorXd su = mi ? (s.cwiseQuotient(eg)).eval() : Eigen::VectorXd();
      res.eq_duals.assign(yu.data(), yu.data() + me);
      res.in_duals.assign(zu.data(), zu.data() + mi);
      res.slacks.assign(su.data(), su.data() + mi);
      return finish(res);
    }
    if (iter == opt.max_iterations) {
      if (!polished) {
        polished = true;
        if (try_polish()) continue;
      }
      res.status = SolveStatus::kIterationLimit;
      return finish(res);
    }

    // stall/divergence heuristics on the combined optimality error
    const double combined_err = std::max({res.primal_residual, r_dual, rel_gap});
    if (combined_err < best_primal * 0.99) {
      best_primal = combined_err;
      stalled = 0;
    } else {
      ++stalled;
    }
    const double dual_mag =
        std::max(me ? y.cwiseAbs().maxCoeff() : 0.0, mi ? z.cwiseAbs().maxCoeff() : 0.0);
    if ((dual_mag > 1e12 || (stalled > 8 && dual_mag > 1e6)) &&
        res.primal_residual > 1e2 * opt.feas_tol) {
      // Farkas-style certificate: a multiplier combination annihilating the
      // constraint gradients while separating the right-hand sides
      double support = (me ? bs.dot(y) : 0.0) + (mi ? hs.dot(z) : 0.0);
      Eigen::VectorXd ray = Eigen::VectorXd::Zero(n);
      if (me) ray += as.transpose() * y;
      if (mi) ray += gs.transpose() * z;
      const bool annihilates = ray.cwiseAbs().maxCoeff() < 1e-6 * dual_mag;
      const bool separates =
          mi == 0 ? std::abs(support) > 1e-8 * dual_mag : support < -1e-8 * dual_mag;
      if (annihilates && separates) {
        res.status = SolveStatus::kInfeasible;
        return finish(res);
      }
    }
    if (x.cwiseAbs().maxCoeff() > 1e13) {
      res.status = (obj < -1e12) ? SolveStatus::kUnbounded : SolveStatus::kNumericalTrouble;
      return finish(res);
    }
    if (stalled > 20) {
      if (!polished) {
        polished = true;
        stalled = 0;
        if (try_polish()) continue;
      }
      res.status = SolveStatus::kNumericalTrouble;
      return finish(res);
    }

    // ----- factorization -----
    for (int r = 0; r < mi; ++r) w_cur(r) = s(r) / z(r);
    w_for_reg = w_cur;
    if (!factorize()) {
      res.status = SolveStatus::kNumericalTrouble;
      return finish(res);
    }

    Eigen::VectorXd rhs(dim);
    rhs.head(n) = -rd;
    if (me) rhs.segment(n, me) = -re;
    if (mi) rhs.tail(mi) = -ri + s;

    auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = 1.0;
      for (int i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
      return a;
    };

    // predictor
    Eigen::VectorXd sol = kkt_solve(rhs);
    Eigen::VectorXd dx = sol.head(n);
    Eigen::VectorXd dy = me ? sol.segment(n, me).eval() : Eigen::VectorXd();
    Eigen::VectorXd dz = mi ? sol.tail(mi).eval() : Eigen::VectorXd();
    Eigen::VectorXd ds = mi ? (-s - w_cur.cwiseProduct(dz)).eval() : Eigen::VectorXd();

    if (mi) {
      const double mu = s.dot(z) / mi;
      const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
      const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / mi;
      double sigma = std::pow(std::max(0.0, mu_aff / std::max(mu, 1e-300)), 3.0);
      // keep the barrier parameter from collapsing below the feasibility
      // residuals; extreme slack ratios otherwise wreck the Newton systems
      const double resid_scaled =
          std::max(me ? re.cwiseAbs().maxCoeff() : 0.0,
                   mi ? ri.cwiseAbs().maxCoeff() : 0.0);
      sigma = std::max(sigma,
                       std::min(0.9, 0.01 * resid_scaled / std::max(mu, 1e-300)));

      // corrector: complementarity target sigma*mu - Mehrotra correction
      Eigen::VectorXd zinv_rc =
          -s + (sigma * mu * Eigen::VectorXd::Ones(mi) - ds.cwiseProduct(dz))
                   .cwiseQuotient(z);
      rhs.tail(mi) = -ri - zinv_rc;
      sol = kkt_solve(rhs);
      dx = sol.head(n);
      if (me) dy = sol.segment(n, me);
      dz = sol.tail(mi);
      ds = zinv_rc - w_cur.cwiseProduct(dz);

      const double eta = 0.995;
      double a_pri = std::min(1.0, eta * max_step(s, ds));
      double a_dua = std::min(1.0, eta * max_step(z, dz));
      if (opt.verbose) {
        int iworst_e = -1, iworst_i = -1;
        double we = 0, wi = 0;
        if (me) we = re.cwiseAbs().maxCoeff(&iworst_e);
        if (mi) wi = ri.cwiseAbs().maxCoeff(&iworst_i);
        std::fprintf(stderr,
                     "      sigma %.2e  a_pri %.3e  a_dua %.3e  re %.2e@%d  ri %.2e@%d\n",
                     sigma, a_pri, a_dua, we, iworst_e, wi, iworst_i);
      }
      // keep primal and dual progress coupled while stationarity still lags,
      // so centrality is not destroyed before the duals settle
      if (rd.cwiseAbs().maxCoeff() > 1e2 * std::max(mu, 1e-300))
        a_pri = a_dua = std::min(a_pri, a_dua);
      x += a_pri * dx;
      s += a_pri * ds;
      if (me) y += a_dua * dy;
      z += a_dua * dz;
    } else {
      // no inequalities: plain Newton step on the equality KKT system
      x += dx;
      if (me) y += dy;
    }
  }
  res.status = SolveStatus::kNumericalTrouble;
  return finish(res);
}

}  // namespace oef
