#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <stdexcept>
#include <vector>

#include "oef/circuit.hpp"
#include "oef/topology.hpp"

// Assembly of the frequency-dependent network matrices: the generalized
// node admittance matrix of a gas network (each pipe expands to a series
// branch with its controlled source plus two shunt branches to ground, the
// ground being absorbed into the diagonal), the generalized branch
// admittance matrix of a heating network, their impedance counterparts, and
// the DC power-flow PTDF.

namespace oef {

using SparseComplex = Eigen::SparseMatrix<Complex>;

struct GasBranchModel {
  int from = -1;
  int to = -1;
  LumpedPi pi;
};

struct HeatBranchModel {
  int from = -1;
  int to = -1;
  Complex transmission;  // phi
  double heat_capacity_flow = 0.0;  // c_p * m
};

// Eq-(16)-style assembly over the expanded branch set. Written as the
// actual matrix product so the entrywise hand-assembly oracle in the tests
// stays independent.
inline SparseComplex gas_node_admittance(int n_nodes,
                                         const std::vector<GasBranchModel>& pipes) {
  const int np = static_cast<int>(pipes.size());
  const int nb = 3 * np;  // series + two ground shunts per pipe
  std::vector<Eigen::Triplet<Complex>> ta, tout, ty, tk;
  for (int p = 0; p < np; ++p) {
    const auto& gb = pipes[p];
    if (gb.from < 0 || gb.from >= n_nodes || gb.to < 0 || gb.to >= n_nodes)
      throw std::invalid_argument("gas_node_admittance: branch references unknown node");
    const int series = 3 * p, sh_from = 3 * p + 1, sh_to = 3 * p + 2;
    const Complex y_series = Complex{1.0, 0.0} / gb.pi.series_impedance;
    // series branch: from -> to, with the pressure-controlled source
    ta.emplace_back(gb.from, series, Complex{1, 0});
    ta.emplace_back(gb.to, series, Complex{-1, 0});
    tout.emplace_back(gb.from, series, Complex{1, 0});
    ty.emplace_back(series, series, y_series);
    tk.emplace_back(series, series, gb.pi.source_gain);
    // shunt branches to ground: only the node-side incidence entry exists
    ta.emplace_back(gb.from, sh_from, Complex{1, 0});
    tout.emplace_back(gb.from, sh_from, Complex{1, 0});
    ty.emplace_back(sh_from, sh_from, gb.pi.shunt_from);
    ta.emplace_back(gb.to, sh_to, Complex{1, 0});
    tout.emplace_back(gb.to, sh_to, Complex{1, 0});
    ty.emplace_back(sh_to, sh_to, gb.pi.shunt_to);
  }
  SparseComplex a(n_nodes, nb), a_out(n_nodes, nb), yb(nb, nb), kb(nb, nb);
  a.setFromTriplets(ta.begin(), ta.end());
  a_out.setFromTriplets(tout.begin(), tout.end());
  yb.setFromTriplets(ty.begin(), ty.end());
  kb.setFromTriplets(tk.begin(), tk.end());
  SparseComplex y_n = a * yb * SparseComplex(a.transpose()) -
                      a * yb * kb * SparseComplex(a_out.transpose());
  y_n.prune(Complex{0, 0});
  y_n.makeCompressed();
  return y_n;
}

inline std::vector<GasBranchModel> gas_branch_models(
    const std::vector<Branch>& pipes, const std::vector<GasLineParams>& params,
    const std::vector<double>& lengths, double omega) {
  if (pipes.size() != params.size() || pipes.size() != lengths.size())
    throw std::invalid_argument("gas_branch_models: size mismatch");
  std::vector<GasBranchModel> out(pipes.size());
  for (size_t i = 0; i < pipes.size(); ++i) {
    out[i].from = pipes[i].from;
    out[i].to = pipes[i].to;
    out[i].pi = gas_lumped(gas_two_port(params[i], omega, lengths[i]));
  }
  return out;
}

// Y_h,b = (I - A~+^T A- Phi) diag(c_p m). The factored pieces stay sparse;
// the matrix is assembled per frequency.
inline SparseComplex heat_branch_admittance(const IncidenceSet& inc,
                                            const std::vector<HeatBranchModel>& branches) {
  const int nb = static_cast<int>(branches.size());
  if (inc.a_out_weight.rows() == 0)
    throw std::invalid_argument("heat_branch_admittance: incidence lacks flow weights");
  if (inc.a.cols() != nb)
    throw std::invalid_argument("heat_branch_admittance: branch count mismatch");
  SparseComplex phi(nb, nb), cpm(nb, nb);
  std::vector<Eigen::Triplet<Complex>> tphi, tcpm;
  for (int j = 0; j < nb; ++j) {
    tphi.emplace_back(j, j, branches[j].transmission);
    tcpm.emplace_back(j, j, Complex{branches[j].heat_capacity_flow, 0.0});
  }
  phi.setFromTriplets(tphi.begin(), tphi.end());
  cpm.setFromTriplets(tcpm.begin(), tcpm.end());
  SparseComplex weight_t = inc.a_out_weight.cast<Complex>().transpose();
  SparseComplex a_in_c = inc.a_in.cast<Complex>();
  SparseComplex eye(nb, nb);
  eye.setIdentity();
  SparseComplex y = (eye - weight_t * a_in_c * phi) * cpm;
  y.makeCompressed();
  return y;
}

struct ImpedanceMatrix {
  Eigen::MatrixXcd z;       // node x node; reference row/col zero for gas
  int reference_node = -1;  // -1 for heating networks
};

// Dense inverse of the admittance with the reference row/column removed;
// the reference maps to zero response.
inline ImpedanceMatrix gas_node_impedance(const SparseComplex& y_n, int reference_node) {
  const int n = static_cast<int>(y_n.rows());
  if (reference_node < 0 || reference_node >= n)
    throw std::invalid_argument("gas_node_impedance: bad reference node");
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(y_n);
  Eigen::MatrixXcd reduced(n - 1, n - 1);
  for (int i = 0, ir = 0; i < n; ++i) {
    if (i == reference_node) continue;
    for (int j = 0, jc = 0; j < n; ++j) {
      if (j == reference_node) continue;
      reduced(ir, jc) = dense(i, j);
      ++jc;
    }
    ++ir;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(reduced);
  Eigen::MatrixXcd z_red = lu.solve(Eigen::MatrixXcd::Identity(n - 1, n - 1));
  const double residual = (reduced * z_red - Eigen::MatrixXcd::Identity(n - 1, n - 1))
                              .cwiseAbs()
                              .maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-8)
    throw std::runtime_error(
        "gas_node_impedance: reduced admittance is singular or ill-conditioned "
        "(disconnected component without a reference?)");
  ImpedanceMatrix out;
  out.reference_node = reference_node;
  out.z = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0, ir = 0; i < n; ++i) {
    if (i == reference_node) continue;
    for (int j = 0, jc = 0; j < n; ++j) {
      if (j == reference_node) continue;
      out.z(i, j) = z_red(ir, jc);
      ++jc;
    }
    ++ir;
  }
  return out;
}

// Z_h,n = A~+ Y_h,b^{-1} A~+^T via dense LU with partial pivoting.
inline ImpedanceMatrix heat_node_impedance(const SparseComplex& y_hb,
                                           const IncidenceSet& inc) {
  const int nb = static_cast<int>(y_hb.rows());
  const int n = static_cast<int>(inc.a_out_weight.rows());
  Eigen::MatrixXcd dense = Eigen::MatrixXcd(y_hb);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dense);
  Eigen::MatrixXcd weight_t = inc.a_out_weight.cast<Complex>().transpose();
  Eigen::MatrixXcd solved = lu.solve(weight_t);  // Y^{-1} A~+^T
  const double residual = (dense * solved - weight_t).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-8)
    throw std::runtime_error("heat_node_impedance: branch admittance is singular");
  ImpedanceMatrix out;
  out.z = inc.a_out_weight.cast<Complex>() * solved;
  (void)nb;
  return out;
}

struct PowerLineModel {
  int from = -1;
  int to = -1;
  double reactance = 0.0;
};

struct PtdfMatrix {
  Eigen::MatrixXd rows;  // line x bus sensitivities
  int slack_bus = 0;
};

inline PtdfMatrix compute_ptdf(int n_buses, const std::vector<PowerLineModel>& lines,
                               int slack_bus) {
  if (slack_bus < 0 || slack_bus >= n_buses)
    throw std::invalid_argument("compute_ptdf: bad slack bus");
  std::vector<Branch> branches(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (!(lines[i].reactance > 0.0))
      throw std::invalid_argument("compute_ptdf: non-positive reactance");
    branches[i] = {lines[i].from, lines[i].to};
  }
  check_branches(n_buses, branches);
  if (!is_connected(n_buses, branches))
    throw std::invalid_argument("compute_ptdf: power network is disconnected");

  const int nl = static_cast<int>(lines.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_buses, n_buses);
  for (const auto& l : lines) {
    const double s = 1.0 / l.reactance;
    b(l.from, l.from) += s;
    b(l.to, l.to) += s;
    b(l.from, l.to) -= s;
    b(l.to, l.from) -= s;
  }
  Eigen::MatrixXd b_red(n_buses - 1, n_buses - 1);
  for (int i = 0, ir = 0; i < n_buses; ++i) {
    if (i == slack_bus) continue;
    for (int j = 0, jc = 0; j < n_buses; ++j) {
      if (j == slack_bus) continue;
      b_red(ir, jc) = b(i, j);
      ++jc;
    }
    ++ir;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b_red);
  // bus angles for a unit injection at each non-slack bus
  Eigen::MatrixXd theta_red = lu.solve(Eigen::MatrixXd::Identity(n_buses - 1, n_buses - 1));
  const double residual =
      (b_red * theta_red - Eigen::MatrixXd::Identity(n_buses - 1, n_buses - 1))
          .cwiseAbs()
          .maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-8)
    throw std::runtime_error("compute_ptdf: susceptance matrix is singular");
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(n_buses, n_buses);
  for (int i = 0, ir = 0; i < n_buses; ++i) {
    if (i == slack_bus) continue;
    for (int j = 0, jc = 0; j < n_buses; ++j) {
      if (j == slack_bus) continue;
      theta(i, j) = theta_red(ir, jc);
      ++jc;
    }
    ++ir;
  }
  PtdfMatrix out;
  out.slack_bus = slack_bus;
  out.rows.resize(nl, n_buses);
  for (int l = 0; l < nl; ++l)
    out.rows.row(l) =
        (theta.row(lines[l].from) - theta.row(lines[l].to)) / lines[l].reactance;
  return out;
}

}  // namespace oef
