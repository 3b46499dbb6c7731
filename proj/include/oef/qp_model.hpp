#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Solver-agnostic convex QP container. Rows carry a provenance label; any
// relation touching a single variable is folded into that variable's bounds
// and never enters the constraint matrix, so the reported statistics follow
// the convention where single-variable constraints count as bounds.

namespace oef {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowLabel {
  kRamping,
  kCoupling,
  kFreedom,
  kBalance,
  kEpnSecurity,
  kNgnSecurity,
  kDhnSecurity,
  kNgnCircuit,
  kDhnCircuit,
  kTfConversion,
  kHistoricalBoundary,
  kFdmStencil,
  kFdmNodeCoupling,
};

inline const char* to_string(RowLabel label) {
  switch (label) {
    case RowLabel::kRamping: return "ramping";
    case RowLabel::kCoupling: return "coupling";
    case RowLabel::kFreedom: return "freedom";
    case RowLabel::kBalance: return "balance";
    case RowLabel::kEpnSecurity: return "epn-security";
    case RowLabel::kNgnSecurity: return "ngn-security";
    case RowLabel::kDhnSecurity: return "dhn-security";
    case RowLabel::kNgnCircuit: return "ngn-circuit";
    case RowLabel::kDhnCircuit: return "dhn-circuit";
    case RowLabel::kTfConversion: return "tf-conversion";
    case RowLabel::kHistoricalBoundary: return "historical-boundary";
    case RowLabel::kFdmStencil: return "fdm-stencil";
    case RowLabel::kFdmNodeCoupling: return "fdm-node-coupling";
  }
  return "?";
}

struct ModelStats {
  long variables = 0;
  long constraints = 0;
  long nonzeros = 0;
  double density = 0.0;
  std::map<std::string, long> rows_per_label;
};

class QpModel {
 public:
  struct Row {
    RowLabel label;
    double lo, hi;
    int offset, nnz;  // into cols_/vals_
  };

  int add_variable(std::string name, double lb = -kInf, double ub = kInf) {
    names_.push_back(std::move(name));
    lb_.push_back(lb);
    ub_.push_back(ub);
    return static_cast<int>(names_.size()) - 1;
  }

  int variable_count() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  double lower(int i) const { return lb_[i]; }
  double upper(int i) const { return ub_[i]; }

  void tighten_bounds(int var, double lo, double hi) {
    lb_[var] = std::max(lb_[var], lo);
    ub_[var] = std::min(ub_[var], hi);
  }
  void fix_variable(int var, double value) { tighten_bounds(var, value, value); }

  bool bounds_consistent() const {
    for (size_t i = 0; i < lb_.size(); ++i)
      if (lb_[i] > ub_[i] + 1e-30) return false;
    return true;
  }

  // lo <= sum coef*x <= hi. Zero coefficients are dropped, duplicate
  // columns merged; single-variable relations become bounds.
  void add_row(RowLabel label, double lo, double hi,
               std::vector<std::pair<int, double>> entries) {
    if (lo > hi) throw std::invalid_argument("qp row: lo > hi");
    std::sort(entries.begin(), entries.end());
    std::vector<std::pair<int, double>> merged;
    merged.reserve(entries.size());
    for (const auto& [col, val] : entries) {
      if (col < 0 || col >= variable_count())
        throw std::invalid_argument("qp row: bad column");
      if (!merged.empty() && merged.back().first == col)
        merged.back().second += val;
      else
        merged.emplace_back(col, val);
    }
    std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });

    if (merged.empty()) {
      if (lo > 0.0 || hi < 0.0) empty_row_conflict_ = true;
      return;
    }
    if (merged.size() == 1) {
      const auto [col, coef] = merged.front();
      double b_lo = lo / coef, b_hi = hi / coef;
      if (coef < 0.0) std::swap(b_lo, b_hi);
      tighten_bounds(col, std::isnan(b_lo) ? -kInf : b_lo, std::isnan(b_hi) ? kInf : b_hi);
      return;
    }
    Row row;
    row.label = label;
    row.lo = lo;
    row.hi = hi;
    row.offset = static_cast<int>(cols_.size());
    row.nnz = static_cast<int>(merged.size());
    for (const auto& [col, val] : merged) {
      cols_.push_back(col);
      vals_.push_back(val);
    }
    rows_.push_back(row);
  }

  void add_equality(RowLabel label, double rhs, std::vector<std::pair<int, double>> e) {
    add_row(label, rhs, rhs, std::move(e));
  }

  // objective += coef * x^2 (coef >= 0 keeps the Hessian PSD)
  void add_quadratic_cost(int var, double coef) {
    if (coef < 0.0) throw std::invalid_argument("qp objective: negative quadratic cost");
    if (static_cast<size_t>(var) >= names_.size())
      throw std::invalid_argument("qp objective: bad variable");
    quad_diag_.resize(names_.size(), 0.0);
    quad_diag_[var] += coef;
  }
  void add_linear_cost(int var, double coef) {
    lin_.resize(names_.size(), 0.0);
    lin_[var] += coef;
  }
  void add_constant_cost(double value) { const_ += value; }

  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<int>& row_cols() const { return cols_; }
  const std::vector<double>& row_vals() const { return vals_; }
  const std::vector<double>& lower_bounds() const { return lb_; }
  const std::vector<double>& upper_bounds() const { return ub_; }
  std::vector<double> quad_diag() const {
    auto q = quad_diag_;
    q.resize(names_.size(), 0.0);
    return q;
  }
  std::vector<double> linear() const {
    auto c = lin_;
    c.resize(names_.size(), 0.0);
    return c;
  }
  double constant() const { return const_; }
  bool empty_row_conflict() const { return empty_row_conflict_; }

  double objective_value(const std::vector<double>& x) const {
    double obj = const_;
    for (size_t i = 0; i < quad_diag_.size(); ++i) obj += quad_diag_[i] * x[i] * x[i];
    for (size_t i = 0; i < lin_.size(); ++i) obj += lin_[i] * x[i];
    return obj;
  }

  // worst violation of a row's range, in row units
  double row_violation(const Row& row, const std::vector<double>& x) const {
    double acc = 0.0;
    for (int k = row.offset; k < row.offset + row.nnz; ++k) acc += vals_[k] * x[cols_[k]];
    double v = 0.0;
    if (acc < row.lo) v = row.lo - acc;
    if (acc > row.hi) v = std::max(v, acc - row.hi);
    return v;
  }
  double max_row_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (const auto& r : rows_) worst = std::max(worst, row_violation(r, x));
    return worst;
  }

  ModelStats stats() const {
    ModelStats s;
    s.variables = variable_count();
    s.constraints = static_cast<long>(rows_.size());
    s.nonzeros = static_cast<long>(vals_.size());
    s.density = (s.variables > 0 && s.constraints > 0)
                    ? static_cast<double>(s.nonzeros) /
                          (static_cast<double>(s.variables) * s.constraints)
                    : 0.0;
    for (const auto& r : rows_) ++s.rows_per_label[to_string(r.label)];
    return s;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> lb_, ub_;
  std::vector<Row> rows_;
  std::vector<int> cols_;
  std::vector<double> vals_;
  std::vector<double> quad_diag_, lin_;
  double const_ = 0.0;
  bool empty_row_conflict_ = false;
};

}  // namespace oef
