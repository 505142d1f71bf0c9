#pragma once

// A small modelling layer for convex conic programs: scalar and matrix
// variables, affine equalities, nonnegativity, second-order and PSD cones,
// and a linear objective. Every cone is lowered to a linear matrix
// inequality by the solver.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sradius::conic {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Var {
  int index = -1;
};

/// constant + Σ coefficient·variable.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double c) : constant_(c) {}  // NOLINT(google-explicit-constructor)
  LinExpr(Var v, double coef = 1.0) { add(v, coef); }  // NOLINT(google-explicit-constructor)

  LinExpr& add(Var v, double coef) {
    if (v.index < 0) throw std::invalid_argument("LinExpr: undeclared variable");
    if (coef != 0.0) terms_.emplace_back(v.index, coef);
    return *this;
  }
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }

  double evaluate(const std::vector<double>& values) const {
    double s = constant_;
    for (const auto& [i, c] : terms_) s += c * values[static_cast<std::size_t>(i)];
    return s;
  }

  LinExpr& operator+=(const LinExpr& o) {
    constant_ += o.constant_;
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) { return *this += o * -1.0; }
  LinExpr& operator*=(double s) {
    constant_ *= s;
    for (auto& t : terms_) t.second *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

 private:
  double constant_ = 0.0;
  std::vector<std::pair<int, double>> terms_;
};

/// Column-major grid of variables. Symmetric matrix variables share one
/// variable between (i, j) and (j, i).
class MatrixVar {
 public:
  MatrixVar() = default;
  MatrixVar(Index rows, Index cols, std::vector<Var> vars)
      : rows_(rows), cols_(cols), vars_(std::move(vars)) {}
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Var operator()(Index i, Index j) const { return vars_[static_cast<std::size_t>(j * rows_ + i)]; }

 private:
  Index rows_ = 0, cols_ = 0;
  std::vector<Var> vars_;
};

/// Dense matrix of affine expressions.
class ExprMatrix {
 public:
  ExprMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows * cols)) {}
  explicit ExprMatrix(const MatrixXd& m) : ExprMatrix(m.rows(), m.cols()) {
    for (Index j = 0; j < cols_; ++j)
      for (Index i = 0; i < rows_; ++i) (*this)(i, j) = LinExpr(m(i, j));
  }
  explicit ExprMatrix(const MatrixVar& v) : ExprMatrix(v.rows(), v.cols()) {
    for (Index j = 0; j < cols_; ++j)
      for (Index i = 0; i < rows_; ++i) (*this)(i, j) = LinExpr(v(i, j));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  LinExpr& operator()(Index i, Index j) { return e_[static_cast<std::size_t>(j * rows_ + i)]; }
  const LinExpr& operator()(Index i, Index j) const { return e_[static_cast<std::size_t>(j * rows_ + i)]; }

  /// Adds `scale` times the (constant-coefficient) matrix `m` multiplied by `v`.
  ExprMatrix& add_scaled(const MatrixXd& m, Var v, double scale = 1.0) {
    for (Index j = 0; j < cols_; ++j)
      for (Index i = 0; i < rows_; ++i)
        if (m(i, j) != 0.0) (*this)(i, j).add(v, scale * m(i, j));
    return *this;
  }

  ExprMatrix transpose() const {
    ExprMatrix t(cols_, rows_);
    for (Index j = 0; j < cols_; ++j)
      for (Index i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  void set_block(Index r0, Index c0, const ExprMatrix& b) {
    for (Index j = 0; j < b.cols(); ++j)
      for (Index i = 0; i < b.rows(); ++i) (*this)(r0 + i, c0 + j) = b(i, j);
  }

 private:
  Index rows_, cols_;
  std::vector<LinExpr> e_;
};

enum class ConeKind { Nonnegative, SecondOrder, SquaredNorm, Psd };

/// One cone membership constraint. For SecondOrder, exprs = (t, v₁..v_k)
/// meaning ‖v‖₂ ≤ t; for SquaredNorm, ‖v‖₂² ≤ t; for Psd, `matrix` is read
/// from its upper triangle.
struct ConeConstraint {
  ConeKind kind;
  std::vector<LinExpr> exprs;
  ExprMatrix matrix{0, 0};
};

struct Equality {
  LinExpr lhs;
  double rhs = 0.0;
};

class ConicProgram {
 public:
  Var add_variable(std::string name = {}) {
    names_.push_back(std::move(name));
    return Var{static_cast<int>(names_.size() - 1)};
  }

  MatrixVar add_matrix_variable(Index rows, Index cols, const std::string& name = {}) {
    std::vector<Var> vars;
    vars.reserve(static_cast<std::size_t>(rows * cols));
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i)
        vars.push_back(add_variable(name + "(" + std::to_string(i) + "," + std::to_string(j) + ")"));
    return MatrixVar(rows, cols, std::move(vars));
  }

  MatrixVar add_symmetric_variable(Index k, const std::string& name = {}) {
    std::vector<Var> vars(static_cast<std::size_t>(k * k));
    for (Index j = 0; j < k; ++j)
      for (Index i = 0; i <= j; ++i) {
        Var v = add_variable(name + "(" + std::to_string(i) + "," + std::to_string(j) + ")");
        vars[static_cast<std::size_t>(j * k + i)] = v;
        vars[static_cast<std::size_t>(i * k + j)] = v;
      }
    return MatrixVar(k, k, std::move(vars));
  }

  void add_equality(LinExpr lhs, double rhs = 0.0) { equalities_.push_back({std::move(lhs), rhs}); }

  void add_nonnegative(LinExpr e) { cones_.push_back({ConeKind::Nonnegative, {std::move(e)}, ExprMatrix(0, 0)}); }

  /// ‖v‖₂ ≤ t.
  void add_second_order_cone(LinExpr t, std::vector<LinExpr> v) {
    v.insert(v.begin(), std::move(t));
    cones_.push_back({ConeKind::SecondOrder, std::move(v), ExprMatrix(0, 0)});
  }

  /// ‖v‖₂² ≤ t (rotated cone with the second scale fixed to 1).
  void add_squared_norm_epigraph(LinExpr t, std::vector<LinExpr> v) {
    v.insert(v.begin(), std::move(t));
    cones_.push_back({ConeKind::SquaredNorm, std::move(v), ExprMatrix(0, 0)});
  }

  void add_psd(ExprMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("ConicProgram::add_psd: matrix must be square");
    cones_.push_back({ConeKind::Psd, {}, std::move(m)});
  }

  void minimize(LinExpr objective) { objective_ = std::move(objective); }

  int num_variables() const { return static_cast<int>(names_.size()); }
  const std::string& name(Var v) const { return names_[static_cast<std::size_t>(v.index)]; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  const std::vector<ConeConstraint>& cones() const { return cones_; }
  const LinExpr& objective() const { return objective_; }

 private:
  std::vector<std::string> names_;
  std::vector<Equality> equalities_;
  std::vector<ConeConstraint> cones_;
  LinExpr objective_;
};

enum class SolveStatus { Optimal, NearOptimal, Infeasible, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near-optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct SolveDiagnostics {
  int iterations = 0;
  double primal_residual = 0.0;  // relative LMI residual
  double dual_residual = 0.0;    // relative dual equality residual
  double gap = 0.0;              // relative duality gap
  double equality_residual = 0.0;
  std::string message;
};

struct ConicSolution {
  std::vector<double> values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  SolveDiagnostics diagnostics;

  bool ok() const { return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal; }
  double value(Var v) const { return values.at(static_cast<std::size_t>(v.index)); }
  double value(const LinExpr& e) const { return e.evaluate(values); }
  MatrixXd value(const MatrixVar& m) const {
    MatrixXd out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i) out(i, j) = value(m(i, j));
    return out;
  }
};

}  // namespace sradius::conic
