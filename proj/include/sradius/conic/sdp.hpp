#pragma once

// Primal-dual interior-point solver for the linear-matrix-inequality form
//
//   minimize cᵀy  s.t.  S_b = F0_b + Σᵢ yᵢ F_ib ⪰ 0  for every block b
//
// and its dual  maximize −Σ F0_b•X_b  s.t.  Σ_b F_ib•X_b = cᵢ, X_b ⪰ 0.
// Search directions use the HKM scaling with Mehrotra's predictor-corrector.
// Affine equalities of a ConicProgram are eliminated before the solve.

#include "sradius/conic/program.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace sradius::conic {

struct SdpSettings {
  double tolerance = 1e-8;
  int max_iterations = 100;
  double step_fraction = 0.98;

  /// Defaults, with `SRADIUS_SOLVER_TOL` overriding the tolerance when set.
  static SdpSettings from_environment() {
    SdpSettings s;
    if (const char* env = std::getenv("SRADIUS_SOLVER_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0 && std::isfinite(v)) s.tolerance = v;
    }
    return s;
  }
};

namespace detail {

struct SymEntry {
  int r, c;  // r <= c
  double v;
};

struct LmiBlock {
  int size = 0;
  MatrixXd f0;
  std::vector<std::vector<SymEntry>> coef;  // indexed by solver variable
  std::vector<int> present;                 // variables with nonempty coef
};

struct LmiProblem {
  VectorXd c;
  double offset = 0.0;  // constant objective term, used only to scale the gap
  std::vector<LmiBlock> blocks;
};

inline double sym_inner(const std::vector<SymEntry>& f, const MatrixXd& m) {
  double s = 0.0;
  for (const auto& e : f) s += (e.r == e.c) ? e.v * m(e.r, e.c) : e.v * (m(e.r, e.c) + m(e.c, e.r));
  return s;
}

inline void sym_axpy(const std::vector<SymEntry>& f, double a, MatrixXd& m) {
  for (const auto& e : f) {
    m(e.r, e.c) += a * e.v;
    if (e.r != e.c) m(e.c, e.r) += a * e.v;
  }
}

inline MatrixXd block_value(const LmiBlock& b, const VectorXd& y) {
  MatrixXd m = b.f0;
  for (int i : b.present) sym_axpy(b.coef[static_cast<std::size_t>(i)], y[i], m);
  return m;
}

// Largest α with M + α·D ⪰ 0 given the Cholesky factor of M (∞ if unbounded).
inline double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& D) {
  const auto& L = chol.matrixL();
  MatrixXd W = L.solve(D);
  W = L.solve(W.transpose()).transpose();
  W = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()[0];
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

struct IpmResult {
  VectorXd y;
  SolveStatus status = SolveStatus::NumericalFailure;
  SolveDiagnostics diag;
};

inline IpmResult solve_lmi(const LmiProblem& prob, const SdpSettings& settings) {
  const int m = static_cast<int>(prob.c.size());
  const std::size_t nb = prob.blocks.size();
  IpmResult out;
  out.y = VectorXd::Zero(m);

  int total_dim = 0;
  double f0_norm = 0.0;
  for (const auto& b : prob.blocks) {
    total_dim += b.size;
    f0_norm = std::max(f0_norm, b.f0.norm());
  }
  const double c_norm = prob.c.norm();

  std::vector<MatrixXd> S(nb), X(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const auto& b = prob.blocks[k];
    const double sq = std::sqrt(static_cast<double>(b.size));
    double max_f = b.f0.norm(), xi = std::max(10.0, sq);
    for (int i : b.present) {
      double fn = 0.0;
      for (const auto& e : b.coef[static_cast<std::size_t>(i)]) fn += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
      fn = std::sqrt(fn);
      max_f = std::max(max_f, fn);
      xi = std::max(xi, b.size * (1.0 + std::abs(prob.c[i])) / (1.0 + fn));
    }
    const double eta = std::max({10.0, sq, (1.0 + max_f) / sq});
    S[k] = eta * MatrixXd::Identity(b.size, b.size);
    X[k] = xi * MatrixXd::Identity(b.size, b.size);
  }

  VectorXd y = VectorXd::Zero(m);
  std::vector<MatrixXd> Rp(nb), Sinv(nb), dS(nb), dX(nb), dSa(nb), dXa(nb);
  std::vector<Eigen::LLT<MatrixXd>> cholS(nb), cholX(nb);
  VectorXd rd(m), rhs(m), dy(m), dya(m);
  MatrixXd M(m, m);

  double best_merit = std::numeric_limits<double>::infinity();
  VectorXd best_y = y;
  SolveDiagnostics best_diag;
  // fallback: gap relative to the eliminated objective, the floor set by cancellation
  double best_scaled = std::numeric_limits<double>::infinity();
  VectorXd scaled_y = y;
  SolveDiagnostics scaled_diag;
  int stall = 0;

  auto directions = [&](const Eigen::LDLT<MatrixXd>& fac, const std::vector<MatrixXd>& G, VectorXd& dyv,
                        std::vector<MatrixXd>& dSv, std::vector<MatrixXd>& dXv) {
    for (int i = 0; i < m; ++i) rhs[i] = -rd[i];
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = prob.blocks[k];
      const MatrixXd H = G[k] + Sinv[k] * Rp[k] * X[k];
      for (int i : b.present) rhs[i] += sym_inner(b.coef[static_cast<std::size_t>(i)], H);
    }
    dyv = fac.solve(rhs);
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = prob.blocks[k];
      dSv[k] = -Rp[k];
      for (int i : b.present) sym_axpy(b.coef[static_cast<std::size_t>(i)], dyv[i], dSv[k]);
      MatrixXd t = G[k] - Sinv[k] * dSv[k] * X[k];
      dXv[k] = 0.5 * (t + t.transpose());
    }
  };

  auto step_lengths = [&](const std::vector<MatrixXd>& dSv, const std::vector<MatrixXd>& dXv, double& ap,
                          double& ad) {
    ap = std::numeric_limits<double>::infinity();
    ad = ap;
    for (std::size_t k = 0; k < nb; ++k) {
      ap = std::min(ap, max_step(cholS[k], dSv[k]));
      ad = std::min(ad, max_step(cholX[k], dXv[k]));
    }
  };

  int it = 0;
  for (;; ++it) {
    double gap = 0.0, pobj = prob.c.dot(y), dobj = 0.0, rp_norm2 = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      Rp[k] = S[k] - block_value(prob.blocks[k], y);
      rp_norm2 += Rp[k].squaredNorm();
      gap += (S[k].array() * X[k].array()).sum();
      dobj -= (prob.blocks[k].f0.array() * X[k].array()).sum();
    }
    rd = prob.c;
    for (const auto& b : prob.blocks)
      for (int i : b.present) rd[i] -= sym_inner(b.coef[static_cast<std::size_t>(i)], X[&b - prob.blocks.data()]);

    SolveDiagnostics diag;
    diag.iterations = it;
    diag.primal_residual = std::sqrt(rp_norm2) / (1.0 + f0_norm);
    diag.dual_residual = rd.norm() / (1.0 + c_norm);
    diag.gap = std::max(gap, std::abs(pobj - dobj)) /
               (1.0 + std::abs(pobj + prob.offset) + std::abs(dobj + prob.offset));
    const double merit = std::max({diag.primal_residual, diag.dual_residual, diag.gap});
    if (merit < best_merit) {
      best_merit = merit;
      best_y = y;
      best_diag = diag;
    }
    const double scaled = std::max({diag.primal_residual, diag.dual_residual,
                                    std::max(gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj))});
    if (scaled < best_scaled) {
      best_scaled = scaled;
      scaled_y = y;
      scaled_diag = diag;
    }
    if (diag.primal_residual <= settings.tolerance && diag.dual_residual <= settings.tolerance &&
        diag.gap <= settings.tolerance) {
      out.y = y;
      out.status = SolveStatus::Optimal;
      out.diag = diag;
      return out;
    }
    if (it >= settings.max_iterations || stall >= 4 || !y.allFinite() || y.norm() > 1e12) break;

    const double mu = gap / total_dim;
    bool fact_ok = true;
    for (std::size_t k = 0; k < nb && fact_ok; ++k) {
      cholS[k].compute(S[k]);
      cholX[k].compute(X[k]);
      fact_ok = cholS[k].info() == Eigen::Success && cholX[k].info() == Eigen::Success;
      if (fact_ok) Sinv[k] = cholS[k].solve(MatrixXd::Identity(S[k].rows(), S[k].cols()));
    }
    if (!fact_ok) break;

    // Schur complement M_ij = tr(F_i S⁻¹ F_j X)
    M.setZero();
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = prob.blocks[k];
      MatrixXd P(b.size, b.size);
      for (int j : b.present) {
        const auto& fj = b.coef[static_cast<std::size_t>(j)];
        if (static_cast<int>(fj.size()) > b.size) {
          MatrixXd Fd = MatrixXd::Zero(b.size, b.size);
          sym_axpy(fj, 1.0, Fd);
          P.noalias() = Sinv[k] * Fd * X[k];
        } else {
          P.setZero();
          for (const auto& e : fj) {
            P.noalias() += e.v * Sinv[k].col(e.r) * X[k].row(e.c);
            if (e.r != e.c) P.noalias() += e.v * Sinv[k].col(e.c) * X[k].row(e.r);
          }
        }
        for (int i : b.present)
          if (i <= j) M(i, j) += sym_inner(b.coef[static_cast<std::size_t>(i)], P);
      }
    }
    M.triangularView<Eigen::StrictlyLower>() = M.transpose().triangularView<Eigen::StrictlyLower>();
    Eigen::LDLT<MatrixXd> fac(M);
    if (fac.info() != Eigen::Success || !fac.isPositive()) {
      const double reg = 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      fac.compute(M + reg * MatrixXd::Identity(m, m));
      if (fac.info() != Eigen::Success) break;
    }

    // predictor
    std::vector<MatrixXd> G(nb);
    for (std::size_t k = 0; k < nb; ++k) G[k] = -X[k];
    directions(fac, G, dya, dSa, dXa);
    double ap = 0.0, ad = 0.0;
    step_lengths(dSa, dXa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double gap_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      gap_aff += ((S[k] + ap * dSa[k]).array() * (X[k] + ad * dXa[k]).array()).sum();
    const double mu_aff = std::max(gap_aff, 0.0) / total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // corrector
    for (std::size_t k = 0; k < nb; ++k)
      G[k] = sigma * mu * Sinv[k] - X[k] - Sinv[k] * dSa[k] * dXa[k];
    directions(fac, G, dy, dS, dX);
    step_lengths(dS, dX, ap, ad);
    ap = std::min(1.0, settings.step_fraction * ap);
    ad = std::min(1.0, settings.step_fraction * ad);

    y += ap * dy;
    for (std::size_t k = 0; k < nb; ++k) {
      S[k] += ap * dS[k];
      X[k] += ad * dX[k];
      S[k] = 0.5 * (S[k] + S[k].transpose());
      X[k] = 0.5 * (X[k] + X[k].transpose());
    }
    stall = (std::max(ap, ad) < 1e-8) ? stall + 1 : 0;
  }

  out.y = best_y;
  out.diag = best_diag;
  out.diag.iterations = it;
  const double loose = std::sqrt(settings.tolerance);
  if (best_merit <= std::max(1e3 * settings.tolerance, std::min(loose, 1e-5))) {
    out.status = SolveStatus::NearOptimal;
    out.diag.message = "stopped before reaching the requested tolerance";
  } else if (best_scaled <= settings.tolerance) {
    out.y = scaled_y;
    out.diag = scaled_diag;
    out.diag.iterations = it;
    out.status = SolveStatus::NearOptimal;
    out.diag.message = "gap reached only relative to the eliminated objective scale";
  } else {
    out.status = SolveStatus::NumericalFailure;
    out.diag.message = "interior-point iteration failed to converge (merit " + std::to_string(best_merit) + ")";
  }
  return out;
}

// y = y0 + N z after eliminating the equalities.
struct Elimination {
  VectorXd y0;
  std::vector<std::vector<std::pair<int, double>>> map;  // per original var: (free index, coef)
  int num_free = 0;
  bool consistent = true;
  double max_residual = 0.0;
};

inline Elimination eliminate(const ConicProgram& prog) {
  const int n = prog.num_variables();
  const auto& eqs = prog.equalities();
  const int E = static_cast<int>(eqs.size());
  MatrixXd A = MatrixXd::Zero(E, n);
  VectorXd b(E);
  for (int r = 0; r < E; ++r) {
    for (const auto& [i, c] : eqs[static_cast<std::size_t>(r)].lhs.terms()) A(r, i) += c;
    b[r] = eqs[static_cast<std::size_t>(r)].rhs - eqs[static_cast<std::size_t>(r)].lhs.constant();
  }

  Elimination el;
  std::vector<int> pivot_of_row(static_cast<std::size_t>(E), -1);
  std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < E; ++r) {
    const double row_max = A.row(r).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, row_max);
    if (row_max <= 1e-12 * scale) {
      if (std::abs(b[r]) > 1e-9 * std::max(1.0, std::abs(b[r]))) el.consistent = false;
      continue;
    }
    // later-declared variables are eliminated first (matrix variables
    // bound by equalities are declared after the parameters)
    int piv = -1;
    for (int j = n - 1; j >= 0; --j)
      if (std::abs(A(r, j)) >= 0.1 * row_max) {
        piv = j;
        break;
      }
    const double pv = A(r, piv);
    A.row(r) /= pv;
    b[r] /= pv;
    for (int q = 0; q < E; ++q) {
      if (q == r || A(q, piv) == 0.0) continue;
      const double f = A(q, piv);
      A.row(q) -= f * A.row(r);
      b[q] -= f * b[r];
      A(q, piv) = 0.0;
    }
    pivot_of_row[static_cast<std::size_t>(r)] = piv;
    is_pivot[static_cast<std::size_t>(piv)] = 1;
  }

  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j)
    if (!is_pivot[static_cast<std::size_t>(j)]) free_index[static_cast<std::size_t>(j)] = el.num_free++;

  el.y0 = VectorXd::Zero(n);
  el.map.assign(static_cast<std::size_t>(n), {});
  for (int j = 0; j < n; ++j)
    if (free_index[static_cast<std::size_t>(j)] >= 0) el.map[static_cast<std::size_t>(j)].emplace_back(free_index[static_cast<std::size_t>(j)], 1.0);
  for (int r = 0; r < E; ++r) {
    const int piv = pivot_of_row[static_cast<std::size_t>(r)];
    if (piv < 0) continue;
    el.y0[piv] = b[r];
    for (int j = 0; j < n; ++j) {
      if (j == piv || std::abs(A(r, j)) <= 1e-15) continue;
      el.map[static_cast<std::size_t>(piv)].emplace_back(free_index[static_cast<std::size_t>(j)], -A(r, j));
    }
  }
  return el;
}

// An affine expression over the free variables: constant + Σ coef·z.
struct FreeExpr {
  double constant = 0.0;
  std::map<int, double> terms;
};

inline FreeExpr substitute(const LinExpr& e, const Elimination& el) {
  FreeExpr f;
  f.constant = e.constant();
  for (const auto& [i, c] : e.terms()) {
    f.constant += c * el.y0[i];
    for (const auto& [z, a] : el.map[static_cast<std::size_t>(i)]) f.terms[z] += c * a;
  }
  return f;
}

}  // namespace detail

/// Solves a ConicProgram to the requested relative gap / residual tolerance.
inline ConicSolution solve(const ConicProgram& prog, const SdpSettings& settings = SdpSettings::from_environment()) {
  using namespace detail;
  ConicSolution sol;
  const int n = prog.num_variables();
  const Elimination el = eliminate(prog);
  if (!el.consistent) {
    sol.status = SolveStatus::Infeasible;
    sol.values.assign(static_cast<std::size_t>(n), 0.0);
    sol.diagnostics.message = "equality constraints are inconsistent";
    return sol;
  }

  // lower each cone to an LMI block over the free variables
  struct RawBlock {
    int size;
    std::vector<std::tuple<int, int, FreeExpr>> entries;
  };
  std::vector<RawBlock> raw;
  for (const auto& cone : prog.cones()) {
    RawBlock rb;
    switch (cone.kind) {
      case ConeKind::Nonnegative:
        rb.size = 1;
        rb.entries.emplace_back(0, 0, substitute(cone.exprs[0], el));
        break;
      case ConeKind::SecondOrder:
      case ConeKind::SquaredNorm: {
        const int k = static_cast<int>(cone.exprs.size()) - 1;
        rb.size = k + 1;
        const FreeExpr t = substitute(cone.exprs[0], el);
        rb.entries.emplace_back(0, 0, t);
        for (int i = 1; i <= k; ++i) {
          rb.entries.emplace_back(0, i, substitute(cone.exprs[static_cast<std::size_t>(i)], el));
          if (cone.kind == ConeKind::SecondOrder) {
            rb.entries.emplace_back(i, i, t);
          } else {
            FreeExpr one;
            one.constant = 1.0;
            rb.entries.emplace_back(i, i, one);
          }
        }
        break;
      }
      case ConeKind::Psd: {
        const int k = static_cast<int>(cone.matrix.rows());
        rb.size = k;
        for (int c = 0; c < k; ++c)
          for (int r = 0; r <= c; ++r) rb.entries.emplace_back(r, c, substitute(cone.matrix(r, c), el));
        break;
      }
    }
    raw.push_back(std::move(rb));
  }

  const FreeExpr obj = substitute(prog.objective(), el);
  std::vector<char> used(static_cast<std::size_t>(el.num_free), 0);
  for (const auto& rb : raw)
    for (const auto& [r, c, fe] : rb.entries)
      for (const auto& [z, a] : fe.terms)
        if (a != 0.0) used[static_cast<std::size_t>(z)] = 1;

  // free variables absent from every cone are fixed at zero when they do not
  // enter the objective; otherwise the program is unbounded
  std::vector<int> solver_index(static_cast<std::size_t>(el.num_free), -1);
  int m = 0;
  for (int z = 0; z < el.num_free; ++z) {
    if (used[static_cast<std::size_t>(z)]) {
      solver_index[static_cast<std::size_t>(z)] = m++;
      continue;
    }
    auto it = obj.terms.find(z);
    if (it != obj.terms.end() && std::abs(it->second) > 1e-14) {
      sol.status = SolveStatus::NumericalFailure;
      sol.values.assign(static_cast<std::size_t>(n), 0.0);
      sol.diagnostics.message = "objective is unbounded along an unconstrained direction";
      return sol;
    }
  }

  LmiProblem lmi;
  lmi.c = VectorXd::Zero(m);
  lmi.offset = obj.constant;
  for (const auto& [z, a] : obj.terms)
    if (solver_index[static_cast<std::size_t>(z)] >= 0) lmi.c[solver_index[static_cast<std::size_t>(z)]] += a;
  for (const auto& rb : raw) {
    LmiBlock b;
    b.size = rb.size;
    b.f0 = MatrixXd::Zero(rb.size, rb.size);
    b.coef.assign(static_cast<std::size_t>(m), {});
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& [r, c, fe] : rb.entries) {
      b.f0(r, c) += fe.constant;
      if (r != c) b.f0(c, r) += fe.constant;
      for (const auto& [z, a] : fe.terms) {
        const int s = solver_index[static_cast<std::size_t>(z)];
        if (s >= 0 && a != 0.0) acc[{s, r, c}] += a;
      }
    }
    for (const auto& [key, v] : acc) {
      if (v == 0.0) continue;
      const auto [s, r, c] = key;
      b.coef[static_cast<std::size_t>(s)].push_back({r, c, v});
    }
    for (int s = 0; s < m; ++s)
      if (!b.coef[static_cast<std::size_t>(s)].empty()) b.present.push_back(s);
    lmi.blocks.push_back(std::move(b));
  }

  VectorXd zfree = VectorXd::Zero(el.num_free);
  if (m > 0) {
    const IpmResult r = solve_lmi(lmi, settings);
    for (int z = 0; z < el.num_free; ++z)
      if (solver_index[static_cast<std::size_t>(z)] >= 0) zfree[z] = r.y[solver_index[static_cast<std::size_t>(z)]];
    sol.status = r.status;
    sol.diagnostics = r.diag;
  } else {
    bool psd = true;
    for (const auto& b : lmi.blocks) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(b.f0, Eigen::EigenvaluesOnly);
      if (b.size > 0 && es.eigenvalues()[0] < -settings.tolerance * std::max(1.0, b.f0.norm())) psd = false;
    }
    sol.status = psd ? SolveStatus::Optimal : SolveStatus::Infeasible;
    if (!psd) sol.diagnostics.message = "fixed point violates a cone constraint";
  }

  sol.values.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double v = el.y0[i];
    for (const auto& [z, a] : el.map[static_cast<std::size_t>(i)]) v += a * zfree[z];
    sol.values[static_cast<std::size_t>(i)] = v;
  }
  sol.objective = prog.objective().evaluate(sol.values);
  double eq_res = 0.0;
  for (const auto& eq : prog.equalities())
    eq_res = std::max(eq_res, std::abs(eq.lhs.evaluate(sol.values) - eq.rhs));
  sol.diagnostics.equality_residual = eq_res;
  return sol;
}

}  // namespace sradius::conic
