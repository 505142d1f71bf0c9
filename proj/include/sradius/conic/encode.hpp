#pragma once

// Encodings of the DC subproblem pieces as conic constraints: the nuclear
// norm epigraph, the structure-norm epigraph t_g ≥ g(θ), and the full
// linearized subproblem of one iteration.

#include "sradius/affine.hpp"
#include "sradius/conic/program.hpp"
#include "sradius/realify.hpp"
#include "sradius/tnn.hpp"

#include <optional>
#include <vector>

namespace sradius::conic {

/// Adds symmetric W₁, W₂ with [[W₁, Z], [Zᵀ, W₂]] ⪰ 0 and returns
/// t = ½ tr(W₁ + W₂). Minimizing t yields ‖Z‖_*.
inline Var encode_nuclear_epigraph(ConicProgram& prog, const ExprMatrix& z) {
  const Index r = z.rows(), c = z.cols();
  const MatrixVar w1 = prog.add_symmetric_variable(r, "W1");
  const MatrixVar w2 = prog.add_symmetric_variable(c, "W2");
  ExprMatrix block(r + c, r + c);
  block.set_block(0, 0, ExprMatrix(w1));
  block.set_block(0, r, z);
  block.set_block(r, 0, z.transpose());
  block.set_block(r, r, ExprMatrix(w2));
  prog.add_psd(std::move(block));
  const Var t = prog.add_variable("t_nuc");
  LinExpr def(t);
  for (Index i = 0; i < r; ++i) def.add(w1(i, i), -0.5);
  for (Index i = 0; i < c; ++i) def.add(w2(i, i), -0.5);
  prog.add_equality(std::move(def), 0.0);
  return t;
}

inline Var encode_nuclear_epigraph(ConicProgram& prog, const MatrixVar& z) {
  return encode_nuclear_epigraph(prog, ExprMatrix(z));
}

/// Γ(θ) as an expression matrix over the parameter variables.
inline ExprMatrix structure_expr(const StructureMap& map, const std::vector<Var>& theta) {
  ExprMatrix gamma(map.constant());
  for (std::size_t i = 0; i < theta.size(); ++i) gamma.add_scaled(map.basis()[i], theta[i]);
  return gamma;
}

/// Returns t_g with t_g ≥ ‖Γ(θ)‖_F² (Frobenius) or t_g ≥ ‖Γ(θ)‖₂ (Spectral).
inline Var encode_g_epigraph(ConicProgram& prog, const StructureMap& map, const std::vector<Var>& theta,
                             NormKind norm) {
  if (static_cast<Index>(theta.size()) != map.num_params())
    throw std::invalid_argument("encode_g_epigraph: parameter count mismatch");
  const Var t = prog.add_variable("t_g");
  const ExprMatrix gamma = structure_expr(map, theta);
  if (norm == NormKind::Frobenius) {
    std::vector<LinExpr> v;
    for (Index j = 0; j < gamma.cols(); ++j)
      for (Index i = 0; i < gamma.rows(); ++i) v.push_back(gamma(i, j));
    prog.add_squared_norm_epigraph(LinExpr(t), std::move(v));
    return t;
  }
  const Index r = gamma.rows(), c = gamma.cols();
  ExprMatrix block(r + c, r + c);
  for (Index i = 0; i < r + c; ++i) block(i, i) = LinExpr(t);
  block.set_block(0, r, gamma);
  block.set_block(r, 0, gamma.transpose());
  prog.add_psd(std::move(block));
  return t;
}

/// Handles to the variables of one linearized DC subproblem.
struct Subproblem {
  ConicProgram program;
  std::vector<Var> theta;
  Var lambda;
  std::optional<Var> mu;
  MatrixVar z;
  Var t_nuclear;
  std::optional<Var> t_g;
};

struct SubproblemOptions {
  /// Drop the g term (first-stage feasibility objective).
  bool feasibility_only = false;
  /// Pin (θ, μ, λ) to a point, e.g. to evaluate the majorizer there.
  std::optional<std::pair<VectorXd, std::pair<double, double>>> pin;  // θ, (μ, λ)
};

/// min t_g + γ·t_* − γ·tr(U1ᵀ Z V1) subject to Z = pencil(θ, μ, λ),
/// t_* ≥ ‖Z‖_*, t_g ≥ g(θ), plus μ ≥ 0 for the stabilizability pencil.
/// The feasibility variant drops t_g.
inline Subproblem build_subproblem(const StructuredPencil& pencil, const StructureMap& map, NormKind norm,
                                   const SvdPartition& part, double gamma,
                                   const SubproblemOptions& options = {}) {
  if (!(gamma > 0.0)) throw std::invalid_argument("build_subproblem: gamma must be positive");
  if (map.num_params() != pencil.num_params())
    throw std::invalid_argument("build_subproblem: structure map and pencil disagree on p");
  if (part.U1.rows() != pencil.rows() || part.V1.rows() != pencil.cols())
    throw std::invalid_argument("build_subproblem: partition does not match the pencil shape");

  Subproblem sp;
  auto& prog = sp.program;
  const Index p = pencil.num_params();
  for (Index i = 0; i < p; ++i) sp.theta.push_back(prog.add_variable("theta" + std::to_string(i)));
  sp.lambda = prog.add_variable("lambda");
  if (pencil.has_mu()) sp.mu = prog.add_variable("mu");

  // Z bound to the pencil by equality
  const auto& dec = pencil.decomposition();
  sp.z = prog.add_matrix_variable(pencil.rows(), pencil.cols(), "Z");
  for (Index j = 0; j < pencil.cols(); ++j)
    for (Index i = 0; i < pencil.rows(); ++i) {
      LinExpr e(sp.z(i, j));
      for (Index k = 0; k < p; ++k) {
        const double a = dec.theta_basis[static_cast<std::size_t>(k)](i, j);
        if (a != 0.0) e.add(sp.theta[static_cast<std::size_t>(k)], -a);
      }
      if (dec.lambda_basis(i, j) != 0.0) e.add(sp.lambda, -dec.lambda_basis(i, j));
      if (sp.mu && (*dec.mu_basis)(i, j) != 0.0) e.add(*sp.mu, -(*dec.mu_basis)(i, j));
      prog.add_equality(std::move(e), dec.constant(i, j));
    }
  if (pencil.kind() == PencilKind::Stabilizability) prog.add_nonnegative(LinExpr(*sp.mu));

  if (options.pin) {
    const auto& [th, ml] = *options.pin;
    for (Index i = 0; i < p; ++i) prog.add_equality(LinExpr(sp.theta[static_cast<std::size_t>(i)]), th[i]);
    if (sp.mu) prog.add_equality(LinExpr(*sp.mu), ml.first);
    prog.add_equality(LinExpr(sp.lambda), ml.second);
  }

  sp.t_nuclear = encode_nuclear_epigraph(prog, sp.z);
  LinExpr obj;
  if (!options.feasibility_only) {
    sp.t_g = encode_g_epigraph(prog, map, sp.theta, norm);
    obj.add(*sp.t_g, 1.0);
  }
  obj.add(sp.t_nuclear, gamma);
  const MatrixXd W = part.U1 * part.V1.transpose();
  for (Index j = 0; j < W.cols(); ++j)
    for (Index i = 0; i < W.rows(); ++i)
      if (W(i, j) != 0.0) obj.add(sp.z(i, j), -gamma * W(i, j));
  prog.minimize(std::move(obj));
  return sp;
}

}  // namespace sradius::conic
