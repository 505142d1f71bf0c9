#pragma once

// Reference problem instances: a 4×4 stable system with a low-rank
// perturbation channel A + EΔH (full or diagonal Δ), and a 4×4 single-input
// system with a sparse perturbation pattern on [A, B].

#include "sradius/affine.hpp"
#include "sradius/radius.hpp"
#include "sradius/realify.hpp"

#include <utility>
#include <vector>

namespace sradius::benchmarks {

enum class DeltaShape { Full, Diagonal };

inline MatrixXd channel_a() {
  MatrixXd A(4, 4);
  A << 79, 20, -30, -20,  //
      -41, -12, 17, 13,   //
      167, 40, -60, -38,  //
      33.5, 9, -14.5, -11;
  return A;
}

inline MatrixXd channel_e() {
  MatrixXd E(4, 2);
  E << 0.2190, 0.9347,  //
      0.0470, 0.3835,   //
      0.6789, 0.5194,   //
      0.6793, 0.8310;
  return E;
}

inline MatrixXd channel_h() {
  MatrixXd H(2, 4);
  H << 0.0346, 0.5297, 0.0077, 0.0668,  //
      0.0535, 0.6711, 0.3848, 0.4175;
  return H;
}

/// A(θ) = A + E Δ(θ) H with Δ full (column-major θ) or diagonal.
inline AffineFamily channel_family(DeltaShape shape) {
  const MatrixXd E = channel_e(), H = channel_h();
  const StructureMap map = shape == DeltaShape::Full ? StructureMap::full(2, 2) : StructureMap::diagonal(2);
  std::vector<MatrixXd> basis;
  for (const auto& G : map.basis()) basis.push_back(E * G * H);
  return AffineFamily(channel_a(), std::move(basis));
}

inline StructureMap channel_map(DeltaShape shape) {
  return shape == DeltaShape::Full ? StructureMap::full(2, 2) : StructureMap::diagonal(2);
}

inline RadiusProblem channel_stability(DeltaShape shape, NormKind norm) {
  return RadiusProblem(StructuredPencil(PencilKind::Stability, channel_family(shape)), channel_map(shape), norm);
}

inline MatrixXd sparse_a() {
  MatrixXd A(4, 4);
  A << 0, -1, 0, 0,  //
      -1, 0, 1, 0,   //
      1, 0, -1, 0,   //
      -1, 1, 0, 1;
  return A;
}

inline MatrixXd sparse_b() {
  MatrixXd B(4, 1);
  B << 1, 0, 0, 1;
  return B;
}

/// Perturbed entries of [A, B] (0-based row, column; column 4 is B),
/// in row-major order.
inline std::vector<std::pair<Index, Index>> sparse_pattern() {
  return {{0, 4}, {1, 4}, {2, 2}, {2, 4}, {3, 0}, {3, 1}, {3, 2}, {3, 3}, {3, 4}};
}

/// (A(θ), B(θ)) families for the sparse pattern; one parameter per entry.
inline std::pair<AffineFamily, AffineFamily> sparse_families() {
  const auto pattern = sparse_pattern();
  std::vector<MatrixXd> ba, bb;
  for (const auto& [r, c] : pattern) {
    MatrixXd Ai = MatrixXd::Zero(4, 4), Bi = MatrixXd::Zero(4, 1);
    if (c < 4)
      Ai(r, c) = 1.0;
    else
      Bi(r, 0) = 1.0;
    ba.push_back(Ai);
    bb.push_back(Bi);
  }
  return {AffineFamily(sparse_a(), std::move(ba)), AffineFamily(sparse_b(), std::move(bb))};
}

inline RadiusProblem sparse_problem(PencilKind kind) {
  if (kind == PencilKind::Stability) throw std::invalid_argument("sparse_problem: the base matrix is not stable");
  auto [fa, fb] = sparse_families();
  const Index p = fa.num_params();
  return RadiusProblem(StructuredPencil(kind, std::move(fa), std::move(fb)), StructureMap::vector(p),
                       NormKind::Frobenius);
}

/// Builds [A_Δ, B_Δ] (4×5) from a parameter vector of the sparse pattern.
inline MatrixXd sparse_perturbation(const VectorXd& theta) {
  const auto pattern = sparse_pattern();
  if (theta.size() != static_cast<Index>(pattern.size()))
    throw std::invalid_argument("sparse_perturbation: wrong parameter count");
  MatrixXd D = MatrixXd::Zero(4, 5);
  for (std::size_t i = 0; i < pattern.size(); ++i) D(pattern[i].first, pattern[i].second) = theta[static_cast<Index>(i)];
  return D;
}

}  // namespace sradius::benchmarks
