#pragma once

// Subset-sum reduction instances for the structured controllability radius:
// a nilpotent A(θ) whose subdiagonal carries 1 + Σθᵢaᵢ, 1 − θ₁, θ₁, …,
// 1 − θ_p, θ_p, and a constant Vandermonde B. The pair is uncontrollable for
// some θ iff a nonempty subset of S sums to −1.

#include "sradius/affine.hpp"
#include "sradius/errors.hpp"
#include "sradius/exact_rank.hpp"
#include "sradius/tnn.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sradius {

struct SubsetSumInstance {
  std::vector<long long> s;
  long long target = -1;
};

struct SubsetSumAnswer {
  bool feasible = false;
  std::vector<int> witness;  // 0-based indices into S
};

/// Enumerates nonempty subsets in increasing bitmask order.
inline SubsetSumAnswer subset_sum_bruteforce(const SubsetSumInstance& inst) {
  const int p = static_cast<int>(inst.s.size());
  if (p < 1) throw std::invalid_argument("subset_sum_bruteforce: empty set");
  if (p > 24) throw std::invalid_argument("subset_sum_bruteforce: p = " + std::to_string(p) + " exceeds 24");
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << p); ++mask) {
    long long sum = 0;
    for (int i = 0; i < p; ++i)
      if (mask >> i & 1U) sum += inst.s[static_cast<std::size_t>(i)];
    if (sum == inst.target) {
      SubsetSumAnswer a{true, {}};
      for (int i = 0; i < p; ++i)
        if (mask >> i & 1U) a.witness.push_back(i);
      return a;
    }
  }
  return {};
}

inline MatrixXd vandermonde(const std::vector<double>& nodes, Index cols) {
  if (cols < 1) throw std::invalid_argument("vandermonde: cols must be positive");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j]) throw std::invalid_argument("vandermonde: duplicate node " + std::to_string(nodes[i]));
  MatrixXd V(static_cast<Index>(nodes.size()), cols);
  for (Index i = 0; i < V.rows(); ++i) {
    double v = 1.0;
    for (Index j = 0; j < cols; ++j) {
      V(i, j) = v;
      v *= nodes[static_cast<std::size_t>(i)];
    }
  }
  return V;
}

inline std::vector<double> integer_nodes(int count) {
  std::vector<double> n;
  for (int i = 1; i <= count; ++i) n.push_back(i);
  return n;
}

/// Chebyshev points of the first kind on [−1, 1].
inline std::vector<double> chebyshev_nodes(int count) {
  std::vector<double> n;
  for (int i = 1; i <= count; ++i) n.push_back(std::cos((2.0 * i - 1.0) * std::numbers::pi / (2.0 * count)));
  return n;
}

struct RscrReduction {
  AffineFamily a;
  AffineFamily b;
  std::vector<double> nodes;
};

/// `nodes` defaults to 1..2p+2.
inline RscrReduction build_rscr_reduction(const SubsetSumInstance& inst,
                                          std::optional<std::vector<double>> nodes = std::nullopt) {
  if (inst.target != -1) throw std::invalid_argument("build_rscr_reduction: the reduction requires target -1");
  const int p = static_cast<int>(inst.s.size());
  if (p < 1) throw std::invalid_argument("build_rscr_reduction: empty set");
  const Index n = 2 * p + 2;
  std::vector<double> nd = nodes ? *nodes : integer_nodes(static_cast<int>(n));
  if (static_cast<Index>(nd.size()) != n) throw std::invalid_argument("build_rscr_reduction: need 2p+2 nodes");

  MatrixXd A0 = MatrixXd::Zero(n, n);
  A0(1, 0) = 1.0;
  for (int i = 1; i <= p; ++i) A0(2 * i, 2 * i - 1) = 1.0;
  std::vector<MatrixXd> basis;
  for (int i = 1; i <= p; ++i) {
    MatrixXd Ai = MatrixXd::Zero(n, n);
    Ai(1, 0) = static_cast<double>(inst.s[static_cast<std::size_t>(i - 1)]);
    Ai(2 * i, 2 * i - 1) = -1.0;
    Ai(2 * i + 1, 2 * i) = 1.0;
    basis.push_back(std::move(Ai));
  }
  const MatrixXd B = vandermonde(nd, p + 1);
  return {AffineFamily(std::move(A0), std::move(basis)), AffineFamily::constant(B, p), std::move(nd)};
}

/// Σθᵢ²(θᵢ − 1)² + (1 + Σθᵢaᵢ)²; zero exactly at binary θ with Σθᵢaᵢ = −1.
inline double subset_sum_polynomial(const VectorXd& theta, const std::vector<long long>& s) {
  if (static_cast<std::size_t>(theta.size()) != s.size())
    throw std::invalid_argument("subset_sum_polynomial: theta and S differ in length");
  double sq = 0.0, lin = 1.0;
  for (Index i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    sq += t * t * (t - 1.0) * (t - 1.0);
    lin += t * static_cast<double>(s[static_cast<std::size_t>(i)]);
  }
  return sq + lin * lin;
}

namespace detail {

/// [A(θ)·2^k, B] with θᵢ = mᵢ/2^k and integer nodes; scaling the A columns
/// preserves rank.
inline exact::IntMatrix<exact::BigInt> scaled_reduction_matrix(const SubsetSumInstance& inst,
                                                               const std::vector<long long>& m, int k,
                                                               const std::vector<long long>& nodes) {
  const int p = static_cast<int>(inst.s.size());
  const int n = 2 * p + 2;
  const exact::BigInt one = exact::BigInt(1) << k;
  exact::IntMatrix<exact::BigInt> M(n, n + p + 1);
  exact::BigInt head = one;
  for (int i = 0; i < p; ++i) head += exact::BigInt(m[static_cast<std::size_t>(i)]) * inst.s[static_cast<std::size_t>(i)];
  M(1, 0) = head;
  for (int i = 1; i <= p; ++i) {
    M(2 * i, 2 * i - 1) = one - m[static_cast<std::size_t>(i - 1)];
    M(2 * i + 1, 2 * i) = m[static_cast<std::size_t>(i - 1)];
  }
  for (int r = 0; r < n; ++r) {
    exact::BigInt v = 1;
    for (int j = 0; j <= p; ++j) {
      M(r, n + j) = v;
      v *= nodes[static_cast<std::size_t>(r)];
    }
  }
  return M;
}

}  // namespace detail

struct EquivalenceReport {
  bool passed = false;
  bool subset_sum_feasible = false;
  std::vector<int> witness;
  int binary_checked = 0;
  int binary_uncontrollable = 0;
  std::vector<std::vector<int>> counterexamples;  // binary θ violating the equivalence
  int random_samples = 0;
  int random_rank_deficient = 0;    // exact rank on dyadic θ
  double random_min_sigma = 0.0;    // σ_min of row-normalized [A(θ), B]
  std::string message;
};

/// Exhaustive binary check of "uncontrollable ⟺ Σθᵢaᵢ = −1, θ ≠ 0" with exact
/// integer rank, plus (for infeasible instances) a random real-θ probe.
/// A(θ) is strictly lower triangular, so its only eigenvalue is 0 and the
/// PBH test reduces to rank [A(θ), B] = 2p+2.
inline EquivalenceReport reduction_equivalence_check(const SubsetSumInstance& inst, int random_samples = 1000,
                                                     std::uint64_t seed = 0) {
  const int p = static_cast<int>(inst.s.size());
  if (p > 12) throw std::invalid_argument("reduction_equivalence_check: p = " + std::to_string(p) + " exceeds 12");
  if (inst.target != -1) throw std::invalid_argument("reduction_equivalence_check: the reduction requires target -1");
  const int n = 2 * p + 2;
  std::vector<long long> nodes;
  for (int i = 1; i <= n; ++i) nodes.push_back(i);

  EquivalenceReport rep;
  const auto bf = subset_sum_bruteforce(inst);
  rep.subset_sum_feasible = bf.feasible;
  rep.witness = bf.witness;

  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << p); ++mask) {
    std::vector<long long> m(static_cast<std::size_t>(p));
    long long sum = 0;
    for (int i = 0; i < p; ++i) {
      m[static_cast<std::size_t>(i)] = mask >> i & 1U;
      sum += m[static_cast<std::size_t>(i)] * inst.s[static_cast<std::size_t>(i)];
    }
    const bool uncontrollable = exact::rank(detail::scaled_reduction_matrix(inst, m, 0, nodes)) < n;
    const bool expected = mask != 0 && sum == -1;
    ++rep.binary_checked;
    if (uncontrollable) ++rep.binary_uncontrollable;
    if (uncontrollable != expected) {
      std::vector<int> w(m.begin(), m.end());
      rep.counterexamples.push_back(std::move(w));
    }
  }
  bool ok = rep.counterexamples.empty() && ((rep.binary_uncontrollable > 0) == rep.subset_sum_feasible);

  if (!rep.subset_sum_feasible && random_samples > 0) {
    const RscrReduction red = build_rscr_reduction(inst);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    constexpr int kBits = 20;
    rep.random_min_sigma = std::numeric_limits<double>::infinity();
    for (int s = 0; s < random_samples; ++s) {
      std::vector<long long> m(static_cast<std::size_t>(p));
      VectorXd theta(p);
      for (int i = 0; i < p; ++i) {
        m[static_cast<std::size_t>(i)] = std::llround(std::ldexp(u(rng), kBits));
        theta[i] = std::ldexp(static_cast<double>(m[static_cast<std::size_t>(i)]), -kBits);
      }
      if (exact::rank(detail::scaled_reduction_matrix(inst, m, kBits, nodes)) < n) ++rep.random_rank_deficient;
      MatrixXd AB(n, n + p + 1);
      AB << red.a.evaluate(theta), red.b.evaluate(theta);
      for (Index r = 0; r < AB.rows(); ++r) AB.row(r) /= AB.row(r).norm();
      rep.random_min_sigma = std::min(rep.random_min_sigma, sigma_min(AB));
    }
    rep.random_samples = random_samples;
    ok = ok && rep.random_rank_deficient == 0;
  }
  rep.passed = ok;
  if (!ok) {
    rep.message = std::to_string(rep.counterexamples.size()) + " binary counterexample(s), " +
                  std::to_string(rep.random_rank_deficient) + " rank-deficient random sample(s)";
  }
  return rep;
}

}  // namespace sradius
