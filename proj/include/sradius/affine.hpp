#pragma once

// Affine parameterizations A(θ) = A + Σ θᵢ Aᵢ and the structure map Γ(θ)
// whose norm defines a structured radius.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sradius {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {

inline void require_shape(const MatrixXd& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
}

}  // namespace detail

/// Dense affine matrix family base + Σ θᵢ·basisᵢ with p ≥ 1 parameters.
class AffineFamily {
 public:
  AffineFamily(MatrixXd base, std::vector<MatrixXd> basis)
      : base_(std::move(base)), basis_(std::move(basis)) {
    if (basis_.empty()) throw std::invalid_argument("AffineFamily: need at least one parameter");
    for (const auto& b : basis_) detail::require_shape(b, base_.rows(), base_.cols(), "AffineFamily basis");
  }

  /// A family that does not depend on θ (all basis matrices zero).
  static AffineFamily constant(MatrixXd base, Index num_params) {
    std::vector<MatrixXd> basis(static_cast<std::size_t>(num_params),
                                MatrixXd::Zero(base.rows(), base.cols()));
    return AffineFamily(std::move(base), std::move(basis));
  }

  Index rows() const { return base_.rows(); }
  Index cols() const { return base_.cols(); }
  Index num_params() const { return static_cast<Index>(basis_.size()); }
  const MatrixXd& base() const { return base_; }
  const std::vector<MatrixXd>& basis() const { return basis_; }
  const MatrixXd& basis(Index i) const { return basis_[static_cast<std::size_t>(i)]; }

  MatrixXd evaluate(const VectorXd& theta) const {
    if (theta.size() != num_params()) {
      throw std::invalid_argument("AffineFamily::evaluate: theta has length " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(num_params()));
    }
    MatrixXd out = base_;
    for (Index i = 0; i < num_params(); ++i) {
      if (theta[i] != 0.0) out.noalias() += theta[i] * basis_[static_cast<std::size_t>(i)];
    }
    return out;
  }

  bool operator==(const AffineFamily& other) const {
    if (base_.rows() != other.base_.rows() || base_.cols() != other.base_.cols() ||
        basis_.size() != other.basis_.size() || base_ != other.base_)
      return false;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] != other.basis_[i]) return false;
    return true;
  }

 private:
  MatrixXd base_;
  std::vector<MatrixXd> basis_;
};

inline MatrixXd evaluate(const AffineFamily& family, const VectorXd& theta) {
  return family.evaluate(theta);
}

enum class StructureForm { Full, Diagonal, Vector, General };
enum class NormKind { Frobenius, Spectral };

inline const char* to_string(StructureForm f) {
  switch (f) {
    case StructureForm::Full: return "full";
    case StructureForm::Diagonal: return "diagonal";
    case StructureForm::Vector: return "vector";
    case StructureForm::General: return "general";
  }
  return "?";
}

inline const char* to_string(NormKind n) {
  return n == NormKind::Frobenius ? "frobenius" : "spectral";
}

/// Affine map θ ↦ Γ(θ) = constant + Σ θᵢ Gᵢ. The Gᵢ must be linearly
/// independent so that the linear part is injective.
class StructureMap {
 public:
  /// Form Full: θ is the column-major vectorization of a t1×t2 matrix.
  static StructureMap full(Index t1, Index t2) {
    if (t1 < 1 || t2 < 1) throw std::invalid_argument("StructureMap::full: dimensions must be positive");
    std::vector<MatrixXd> basis;
    for (Index j = 0; j < t2; ++j)
      for (Index i = 0; i < t1; ++i) {
        MatrixXd g = MatrixXd::Zero(t1, t2);
        g(i, j) = 1.0;
        basis.push_back(std::move(g));
      }
    return StructureMap(StructureForm::Full, MatrixXd::Zero(t1, t2), std::move(basis));
  }

  /// Form Diagonal: Γ(θ) = diag(θ).
  static StructureMap diagonal(Index p) {
    if (p < 1) throw std::invalid_argument("StructureMap::diagonal: p must be positive");
    std::vector<MatrixXd> basis;
    for (Index i = 0; i < p; ++i) {
      MatrixXd g = MatrixXd::Zero(p, p);
      g(i, i) = 1.0;
      basis.push_back(std::move(g));
    }
    return StructureMap(StructureForm::Diagonal, MatrixXd::Zero(p, p), std::move(basis));
  }

  /// Form Vector: Γ(θ) = θ as a p×1 matrix.
  static StructureMap vector(Index p) {
    if (p < 1) throw std::invalid_argument("StructureMap::vector: p must be positive");
    std::vector<MatrixXd> basis;
    for (Index i = 0; i < p; ++i) {
      MatrixXd g = MatrixXd::Zero(p, 1);
      g(i, 0) = 1.0;
      basis.push_back(std::move(g));
    }
    return StructureMap(StructureForm::Vector, MatrixXd::Zero(p, 1), std::move(basis));
  }

  static StructureMap general(MatrixXd constant, std::vector<MatrixXd> basis) {
    return StructureMap(StructureForm::General, std::move(constant), std::move(basis));
  }

  StructureForm form() const { return form_; }
  Index rows() const { return constant_.rows(); }
  Index cols() const { return constant_.cols(); }
  Index num_params() const { return static_cast<Index>(basis_.size()); }
  const MatrixXd& constant() const { return constant_; }
  const std::vector<MatrixXd>& basis() const { return basis_; }

  MatrixXd evaluate(const VectorXd& theta) const {
    if (theta.size() != num_params())
      throw std::invalid_argument("StructureMap::evaluate: theta has length " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(num_params()));
    MatrixXd out = constant_;
    for (Index i = 0; i < num_params(); ++i) out.noalias() += theta[i] * basis_[static_cast<std::size_t>(i)];
    return out;
  }

  bool operator==(const StructureMap& other) const {
    if (form_ != other.form_ || rows() != other.rows() || cols() != other.cols() ||
        basis_.size() != other.basis_.size() || constant_ != other.constant_)
      return false;
    for (std::size_t i = 0; i < basis_.size(); ++i)
      if (basis_[i] != other.basis_[i]) return false;
    return true;
  }

 private:
  StructureMap(StructureForm form, MatrixXd constant, std::vector<MatrixXd> basis)
      : form_(form), constant_(std::move(constant)), basis_(std::move(basis)) {
    if (basis_.empty()) throw std::invalid_argument("StructureMap: need at least one parameter");
    for (const auto& g : basis_) detail::require_shape(g, constant_.rows(), constant_.cols(), "StructureMap basis");
    check_independent();
  }

  // rank of the stacked vec(Gᵢ) must be p, tolerance 1e-10·σ₁
  void check_independent() const {
    const Index p = num_params();
    const Index len = rows() * cols();
    if (p > len) throw std::invalid_argument("StructureMap: more parameters than matrix entries");
    MatrixXd stacked(len, p);
    for (Index i = 0; i < p; ++i) stacked.col(i) = basis_[static_cast<std::size_t>(i)].reshaped();
    Eigen::JacobiSVD<MatrixXd> svd(stacked);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0 || s[s.size() - 1] <= 1e-10 * s[0])
      throw std::invalid_argument("StructureMap: basis matrices are linearly dependent");
  }

  StructureForm form_;
  MatrixXd constant_;
  std::vector<MatrixXd> basis_;
};

/// g(θ): squared Frobenius norm of Γ(θ), or the (unsquared) spectral norm.
inline double g_value(const StructureMap& map, const VectorXd& theta, NormKind norm) {
  const MatrixXd gamma = map.evaluate(theta);
  if (norm == NormKind::Frobenius) return gamma.squaredNorm();
  if (gamma.size() == 0) return 0.0;
  if (map.form() == StructureForm::Diagonal && map.constant().isZero(0.0))
    return gamma.diagonal().cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<MatrixXd> svd(gamma);
  return svd.singularValues()[0];
}

/// Converts a g value into the reported radius (√g for Frobenius).
inline double radius_of(double g, NormKind norm) {
  return norm == NormKind::Frobenius ? std::sqrt(std::max(g, 0.0)) : g;
}

}  // namespace sradius
