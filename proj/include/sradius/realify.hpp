#pragma once

// Real embedding of complex rank conditions and the structured pencils Z
// used by the controllability, stabilizability and stability problems.

#include "sradius/affine.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sradius {

/// W = [[X, Y], [-Y, X]]. σ_min(W) = σ_min(X + jY) and every singular value
/// of X + jY appears twice in W.
inline MatrixXd realify(const MatrixXd& X, const MatrixXd& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw std::invalid_argument("realify: X and Y must have the same shape");
  const Index r = X.rows(), c = X.cols();
  MatrixXd W(2 * r, 2 * c);
  W.topLeftCorner(r, c) = X;
  W.topRightCorner(r, c) = Y;
  W.bottomLeftCorner(r, c) = -Y;
  W.bottomRightCorner(r, c) = X;
  return W;
}

enum class PencilKind { Controllability, Stabilizability, Stability };

inline const char* to_string(PencilKind k) {
  switch (k) {
    case PencilKind::Controllability: return "controllability";
    case PencilKind::Stabilizability: return "stabilizability";
    case PencilKind::Stability: return "stability";
  }
  return "?";
}

/// Z = Z₀ + Σ θᵢ Zθᵢ + λ Zλ + μ Zμ (Zμ absent for the stability pencil).
struct PencilDecomposition {
  MatrixXd constant;
  std::vector<MatrixXd> theta_basis;
  MatrixXd lambda_basis;
  std::optional<MatrixXd> mu_basis;
};

/// The pencil of one radius problem, bound to its system families.
///
/// Controllability / stabilizability (2n × (2n+2m)):
///   [A(θ)-μI  B(θ)  -λI    0   ]
///   [  λI      0   A(θ)-μI B(θ)]
/// Stability (2n × 2n):
///   [A(θ)  -λI ]
///   [ λI   A(θ)]
class StructuredPencil {
 public:
  StructuredPencil(PencilKind kind, AffineFamily a, std::optional<AffineFamily> b = std::nullopt)
      : kind_(kind), a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != a_.cols()) throw std::invalid_argument("StructuredPencil: A(θ) must be square");
    if (kind_ == PencilKind::Stability) {
      if (b_) throw std::invalid_argument("StructuredPencil: stability pencil takes no B(θ)");
    } else {
      if (!b_) throw std::invalid_argument("StructuredPencil: controllability pencils need B(θ)");
      if (b_->rows() != a_.rows())
        throw std::invalid_argument("StructuredPencil: A(θ) is n×n but B(θ) has " +
                                    std::to_string(b_->rows()) + " rows");
      if (b_->num_params() != a_.num_params())
        throw std::invalid_argument("StructuredPencil: A(θ) and B(θ) have different parameter counts");
    }
    decomposition_ = decompose();
  }

  PencilKind kind() const { return kind_; }
  bool has_mu() const { return kind_ != PencilKind::Stability; }
  Index n() const { return a_.rows(); }
  Index m() const { return b_ ? b_->cols() : 0; }
  Index num_params() const { return a_.num_params(); }
  Index rows() const { return 2 * n(); }
  Index cols() const { return kind_ == PencilKind::Stability ? 2 * n() : 2 * (n() + m()); }
  const AffineFamily& a() const { return a_; }
  const std::optional<AffineFamily>& b() const { return b_; }
  const PencilDecomposition& decomposition() const { return decomposition_; }

  /// The pencil at (θ, μ, λ); μ is ignored for the stability pencil.
  MatrixXd evaluate(const VectorXd& theta, double mu, double lambda) const {
    const MatrixXd A = a_.evaluate(theta);
    const Index nn = n();
    if (kind_ == PencilKind::Stability)
      return realify(A, -lambda * MatrixXd::Identity(nn, nn));
    const MatrixXd B = b_->evaluate(theta);
    MatrixXd X(nn, nn + m()), Y = MatrixXd::Zero(nn, nn + m());
    X << A - mu * MatrixXd::Identity(nn, nn), B;
    Y.leftCols(nn) = -lambda * MatrixXd::Identity(nn, nn);
    return realify(X, Y);
  }

 private:
  PencilDecomposition decompose() const {
    PencilDecomposition d;
    const Index nn = n(), mm = m();
    const MatrixXd I = MatrixXd::Identity(nn, nn);
    auto embed = [&](const MatrixXd& A, const MatrixXd* B, const MatrixXd& Yleft) {
      if (kind_ == PencilKind::Stability) return realify(A, Yleft);
      MatrixXd X(nn, nn + mm), Y = MatrixXd::Zero(nn, nn + mm);
      X << A, *B;
      Y.leftCols(nn) = Yleft;
      return realify(X, Y);
    };
    const MatrixXd zA = MatrixXd::Zero(nn, nn), zB = MatrixXd::Zero(nn, mm);
    d.constant = embed(a_.base(), b_ ? &b_->base() : nullptr, zA);
    for (Index i = 0; i < num_params(); ++i)
      d.theta_basis.push_back(embed(a_.basis(i), b_ ? &b_->basis(i) : nullptr, zA));
    d.lambda_basis = embed(zA, &zB, -I);
    if (has_mu()) d.mu_basis = embed(-I, &zB, zA);
    return d;
  }

  PencilKind kind_;
  AffineFamily a_;
  std::optional<AffineFamily> b_;
  PencilDecomposition decomposition_;
};

/// Free-function form of StructuredPencil::evaluate.
inline MatrixXd build_pencil(PencilKind kind, const AffineFamily& famA, const AffineFamily* famB,
                             const VectorXd& theta, double mu, double lambda) {
  std::optional<AffineFamily> b;
  if (famB) b = *famB;
  return StructuredPencil(kind, famA, std::move(b)).evaluate(theta, mu, lambda);
}

}  // namespace sradius
