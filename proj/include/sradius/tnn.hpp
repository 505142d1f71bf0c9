#pragma once

// Truncated nuclear norm machinery: SVD partition at an iterate, Ky Fan
// norms, and the linearization of the Ky Fan term used by the DC iteration.

#include "sradius/affine.hpp"
#include "sradius/errors.hpp"

#include <algorithm>
#include <sstream>

namespace sradius {

/// Top-r singular subspaces of an iterate. U1ᵀ·(·)·V1 linearizes ‖·‖_{F_r}.
struct SvdPartition {
  MatrixXd U1;
  MatrixXd V1;
  VectorXd singulars;  // all min(rows, cols) values, descending
  Index r = 0;
};

namespace detail {

inline void require_finite(const MatrixXd& Z, const char* where) {
  if (!Z.allFinite()) {
    std::ostringstream os;
    os << where << ": matrix " << Z.rows() << "x" << Z.cols() << " has non-finite entries";
    throw NumericalError(os.str());
  }
}

inline void require_rank_arg(const MatrixXd& Z, Index r, const char* where) {
  if (r < 1 || r > std::min(Z.rows(), Z.cols()))
    throw std::invalid_argument(std::string(where) + ": r must lie in [1, min(rows, cols)]");
}

}  // namespace detail

inline VectorXd singular_values(const MatrixXd& Z) {
  detail::require_finite(Z, "singular_values");
  return Eigen::JacobiSVD<MatrixXd>(Z).singularValues();
}

inline SvdPartition svd_partition(const MatrixXd& Z, Index r) {
  detail::require_rank_arg(Z, r, "svd_partition");
  detail::require_finite(Z, "svd_partition");
  Eigen::JacobiSVD<MatrixXd> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdPartition part;
  part.r = r;
  part.singulars = svd.singularValues();
  part.U1 = svd.matrixU().leftCols(r);
  part.V1 = svd.matrixV().leftCols(r);
  return part;
}

inline double nuclear(const MatrixXd& Z) { return singular_values(Z).sum(); }

inline double ky_fan(const MatrixXd& Z, Index r) {
  detail::require_rank_arg(Z, r, "ky_fan");
  return singular_values(Z).head(r).sum();
}

/// ‖Z‖_* − ‖Z‖_{F_r}: the sum of the trailing singular values.
inline double tnnr(const MatrixXd& Z, Index r) {
  detail::require_rank_arg(Z, r, "tnnr");
  const VectorXd s = singular_values(Z);
  return s.tail(s.size() - r).sum();
}

/// tr(U1ᵀ Z V1).
inline double linearized_term(const MatrixXd& Z, const SvdPartition& part) {
  if (Z.rows() != part.U1.rows() || Z.cols() != part.V1.rows())
    throw std::invalid_argument("linearized_term: Z does not match the partition's shape");
  return (part.U1.transpose() * Z * part.V1).trace();
}

/// Smallest singular value of a wide (or square) matrix, i.e. σ_rows(Z).
inline double sigma_min(const MatrixXd& Z) {
  const VectorXd s = singular_values(Z);
  return s.size() ? s[s.size() - 1] : 0.0;
}

/// Reporting-only rank test: σ_min ≤ 1e-9·max(1, σ₁).
inline bool is_row_rank_deficient(const MatrixXd& Z, double rel_tol = 1e-9) {
  const VectorXd s = singular_values(Z);
  if (s.size() < Z.rows()) return true;
  return s[s.size() - 1] <= rel_tol * std::max(1.0, s[0]);
}

}  // namespace sradius
