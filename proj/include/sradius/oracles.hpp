#pragma once

// Independent verification oracles: PBH-style uncontrollability metrics,
// Hurwitz stability, and a brute-force grid scan for small stability
// radius problems.

#include "sradius/affine.hpp"
#include "sradius/errors.hpp"
#include "sradius/realify.hpp"
#include "sradius/tnn.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace sradius {

using Eigen::VectorXcd;

inline VectorXcd eigenvalues(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  detail::require_finite(A, "eigenvalues");
  Eigen::EigenSolver<MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: eigen-solver did not converge");
  return es.eigenvalues();
}

struct StabilityReport {
  bool stable = false;
  double abscissa = 0.0;  // max real part
  VectorXcd eigenvalues;
};

inline StabilityReport is_stable(const MatrixXd& A) {
  StabilityReport r;
  r.eigenvalues = eigenvalues(A);
  r.abscissa = r.eigenvalues.size() ? r.eigenvalues.real().maxCoeff() : -std::numeric_limits<double>::infinity();
  r.stable = r.abscissa < 0.0;
  return r;
}

/// σ_n([A − zI, B]) computed through the real embedding.
inline double pencil_sigma(const MatrixXd& A, const MatrixXd& B, std::complex<double> z) {
  const Index n = A.rows();
  if (A.cols() != n || B.rows() != n) throw std::invalid_argument("pencil_sigma: inconsistent dimensions");
  MatrixXd X(n, n + B.cols()), Y = MatrixXd::Zero(n, n + B.cols());
  X << A - z.real() * MatrixXd::Identity(n, n), B;
  Y.leftCols(n) = -z.imag() * MatrixXd::Identity(n, n);
  return sigma_min(realify(X, Y));
}

struct UncontrollabilityMetric {
  double value = std::numeric_limits<double>::infinity();
  std::complex<double> eigenvalue;  // minimizing mode
};

/// min over z ∈ Λ(A) of σ_n([A − zI, B]); A and B are the perturbed matrices.
inline UncontrollabilityMetric m_ucon_detail(const MatrixXd& A, const MatrixXd& B) {
  if (A.rows() != A.cols()) throw std::invalid_argument("m_ucon: A must be square");
  if (B.rows() != A.rows()) throw std::invalid_argument("m_ucon: B must have as many rows as A");
  UncontrollabilityMetric best;
  const VectorXcd ev = eigenvalues(A);
  for (Index i = 0; i < ev.size(); ++i) {
    const double s = pencil_sigma(A, B, ev[i]);
    if (s < best.value) {
      best.value = s;
      best.eigenvalue = ev[i];
    }
  }
  return best;
}

inline double m_ucon(const MatrixXd& A, const MatrixXd& B) { return m_ucon_detail(A, B).value; }

/// PBH test with rank tolerance 1e-8·(1 + ‖[A, B]‖₂).
inline bool pbh_controllability(const MatrixXd& A, const MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw std::invalid_argument("pbh_controllability: inconsistent dimensions");
  MatrixXd AB(A.rows(), A.cols() + B.cols());
  AB << A, B;
  const double tol = 1e-8 * (1.0 + (AB.size() ? singular_values(AB)[0] : 0.0));
  const VectorXcd ev = eigenvalues(A);
  for (Index i = 0; i < ev.size(); ++i)
    if (pencil_sigma(A, B, ev[i]) <= tol) return false;
  return true;
}

struct GridPoint {
  VectorXd theta;
  double g = 0.0;
  double abscissa = 0.0;
  double local_variation = 0.0;  // half the largest abscissa change to a grid neighbour
  VectorXcd eigenvalues;
};

struct GridOracleResult {
  std::vector<GridPoint> points;    // full cloud, row-major over the grid
  std::vector<std::size_t> crossings;  // indices of points touching the imaginary axis
  bool found = false;
  double min_g = std::numeric_limits<double>::infinity();
  double radius = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
  double axis_tol = 0.0;  // largest local_variation used
  std::vector<Index> resolution;
  std::string message;
};

/// Scans A(θ) over a box (one interval per parameter, `resolution` points
/// per axis) and reports grid points whose spectral abscissa reaches the
/// imaginary axis within half the local grid-induced variation.
inline GridOracleResult rssr_grid_oracle(const AffineFamily& famA, const StructureMap& map, NormKind norm,
                                         const std::vector<std::pair<double, double>>& box, Index resolution) {
  const Index p = famA.num_params();
  if (p > 3) throw std::invalid_argument("rssr_grid_oracle: at most 3 parameters (cost is resolution^p)");
  if (static_cast<Index>(box.size()) != p) throw std::invalid_argument("rssr_grid_oracle: one interval per parameter");
  if (map.num_params() != p) throw std::invalid_argument("rssr_grid_oracle: structure map parameter count mismatch");
  if (resolution < 2) throw std::invalid_argument("rssr_grid_oracle: resolution must be at least 2");
  if (!is_stable(famA.base()).stable) throw PreconditionError("rssr_grid_oracle: base matrix is not stable");

  GridOracleResult res;
  res.resolution.assign(static_cast<std::size_t>(p), resolution);
  Index total = 1;
  for (Index i = 0; i < p; ++i) total *= resolution;
  res.points.resize(static_cast<std::size_t>(total));

  auto coords = [&](Index flat) {
    std::vector<Index> idx(static_cast<std::size_t>(p));
    for (Index d = p - 1; d >= 0; --d) {
      idx[static_cast<std::size_t>(d)] = flat % resolution;
      flat /= resolution;
    }
    return idx;
  };

  for (Index flat = 0; flat < total; ++flat) {
    const auto idx = coords(flat);
    VectorXd theta(p);
    for (Index d = 0; d < p; ++d) {
      const auto [lo, hi] = box[static_cast<std::size_t>(d)];
      theta[d] = lo + (hi - lo) * static_cast<double>(idx[static_cast<std::size_t>(d)]) / static_cast<double>(resolution - 1);
    }
    auto& pt = res.points[static_cast<std::size_t>(flat)];
    pt.theta = theta;
    pt.g = g_value(map, theta, norm);
    const auto st = is_stable(famA.evaluate(theta));
    pt.abscissa = st.abscissa;
    pt.eigenvalues = st.eigenvalues;
  }

  Index stride = 1;
  std::vector<Index> strides(static_cast<std::size_t>(p));
  for (Index d = p - 1; d >= 0; --d) {
    strides[static_cast<std::size_t>(d)] = stride;
    stride *= resolution;
  }
  for (Index flat = 0; flat < total; ++flat) {
    const auto idx = coords(flat);
    double var = 0.0;
    for (Index d = 0; d < p; ++d) {
      const Index s = strides[static_cast<std::size_t>(d)];
      const double a = res.points[static_cast<std::size_t>(flat)].abscissa;
      if (idx[static_cast<std::size_t>(d)] > 0)
        var = std::max(var, std::abs(a - res.points[static_cast<std::size_t>(flat - s)].abscissa));
      if (idx[static_cast<std::size_t>(d)] + 1 < resolution)
        var = std::max(var, std::abs(a - res.points[static_cast<std::size_t>(flat + s)].abscissa));
    }
    auto& pt = res.points[static_cast<std::size_t>(flat)];
    pt.local_variation = 0.5 * var;
    res.axis_tol = std::max(res.axis_tol, pt.local_variation);
    if (pt.abscissa >= -pt.local_variation) {
      res.crossings.push_back(static_cast<std::size_t>(flat));
      if (pt.g < res.min_g) {
        res.min_g = pt.g;
        res.argmin = static_cast<std::size_t>(flat);
      }
    }
  }
  res.found = !res.crossings.empty();
  if (res.found) {
    res.radius = radius_of(res.min_g, norm);
  } else {
    res.message = "no instability found in box";
  }
  return res;
}

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace detail

/// theta_1..theta_p,re,im: one row per eigenvalue per grid point.
inline void write_eigen_cloud_csv(std::ostream& os, const GridOracleResult& res) {
  const Index p = res.points.empty() ? 0 : res.points.front().theta.size();
  for (Index d = 0; d < p; ++d) os << "theta" << d + 1 << ',';
  os << "re,im\n";
  for (const auto& pt : res.points)
    for (Index k = 0; k < pt.eigenvalues.size(); ++k) {
      for (Index d = 0; d < p; ++d) os << detail::fmt_double(pt.theta[d]) << ',';
      os << detail::fmt_double(pt.eigenvalues[k].real()) << ',' << detail::fmt_double(pt.eigenvalues[k].imag())
         << '\n';
    }
}

/// theta_1..theta_p,g,radius,abscissa,axis_tol: one row per crossing.
inline void write_envelope_csv(std::ostream& os, const GridOracleResult& res, NormKind norm) {
  const Index p = res.points.empty() ? 0 : res.points.front().theta.size();
  for (Index d = 0; d < p; ++d) os << "theta" << d + 1 << ',';
  os << "g,radius,abscissa,axis_tol\n";
  for (std::size_t i : res.crossings) {
    const auto& pt = res.points[i];
    for (Index d = 0; d < p; ++d) os << detail::fmt_double(pt.theta[d]) << ',';
    os << detail::fmt_double(pt.g) << ',' << detail::fmt_double(radius_of(pt.g, norm)) << ','
       << detail::fmt_double(pt.abscissa) << ',' << detail::fmt_double(pt.local_variation) << '\n';
  }
}

}  // namespace sradius
