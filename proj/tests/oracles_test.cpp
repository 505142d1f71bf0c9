#include "sradius/benchmarks.hpp"
#include "sradius/oracles.hpp"
#include "sradius/radius.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace sradius;
using benchmarks::DeltaShape;

namespace {

MatrixXd random_matrix(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> d;
  MatrixXd M(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) M(i, j) = d(rng);
  return M;
}

bool contains(const VectorXcd& ev, std::complex<double> z, double tol) {
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i] - z) <= tol) return true;
  return false;
}

AffineFamily scalar_toy() {
  MatrixXd a(1, 1), a1(1, 1);
  a << -1;
  a1 << 1;
  return AffineFamily(a, {a1});
}

}  // namespace

TEST(Stability, ChannelMatrixEigenvalues) {
  const StabilityReport r = is_stable(benchmarks::channel_a());
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(r.abscissa, -1.0, 1e-10);
  for (auto z : {std::complex<double>(-1, 10), {-1, -10}, {-1, 1}, {-1, -1}}) EXPECT_TRUE(contains(r.eigenvalues, z, 1e-9));
}

TEST(Stability, Identity) {
  EXPECT_FALSE(is_stable(MatrixXd::Identity(3, 3)).stable);
  EXPECT_DOUBLE_EQ(is_stable(MatrixXd::Identity(3, 3)).abscissa, 1.0);
  EXPECT_TRUE(is_stable(-MatrixXd::Identity(3, 3)).stable);
  EXPECT_DOUBLE_EQ(is_stable(-MatrixXd::Identity(3, 3)).abscissa, -1.0);
}

TEST(Stability, AgreesWithAbscissaSign) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    MatrixXd A = random_matrix(rng, 4, 4);
    const double shift = is_stable(A).abscissa + (t % 2 ? 0.5 : -0.5);
    A -= shift * MatrixXd::Identity(4, 4);  // abscissa becomes ∓0.5
    const StabilityReport r = is_stable(A);
    EXPECT_EQ(r.stable, r.abscissa < 0);
    EXPECT_NEAR(r.abscissa, t % 2 ? -0.5 : 0.5, 1e-9);
  }
}

TEST(Ucon, ControllableCanonicalPair) {
  MatrixXd A(3, 3), B(3, 1);
  A << 0, 1, 0,  //
      0, 0, 1,   //
      -6, -11, -6;
  B << 0, 0, 1;
  EXPECT_GT(m_ucon(A, B), 1e-3);
  EXPECT_TRUE(pbh_controllability(A, B));
}

TEST(Ucon, ZeroInput) {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 0) = 1, A(1, 1) = 2;
  const auto m = m_ucon_detail(A, MatrixXd::Zero(2, 1));
  EXPECT_NEAR(m.value, 0.0, 1e-14);
  EXPECT_FALSE(pbh_controllability(A, MatrixXd::Zero(2, 1)));
}

TEST(Ucon, SparseSystemPerturbation) {
  VectorXd th(9);
  th << 0.0358, -0.3825, -0.6774, -0.2945, 1.7613, 0.5038, 1.6916, 0.6628, 0.5647;
  th *= 1e-3;
  const MatrixXd D = benchmarks::sparse_perturbation(th);
  const auto m = m_ucon_detail(benchmarks::sparse_a() + D.leftCols(4), benchmarks::sparse_b() + D.rightCols(1));
  EXPECT_LE(m.value, 1e-6);
  EXPECT_NEAR(m.eigenvalue.real(), -0.0006770, 1e-6);
  EXPECT_NEAR(m.eigenvalue.imag(), 0.0, 1e-9);
}

TEST(Pbh, TextbookPairs) {
  MatrixXd A = MatrixXd::Zero(2, 2), B = MatrixXd::Ones(2, 1);
  A(0, 0) = 1, A(1, 1) = 2;
  EXPECT_TRUE(pbh_controllability(A, B));
  EXPECT_FALSE(pbh_controllability(MatrixXd::Identity(2, 2), B));
}

TEST(Pbh, MetricAgreesOnRandomInstances) {
  std::mt19937_64 rng(2);
  int planted = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + t % 4, m = 1 + t % 2;
    MatrixXd A = random_matrix(rng, n, n), B = random_matrix(rng, n, m);
    if (t % 3 == 0) {
      // plant an uncontrollable mode: shared left eigenvector w with wᵀB = 0
      const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(random_matrix(rng, n, n)).householderQ();
      MatrixXd Ab = random_matrix(rng, n, n), Bb = random_matrix(rng, n, m);
      Ab.row(n - 1).head(n - 1).setZero();
      Bb.row(n - 1).setZero();
      A = Q * Ab * Q.transpose();
      B = Q * Bb;
      ++planted;
    }
    const double metric = m_ucon(A, B);
    EXPECT_EQ(metric <= 1e-8, !pbh_controllability(A, B)) << "instance " << t << " metric " << metric;
    if (t % 3 == 0) {
      EXPECT_LE(metric, 1e-8);
    }
  }
  EXPECT_GT(planted, 50);
}

TEST(Pbh, PencilSigmaMatchesComplexSvd) {
  std::mt19937_64 rng(3);
  const MatrixXd A = random_matrix(rng, 3, 3), B = random_matrix(rng, 3, 2);
  const std::complex<double> z(0.3, -1.2);
  Eigen::MatrixXcd P(3, 5);
  P.leftCols(3) = A.cast<std::complex<double>>() - z * Eigen::MatrixXcd::Identity(3, 3);
  P.rightCols(2) = B.cast<std::complex<double>>();
  EXPECT_NEAR(pencil_sigma(A, B, z), Eigen::JacobiSVD<Eigen::MatrixXcd>(P).singularValues()[2], 1e-10);
}

TEST(GridOracle, ScalarToy) {
  const GridOracleResult r =
      rssr_grid_oracle(scalar_toy(), StructureMap::vector(1), NormKind::Frobenius, {{0.0, 2.0}}, 201);
  ASSERT_TRUE(r.found);
  EXPECT_NEAR(r.points[r.argmin].theta[0], 1.0, 0.01);
  EXPECT_NEAR(r.radius, 1.0, 0.01);
  for (auto i : r.crossings) EXPECT_GE(r.points[i].theta[0], 1.0 - 0.01);
}

TEST(GridOracle, InteriorBoxHasNoCrossings) {
  const GridOracleResult r = rssr_grid_oracle(benchmarks::channel_family(DeltaShape::Diagonal),
                                              benchmarks::channel_map(DeltaShape::Diagonal), NormKind::Spectral,
                                              {{-0.1, 0.1}, {-0.1, 0.1}}, 41);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.message, "no instability found in box");
  for (const auto& pt : r.points) EXPECT_LT(pt.abscissa, 0.0);
}

TEST(GridOracle, CaseTwoBoxTouchesAxisOnBoundary) {
  const double h = 0.5284;
  const Index res = 101;
  const GridOracleResult r = rssr_grid_oracle(benchmarks::channel_family(DeltaShape::Diagonal),
                                              benchmarks::channel_map(DeltaShape::Diagonal), NormKind::Spectral,
                                              {{-h, h}, {-h, h}}, res);
  ASSERT_TRUE(r.found);
  const double cell = 2 * h / static_cast<double>(res - 1);
  for (auto i : r.crossings) {
    const VectorXd& th = r.points[i].theta;
    EXPECT_GE(th.cwiseAbs().maxCoeff(), h - cell - 1e-12);
  }
  EXPECT_NEAR(r.radius, h, cell + 1e-12);
}

TEST(GridOracle, LowerEnvelopeOfSolver) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Spectral);
  const Index res = 81;
  const double h = 0.6;
  const GridOracleResult r =
      rssr_grid_oracle(prob.pencil().a(), prob.map(), prob.norm(), {{-h, h}, {-h, h}}, res);
  ASSERT_TRUE(r.found);
  for (std::uint64_t s = 0; s < 3; ++s) {
    SolverConfig cfg;
    cfg.seed = trial_seed(5, s);
    const RadiusResult sol = run(prob, cfg);
    if (sol.status == RunStatus::SolverFailure) continue;
    EXPECT_LE(r.radius, sol.radius + 2 * h / static_cast<double>(res - 1));
  }
}

TEST(GridOracle, Preconditions) {
  const auto fam = benchmarks::channel_family(DeltaShape::Full);
  EXPECT_THROW(rssr_grid_oracle(fam, benchmarks::channel_map(DeltaShape::Full), NormKind::Spectral,
                                std::vector<std::pair<double, double>>(4, {-1, 1}), 5),
               std::invalid_argument);
  MatrixXd a(1, 1), a1(1, 1);
  a << 1;
  a1 << 1;
  EXPECT_THROW(rssr_grid_oracle(AffineFamily(a, {a1}), StructureMap::vector(1), NormKind::Spectral, {{0, 1}}, 5),
               PreconditionError);
}

TEST(GridOracle, CsvOutput) {
  const GridOracleResult r =
      rssr_grid_oracle(scalar_toy(), StructureMap::vector(1), NormKind::Frobenius, {{0.0, 2.0}}, 5);
  std::ostringstream cloud, env;
  write_eigen_cloud_csv(cloud, r);
  write_envelope_csv(env, r, NormKind::Frobenius);
  std::istringstream cs(cloud.str()), es(env.str());
  std::string line;
  std::getline(cs, line);
  EXPECT_EQ(line, "theta1,re,im");
  int rows = 0;
  while (std::getline(cs, line)) ++rows;
  EXPECT_EQ(rows, 5);
  std::getline(es, line);
  EXPECT_EQ(line.rfind("theta1,", 0), 0U);
  std::getline(es, line);
  EXPECT_NE(line.find(','), std::string::npos);
}
