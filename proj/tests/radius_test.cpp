#include "sradius/benchmarks.hpp"
#include "sradius/hardness.hpp"
#include "sradius/radius.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sradius;
using benchmarks::DeltaShape;

namespace {

SolverConfig seeded(std::uint64_t seed) {
  SolverConfig cfg;
  cfg.seed = seed;
  return cfg;
}

void expect_monotone(const std::vector<TracePoint>& trace, double slack) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].stage == trace[i - 1].stage) {
      EXPECT_LE(trace[i].f, trace[i - 1].f + slack) << "stage " << trace[i].stage << " k " << trace[i].k;
    }
}

// A = diag(1, 2), B = 0: uncontrollable for every θ
RadiusProblem zero_input_problem() {
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 0) = 1, A(1, 1) = 2;
  MatrixXd A1 = MatrixXd::Zero(2, 2);
  A1(0, 1) = 1;
  AffineFamily fa(A, {A1});
  AffineFamily fb(MatrixXd::Zero(2, 1), {MatrixXd::Zero(2, 1)});
  return RadiusProblem(StructuredPencil(PencilKind::Controllability, fa, fb), StructureMap::vector(1),
                       NormKind::Frobenius);
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.xi = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.gamma_cap = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Gamma, CappedAndUncapped) {
  SolverConfig cfg;
  EXPECT_DOUBLE_EQ(select_gamma(cfg, 0.3), 5.0);
  EXPECT_DOUBLE_EQ(select_gamma(cfg, 1e-5), 0.1);
  cfg.gamma_policy = GammaPolicy::Uncapped;
  EXPECT_DOUBLE_EQ(select_gamma(cfg, 0.3), 3000.0);
  EXPECT_DOUBLE_EQ(select_gamma(cfg, 0.0), cfg.gamma_cap);
}

TEST(Seeds, TrialSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(trial_seed(42, t));
  EXPECT_EQ(seen.size(), 1000U);
  EXPECT_EQ(trial_seed(7, 3), trial_seed(7, 3));
  EXPECT_NE(trial_seed(7, 3), trial_seed(8, 3));
}

TEST(RandomStart, RangesAndMuClipping) {
  const RadiusProblem stz = benchmarks::sparse_problem(PencilKind::Stabilizability);
  const RadiusProblem con = benchmarks::sparse_problem(PencilKind::Controllability);
  bool saw_negative_mu = false;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const IterateState a = random_start(stz, seeded(s));
    ASSERT_TRUE(a.mu.has_value());
    EXPECT_GE(*a.mu, 0.0);
    EXPECT_GE(a.theta.minCoeff(), 0.0);
    EXPECT_LE(a.theta.maxCoeff(), 1.0);
    EXPECT_GE(a.lambda, -2.0);
    EXPECT_LE(a.lambda, 2.0);
    const IterateState b = random_start(con, seeded(s));
    saw_negative_mu = saw_negative_mu || *b.mu < 0.0;
    EXPECT_TRUE(b.z.isApprox(con.pencil().evaluate(b.theta, *b.mu, b.lambda)));
  }
  EXPECT_TRUE(saw_negative_mu);
  EXPECT_FALSE(random_start(benchmarks::channel_stability(DeltaShape::Full, NormKind::Spectral), seeded(1)).mu);
}

TEST(Preconditions, UnstableBaseRejected) {
  auto [fa, fb] = benchmarks::sparse_families();
  const RadiusProblem prob(StructuredPencil(PencilKind::Stability, fa), StructureMap::vector(9), NormKind::Frobenius);
  EXPECT_THROW(check_preconditions(prob), PreconditionError);
  EXPECT_THROW(run(prob, seeded(0)), PreconditionError);
}

TEST(FeasibilityStage, ZeroInputIsImmediatelyFeasible) {
  const RadiusProblem prob = zero_input_problem();
  for (std::uint64_t s = 0; s < 5; ++s) {
    int iters = 0;
    const IterateState st = feasibility_stage(prob, seeded(s), std::nullopt, nullptr, &iters);
    EXPECT_LE(st.sigma_min, 1e-6);
    EXPECT_LE(iters, 5);
  }
}

TEST(FeasibilityStage, ChannelStabilityTerminatesQuickly) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Full, NormKind::Frobenius);
  int total = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    int iters = 0;
    std::vector<TracePoint> trace;
    const IterateState st = feasibility_stage(prob, seeded(trial_seed(0, s)), std::nullopt, &trace, &iters);
    EXPECT_LE(st.sigma_min, 1e-6);
    expect_monotone(trace, 1e-7);
    total += iters;
  }
  EXPECT_LE(total / 10.0, 5.0);
}

TEST(FeasibilityStage, InfeasibleSubsetSumStalls) {
  SubsetSumInstance inst{{1, 2}};
  ASSERT_FALSE(subset_sum_bruteforce(inst).feasible);
  const auto red = build_rscr_reduction(inst);
  const RadiusProblem prob(StructuredPencil(PencilKind::Controllability, red.a, red.b), StructureMap::vector(2),
                           NormKind::Frobenius);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const IterateState st = feasibility_stage(prob, seeded(s));
    EXPECT_GT(st.sigma_min, 1e-6) << "seed " << s;
  }
}

TEST(Run, ChannelCaseTwoFrobenius) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius);
  const RadiusResult res = run(prob, seeded(trial_seed(0, 0)));
  EXPECT_EQ(res.status, RunStatus::ToleranceMet) << res.message;
  EXPECT_NEAR(res.radius, 0.5653, 1e-3);
  EXPECT_DOUBLE_EQ(res.radius, radius_of(g_value(prob.map(), res.theta, prob.norm()), prob.norm()));
  EXPECT_LE(res.sigma_min, 1e-4);
  EXPECT_DOUBLE_EQ(res.gamma, 5.0);
  EXPECT_EQ(res.total_iterations(), res.stage1_iterations + res.stage2_iterations);
  expect_monotone(res.trace, 1e-7);
  const Certificate cert = verify_result(prob, res);
  ASSERT_TRUE(cert.axis_distance.has_value());
  EXPECT_LE(*cert.axis_distance, 1e-3);
  EXPECT_NEAR(cert.sigma_min, res.sigma_min, 1e-12);
}

TEST(Run, TraceLayout) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Spectral);
  const RadiusResult res = run(prob, seeded(5));
  ASSERT_FALSE(res.trace.empty());
  EXPECT_EQ(res.trace.front().stage, 1);
  EXPECT_EQ(res.trace.front().k, 0);
  EXPECT_EQ(res.trace.back().stage, 2);
  int s1 = 0, s2 = 0;
  for (const auto& t : res.trace) (t.stage == 1 ? s1 : s2)++;
  EXPECT_LE(s1, res.stage1_iterations + 1);
  EXPECT_LE(s2, res.stage2_iterations + 1);
}

TEST(Run, Deterministic) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Full, NormKind::Spectral);
  const RadiusResult a = run(prob, seeded(99)), b = run(prob, seeded(99));
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_EQ(a.theta, b.theta);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].f, b.trace[i].f);
}

TEST(Run, StabilizabilityMuStaysNonnegative) {
  const RadiusProblem prob = benchmarks::sparse_problem(PencilKind::Stabilizability);
  for (std::uint64_t s = 0; s < 3; ++s) {
    SolverConfig cfg = seeded(trial_seed(1, s));
    cfg.max_iter = 100;
    const RadiusResult res = run(prob, cfg);
    ASSERT_TRUE(res.mu.has_value());
    EXPECT_GE(*res.mu, -1e-9);
    expect_monotone(res.trace, 1e-7);
  }
}

TEST(Run, SingleStageUsesFixedGamma) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius);
  SolverConfig cfg = seeded(3);
  cfg.two_stage = false;
  cfg.gamma_fixed = 4.0;
  const RadiusResult res = run(prob, cfg);
  EXPECT_EQ(res.stage1_iterations, 0);
  EXPECT_DOUBLE_EQ(res.gamma, 4.0);
  for (const auto& t : res.trace) EXPECT_EQ(t.stage, 2);
}

TEST(Run, FeasibleInitSkipsStageOne) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius);
  const IterateState s1 = feasibility_stage(prob, seeded(4));
  const RadiusResult res = run(prob, seeded(4), Init::feasible(s1));
  EXPECT_EQ(res.stage1_iterations, 0);
  EXPECT_NEAR(res.stage1_sigma, s1.sigma_min, 1e-12);
  EXPECT_NEAR(res.radius, 0.5653, 1e-3);
}

TEST(Run, WarmStartAtOptimumStaysPut) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius);
  const RadiusResult first = run(prob, seeded(6));
  IterateState s;
  s.theta = first.theta;
  s.lambda = first.lambda;
  SolverConfig cfg = seeded(6);
  cfg.two_stage = false;
  const RadiusResult again = run(prob, cfg, Init::warm(s));
  EXPECT_NEAR(again.radius, first.radius, 1e-4);
  EXPECT_LE(again.stage2_iterations, 3);
}

TEST(Run, WarmStateWithWrongSizeRejected) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius);
  IterateState s;
  s.theta = VectorXd::Zero(3);
  EXPECT_THROW(run(prob, seeded(0), Init::warm(s)), std::invalid_argument);
}

TEST(Verify, TableCaseOneSpectralPerturbation) {
  const RadiusProblem prob = benchmarks::channel_stability(DeltaShape::Full, NormKind::Spectral);
  RadiusResult res;
  res.theta.resize(4);
  res.theta << -0.4973, 0.1269, 0.1269, 0.4973;
  res.lambda = 1.3744;
  const Certificate c = verify_result(prob, res);
  ASSERT_TRUE(c.axis_distance.has_value());
  EXPECT_LE(*c.axis_distance, 1e-3);
  int on_axis = 0;
  for (Index i = 0; i < c.eigenvalues.size(); ++i)
    if (std::abs(c.eigenvalues[i].real()) <= 1e-3 && std::abs(std::abs(c.eigenvalues[i].imag()) - 1.3744) <= 1e-3)
      ++on_axis;
  EXPECT_EQ(on_axis, 2);
  EXPECT_LE(c.sigma_min, 1e-3);
}

TEST(Verify, ControllableStartHasPositiveMetric) {
  MatrixXd A(3, 3), B(3, 1);
  A << 0, 1, 0,  //
      0, 0, 1,   //
      -6, -11, -6;
  B << 0, 0, 1;
  std::vector<MatrixXd> ba(2, MatrixXd::Zero(3, 3)), bb(2, MatrixXd::Zero(3, 1));
  ba[0](2, 0) = 1;
  bb[1](0, 0) = 1;
  const RadiusProblem prob(StructuredPencil(PencilKind::Controllability, AffineFamily(A, ba), AffineFamily(B, bb)),
                           StructureMap::vector(2), NormKind::Frobenius);
  RadiusResult res;
  res.theta = VectorXd::Zero(2);
  res.mu = 0.0;
  const Certificate c = verify_result(prob, res);
  ASSERT_TRUE(c.m_ucon.has_value());
  EXPECT_GT(*c.m_ucon, 1e-3);
  EXPECT_FALSE(c.axis_distance.has_value());
}

TEST(Verify, SparseSystemHasUncontrollableNominalMode) {
  const RadiusProblem prob = benchmarks::sparse_problem(PencilKind::Controllability);
  RadiusResult res;
  res.theta = VectorXd::Zero(9);
  res.mu = 0.0;
  const Certificate c = verify_result(prob, res);
  ASSERT_TRUE(c.m_ucon.has_value());
  EXPECT_LE(*c.m_ucon, 1e-12);
  ASSERT_TRUE(c.mode.has_value());
  EXPECT_NEAR(std::abs(*c.mode), 0.0, 1e-12);
}
