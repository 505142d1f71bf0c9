#pragma once

// Majorization-minimization solvers for the structured controllability,
// stabilizability and stability radii. Each iteration linearizes the Ky Fan
// (2n−1)-norm at the current pencil and solves the resulting convex conic
// subproblem. The two-stage variant first drives the truncated nuclear norm
// of the pencil towards zero, then trades it against g(θ) with weight γ.

#include "sradius/affine.hpp"
#include "sradius/conic/encode.hpp"
#include "sradius/conic/sdp.hpp"
#include "sradius/errors.hpp"
#include "sradius/oracles.hpp"
#include "sradius/realify.hpp"
#include "sradius/tnn.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sradius {

/// A radius problem: the pencil, the structure map Γ and the norm.
class RadiusProblem {
 public:
  RadiusProblem(StructuredPencil pencil, StructureMap map, NormKind norm)
      : pencil_(std::move(pencil)), map_(std::move(map)), norm_(norm) {
    if (map_.num_params() != pencil_.num_params())
      throw std::invalid_argument("RadiusProblem: structure map has " + std::to_string(map_.num_params()) +
                                  " parameters, system has " + std::to_string(pencil_.num_params()));
  }

  PencilKind kind() const { return pencil_.kind(); }
  const StructuredPencil& pencil() const { return pencil_; }
  const StructureMap& map() const { return map_; }
  NormKind norm() const { return norm_; }
  Index n() const { return pencil_.n(); }
  Index num_params() const { return pencil_.num_params(); }
  /// 2n − 1 for all three pencils.
  Index truncation() const { return pencil_.rows() - 1; }

 private:
  StructuredPencil pencil_;
  StructureMap map_;
  NormKind norm_;
};

enum class GammaPolicy { Capped, Uncapped };

/// Uniform initialization ranges for (θ̃⁰, λ̃⁰, μ̃⁰).
struct InitRanges {
  double theta_lo = 0.0, theta_hi = 1.0;
  double lambda_lo = -2.0, lambda_hi = 2.0;
  double mu_lo = -2.0, mu_hi = 2.0;
};

struct SolverConfig {
  double eps = 1e-4;  // target on σ_2n(Z*)
  double xi = 1e-5;   // |ΔF| convergence threshold
  int max_iter = 600;  // per stage
  GammaPolicy gamma_policy = GammaPolicy::Capped;
  double gamma_cap = 5.0;
  double gamma_fixed = 5.0;  // single-stage γ
  bool two_stage = true;
  InitRanges init;
  std::uint64_t seed = 0;
  bool keep_trace = true;
  conic::SdpSettings sdp = conic::SdpSettings::from_environment();

  void validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("SolverConfig: eps must be positive");
    if (!(xi > 0.0)) throw std::invalid_argument("SolverConfig: xi must be positive");
    if (!(gamma_cap > 0.0)) throw std::invalid_argument("SolverConfig: gamma cap must be positive");
    if (!(gamma_fixed > 0.0)) throw std::invalid_argument("SolverConfig: fixed gamma must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be at least 1");
  }
};

struct IterateState {
  VectorXd theta;
  double lambda = 0.0;
  std::optional<double> mu;  // absent for stability
  MatrixXd z;
  double f = 0.0;
  double sigma_min = 0.0;  // σ_2n(Z)
  int iteration = 0;
};

struct TracePoint {
  int stage = 0;  // 1 = feasibility, 2 = γ-weighted
  int k = 0;
  double f = 0.0;
  double sigma_min = 0.0;
};

enum class RunStatus { ToleranceMet, Converged, MaxIter, SolverFailure };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ToleranceMet: return "tolerance-met";
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIter: return "max-iter";
    case RunStatus::SolverFailure: return "solver-failure";
  }
  return "?";
}

struct RadiusResult {
  double radius = 0.0;
  double g = 0.0;
  VectorXd theta;
  double lambda = 0.0;
  std::optional<double> mu;
  double sigma_min = 0.0;
  int stage1_iterations = 0;
  int stage2_iterations = 0;
  double gamma = 0.0;
  double stage1_sigma = 0.0;  // σ_2n at the end of stage 1 (audits the tolerance guarantee)
  double stage1_g = 0.0;
  double rejected_increase = 0.0;  // largest F increase of a rejected step, either stage
  std::vector<TracePoint> trace;
  RunStatus status = RunStatus::Converged;
  std::string message;

  int total_iterations() const { return stage1_iterations + stage2_iterations; }
};

/// How a run is started.
struct Init {
  enum class Mode { Random, Warm, Feasible };
  Mode mode = Mode::Random;
  IterateState state;

  static Init random() { return {}; }
  /// Start every configured stage from `s` instead of a random draw.
  static Init warm(IterateState s) { return {Mode::Warm, std::move(s)}; }
  /// Treat `s` as a stage-1 output: skip stage 1 and compute γ from it.
  static Init feasible(IterateState s) { return {Mode::Feasible, std::move(s)}; }
};

namespace detail {

inline double objective_value(const RadiusProblem& prob, const VectorXd& theta, double sigma_tail, double gamma,
                              bool feasibility) {
  return feasibility ? sigma_tail : g_value(prob.map(), theta, prob.norm()) + gamma * sigma_tail;
}

inline IterateState make_state(const RadiusProblem& prob, VectorXd theta, double lambda, std::optional<double> mu,
                               double gamma, bool feasibility) {
  IterateState s;
  s.theta = std::move(theta);
  s.lambda = lambda;
  s.mu = prob.pencil().has_mu() ? mu : std::nullopt;
  s.z = prob.pencil().evaluate(s.theta, s.mu.value_or(0.0), s.lambda);
  const double tail = tnnr(s.z, prob.truncation());
  s.sigma_min = tail;
  s.f = objective_value(prob, s.theta, tail, gamma, feasibility);
  return s;
}

struct LoopOutcome {
  IterateState state;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  double rejected_increase = 0.0;  // size of a rejected non-descent step
  std::string message;
};

inline LoopOutcome mm_loop(const RadiusProblem& prob, IterateState start, double gamma, bool feasibility,
                           int stage, const SolverConfig& cfg, std::vector<TracePoint>* trace) {
  LoopOutcome out;
  out.state = make_state(prob, start.theta, start.lambda, start.mu, gamma, feasibility);
  out.state.iteration = 0;
  if (trace) trace->push_back({stage, 0, out.state.f, out.state.sigma_min});

  conic::SubproblemOptions opts;
  opts.feasibility_only = feasibility;
  const double weight = feasibility ? 1.0 : gamma;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const SvdPartition part = svd_partition(out.state.z, prob.truncation());
    const conic::Subproblem sp = conic::build_subproblem(prob.pencil(), prob.map(), prob.norm(), part, weight, opts);
    const conic::ConicSolution sol = conic::solve(sp.program, cfg.sdp);
    if (!sol.ok()) {
      out.failed = true;
      out.message = std::string("stage ") + std::to_string(stage) + " iteration " + std::to_string(k) + ": " +
                    conic::to_string(sol.status) + " (" + sol.diagnostics.message + ")";
      return out;
    }
    VectorXd theta(prob.num_params());
    for (Index i = 0; i < theta.size(); ++i) theta[i] = sol.value(sp.theta[static_cast<std::size_t>(i)]);
    std::optional<double> mu;
    if (sp.mu) mu = sol.value(*sp.mu);
    // interior-point output may sit a rounding error below the μ ≥ 0 face
    if (mu && prob.kind() == PencilKind::Stabilizability) mu = std::max(0.0, *mu);
    const double prev_f = out.state.f;
    IterateState next = make_state(prob, std::move(theta), sol.value(sp.lambda), mu, gamma, feasibility);
    out.iterations = k;
    if (next.f > prev_f) {
      // the exact majorizer step cannot increase F; an increase is subproblem
      // solver error, so the previous iterate is kept as the fixed point
      out.converged = true;
      out.rejected_increase = next.f - prev_f;
      out.message = "non-descent step rejected at iteration " + std::to_string(k) + " (increase " +
                    std::to_string(next.f - prev_f) + ")";
      return out;
    }
    out.state = std::move(next);
    out.state.iteration = k;
    if (trace) trace->push_back({stage, k, out.state.f, out.state.sigma_min});
    if (prev_f - out.state.f <= cfg.xi) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace detail

/// Per-trial RNG stream derived from (master seed, trial index).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform draw of (θ̃⁰, λ̃⁰, μ̃⁰). For the stabilizability pencil μ̃⁰ is
/// clipped to [0, μ_hi].
inline IterateState random_start(const RadiusProblem& prob, const SolverConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> th(cfg.init.theta_lo, cfg.init.theta_hi);
  std::uniform_real_distribution<double> la(cfg.init.lambda_lo, cfg.init.lambda_hi);
  std::uniform_real_distribution<double> mu(cfg.init.mu_lo, cfg.init.mu_hi);
  IterateState s;
  s.theta.resize(prob.num_params());
  for (Index i = 0; i < s.theta.size(); ++i) s.theta[i] = th(rng);
  s.lambda = la(rng);
  const double m = mu(rng);
  if (prob.pencil().has_mu()) s.mu = prob.kind() == PencilKind::Stabilizability ? std::max(0.0, m) : m;
  return detail::make_state(prob, s.theta, s.lambda, s.mu, 1.0, true);
}

inline void check_preconditions(const RadiusProblem& prob) {
  if (prob.kind() == PencilKind::Stability) {
    const auto st = is_stable(prob.pencil().a().base());
    if (!st.stable)
      throw PreconditionError("stability radius requires a stable base matrix (spectral abscissa " +
                              std::to_string(st.abscissa) + ")");
  }
}

/// First stage: minimize ‖Z‖_* − ‖Z‖_{F_{2n−1}} over the pencil by the MM
/// iteration. The returned σ_2n is not guaranteed to vanish.
inline IterateState feasibility_stage(const RadiusProblem& prob, const SolverConfig& cfg,
                                      std::optional<IterateState> start = std::nullopt,
                                      std::vector<TracePoint>* trace = nullptr, int* iterations = nullptr) {
  cfg.validate();
  IterateState s0 = start ? std::move(*start) : random_start(prob, cfg);
  auto out = detail::mm_loop(prob, std::move(s0), 1.0, true, 1, cfg, trace);
  if (iterations) *iterations = out.iterations;
  if (out.failed) throw NumericalError(out.message);
  return out.state;
}

inline double select_gamma(const SolverConfig& cfg, double g0) {
  double gamma = g0 / cfg.eps;
  if (cfg.gamma_policy == GammaPolicy::Capped) gamma = std::min(cfg.gamma_cap, gamma);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) gamma = cfg.gamma_cap;
  return gamma;
}

/// Runs the configured algorithm: two-stage (feasibility stage, then the
/// γ-weighted stage warm-started from it) or single-stage with fixed γ.
inline RadiusResult run(const RadiusProblem& prob, const SolverConfig& cfg, const Init& init = Init::random()) {
  cfg.validate();
  check_preconditions(prob);
  RadiusResult res;
  std::vector<TracePoint> trace;
  std::vector<TracePoint>* tr = cfg.keep_trace ? &trace : nullptr;

  IterateState start = init.mode == Init::Mode::Random ? random_start(prob, cfg) : init.state;
  if (start.theta.size() != prob.num_params())
    throw std::invalid_argument("run: warm state has the wrong parameter count");
  if (prob.pencil().has_mu() && !start.mu) start.mu = 0.0;

  double gamma = cfg.gamma_fixed;
  IterateState stage2_start = start;
  if (init.mode == Init::Mode::Feasible || cfg.two_stage) {
    if (init.mode != Init::Mode::Feasible) {
      auto s1 = detail::mm_loop(prob, start, 1.0, true, 1, cfg, tr);
      res.stage1_iterations = s1.iterations;
      res.rejected_increase = s1.rejected_increase;
      if (s1.failed) {
        res.status = RunStatus::SolverFailure;
        res.message = s1.message;
        stage2_start = s1.state;
        res.theta = s1.state.theta;
        res.lambda = s1.state.lambda;
        res.mu = s1.state.mu;
        res.sigma_min = sigma_min(s1.state.z);
        res.g = g_value(prob.map(), res.theta, prob.norm());
        res.radius = radius_of(res.g, prob.norm());
        res.trace = std::move(trace);
        return res;
      }
      stage2_start = s1.state;
    }
    stage2_start.z = prob.pencil().evaluate(stage2_start.theta, stage2_start.mu.value_or(0.0), stage2_start.lambda);
    res.stage1_sigma = sigma_min(stage2_start.z);
    res.stage1_g = g_value(prob.map(), stage2_start.theta, prob.norm());
    gamma = select_gamma(cfg, res.stage1_g);
  }
  res.gamma = gamma;

  auto s2 = detail::mm_loop(prob, stage2_start, gamma, false, 2, cfg, tr);
  res.stage2_iterations = s2.iterations;
  res.rejected_increase = std::max(res.rejected_increase, s2.rejected_increase);
  res.theta = s2.state.theta;
  res.lambda = s2.state.lambda;
  res.mu = s2.state.mu;
  res.sigma_min = sigma_min(s2.state.z);
  res.g = g_value(prob.map(), res.theta, prob.norm());
  res.radius = radius_of(res.g, prob.norm());
  res.trace = std::move(trace);
  res.message = s2.message;
  if (s2.failed) {
    res.status = RunStatus::SolverFailure;
  } else if (!s2.converged) {
    res.status = RunStatus::MaxIter;
  } else {
    res.status = res.sigma_min <= cfg.eps ? RunStatus::ToleranceMet : RunStatus::Converged;
  }
  return res;
}

/// Independent check of a result.
struct Certificate {
  double sigma_min = 0.0;  // σ_2n of the recomputed pencil
  std::optional<double> m_ucon;
  std::optional<std::complex<double>> mode;
  std::optional<double> axis_distance;  // stability: min |Re λ| over Λ(A(θ*))
  VectorXcd eigenvalues;                // Λ(A(θ*))
};

inline Certificate verify_result(const RadiusProblem& prob, const RadiusResult& result) {
  Certificate c;
  const auto& pencil = prob.pencil();
  c.sigma_min = sigma_min(pencil.evaluate(result.theta, result.mu.value_or(0.0), result.lambda));
  const MatrixXd A = pencil.a().evaluate(result.theta);
  c.eigenvalues = eigenvalues(A);
  if (prob.kind() == PencilKind::Stability) {
    double d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < c.eigenvalues.size(); ++i) d = std::min(d, std::abs(c.eigenvalues[i].real()));
    c.axis_distance = d;
  } else {
    const auto m = m_ucon_detail(A, pencil.b()->evaluate(result.theta));
    c.m_ucon = m.value;
    c.mode = m.eigenvalue;
  }
  return c;
}

}  // namespace sradius
