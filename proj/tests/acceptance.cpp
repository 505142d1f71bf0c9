// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "sradius/sradius.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace sradius;
using benchmarks::DeltaShape;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Verdict& v, double seconds) {
  std::printf("criterion %d: %s  %s (%.1fs)\n  %s\n", id, v.pass ? "PASS" : "FAIL", title, seconds, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

template <class F>
void criterion(int id, const char* title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  report(id, title, v, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

MatrixXd random_matrix(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> d;
  MatrixXd M(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) M(i, j) = d(rng);
  return M;
}

io::ExperimentReport experiment(const RadiusProblem& prob, int trials, const std::string& name) {
  ExperimentOptions opt;
  opt.trials = trials;
  opt.master_seed = kSeed;
  opt.threads = 1;
  opt.keep_trace = true;
  opt.name = name;
  return run_experiment(prob, SolverConfig{}, opt);
}

// worst F increase within a stage, including steps the solver rejected
struct MonotoneAudit {
  int runs = 0;
  double worst = -std::numeric_limits<double>::infinity();

  void add(const std::vector<TracePoint>& trace, double rejected) {
    ++runs;
    worst = std::max(worst, rejected);
    for (std::size_t i = 1; i < trace.size(); ++i)
      if (trace[i].stage == trace[i - 1].stage) worst = std::max(worst, trace[i].f - trace[i - 1].f);
  }
};

MonotoneAudit monotone;

}  // namespace

int main() {
  std::printf("sradius acceptance, master seed %llu, solver tolerance %.1e\n",
              static_cast<unsigned long long>(kSeed), conic::SdpSettings::from_environment().tolerance);

  criterion(1, "channel benchmark radii, 100 trials per case", [] {
    struct Case {
      const char* name;
      DeltaShape shape;
      NormKind norm;
      double radius, success;
    };
    const Case cases[] = {{"I frobenius", DeltaShape::Full, NormKind::Frobenius, 0.5159, 0.85},
                          {"I spectral", DeltaShape::Full, NormKind::Spectral, 0.5132, 0.85},
                          {"II spectral", DeltaShape::Diagonal, NormKind::Spectral, 0.5284, 0.80},
                          {"II frobenius", DeltaShape::Diagonal, NormKind::Frobenius, 0.5653, 0.95}};
    Verdict v;
    for (const Case& c : cases) {
      const auto rep = experiment(benchmarks::channel_stability(c.shape, c.norm), 100, c.name);
      for (const auto& r : rep.records) monotone.add(r.trace, r.rejected_increase);
      const bool have = !rep.bins.empty();
      const double lo = have ? rep.bins.front().lo : NAN, hi = have ? rep.bins.front().hi : NAN;
      const bool ok = have && std::abs(lo - c.radius) <= 1e-3 && std::abs(hi - c.radius) <= 1e-3 &&
                      rep.success_rate >= c.success;
      v.pass = v.pass && ok;
      v.detail += fmt("%scase %s: best [%.6f, %.6f] target %.4f, success %.0f%% (need %.0f%%), uncertified %d",
                      v.detail.empty() ? "" : "\n  ", c.name, lo, hi, c.radius, 100 * rep.success_rate,
                      100 * c.success, rep.uncertified);
    }
    return v;
  });

  criterion(2, "sparse system controllability radius, 200 trials", [] {
    const RadiusProblem prob = benchmarks::sparse_problem(PencilKind::Controllability);
    const auto rep = experiment(prob, 200, "sparse-controllability");
    double worst_ucon = 0.0;
    for (const auto& r : rep.records) {
      monotone.add(r.trace, r.rejected_increase);
      worst_ucon = std::max(worst_ucon, r.m_ucon.value_or(std::numeric_limits<double>::infinity()));
    }
    Verdict v;
    if (rep.bins.empty()) return Verdict{false, "no certified trial"};
    const auto& first = rep.bins.front();
    const auto& last = rep.bins.back();
    v.pass = rep.bins.size() == 3 && first.lo <= 0.0051 && rep.most_frequent_bin() == &first &&
             std::abs(last.lo - 0.6412) <= 1e-3 && std::abs(last.hi - 0.6412) <= 1e-3 && worst_ucon < 1e-6;
    for (const auto& b : rep.bins)
      v.detail += fmt("[%.7f, %.7f] %d (%.1f%%); ", b.lo, b.hi, b.frequency, 100 * b.share);
    v.detail += fmt("\n  clusters %zu, uncertified %d, max m_ucon %.3e", rep.bins.size(), rep.uncertified, worst_ucon);
    return v;
  });

  criterion(3, "sparse system stabilizability radius reaches 0.004", [] {
    const RadiusProblem prob = benchmarks::sparse_problem(PencilKind::Stabilizability);
    int hits = 0, trials = 100;
    double best = std::numeric_limits<double>::infinity(), best_re = NAN, best_sigma = NAN;
    for (int t = 0; t < trials; ++t) {
      SolverConfig cfg;
      cfg.seed = trial_seed(kSeed, static_cast<std::uint64_t>(t));
      cfg.keep_trace = true;
      const RadiusResult res = run(prob, cfg);
      monotone.add(res.trace, res.rejected_increase);
      if (res.status == RunStatus::SolverFailure) continue;
      const Certificate c = verify_result(prob, res);
      if (!c.m_ucon || !c.mode) continue;
      if (res.radius <= 0.004 && c.mode->real() >= -1e-6 && *c.m_ucon <= 1e-6) {
        ++hits;
        if (res.radius < best) {
          best = res.radius;
          best_re = c.mode->real();
          best_sigma = *c.m_ucon;
        }
      }
    }
    return Verdict{hits > 0, fmt("%d of %d trials qualify; smallest r %.7f with Re z %.3e, sigma_n %.3e", hits, trials,
                                 best, best_re, best_sigma)};
  });

  criterion(4, "realification preserves singular values, 100 complex matrices", [] {
    std::mt19937_64 rng(kSeed + 4);
    double worst_min = 0.0, worst_spec = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Index r = 2 + t % 5, c = 2 + (t / 5) % 5;
      const MatrixXd X = random_matrix(rng, r, c), Y = random_matrix(rng, r, c);
      Eigen::MatrixXcd C(r, c);
      C.real() = X;
      C.imag() = Y;
      const VectorXd sc = Eigen::JacobiSVD<Eigen::MatrixXcd>(C).singularValues();
      const VectorXd sw = Eigen::JacobiSVD<MatrixXd>(realify(X, Y)).singularValues();
      worst_min = std::max(worst_min, std::abs(sc.minCoeff() - sw.minCoeff()));
      for (Index i = 0; i < sc.size(); ++i)
        worst_spec = std::max({worst_spec, std::abs(sw[2 * i] - sc[i]), std::abs(sw[2 * i + 1] - sc[i])});
    }
    return Verdict{worst_min <= 1e-10 && worst_spec <= 1e-9,
                   fmt("max sigma_min gap %.3e (need 1e-10), max doubled-spectrum gap %.3e (need 1e-9)", worst_min,
                       worst_spec)};
  });

  criterion(5, "F non-increasing within each stage on every run of criteria 1-3", [] {
    return Verdict{monotone.runs > 0 && monotone.worst <= 1e-7,
                   fmt("%d runs, largest within-stage increase %.3e including rejected steps (slack 1e-7)",
                       monotone.runs, monotone.worst)};
  });

  criterion(6, "uncapped gamma keeps sigma_2n within eps", [] {
    struct Named {
      const char* name;
      RadiusProblem prob;
    };
    const Named problems[] = {
        {"I frobenius", benchmarks::channel_stability(DeltaShape::Full, NormKind::Frobenius)},
        {"I spectral", benchmarks::channel_stability(DeltaShape::Full, NormKind::Spectral)},
        {"II spectral", benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Spectral)},
        {"II frobenius", benchmarks::channel_stability(DeltaShape::Diagonal, NormKind::Frobenius)},
        {"sparse controllability", benchmarks::sparse_problem(PencilKind::Controllability)}};
    int qualifying = 0, within = 0, skipped = 0, solver_failures = 0;
    double worst = 0.0;
    for (const auto& p : problems)
      for (int t = 0; t < 5; ++t) {
        SolverConfig cfg;
        cfg.gamma_policy = GammaPolicy::Uncapped;
        cfg.seed = trial_seed(kSeed + 6, static_cast<std::uint64_t>(t));
        const RadiusResult res = run(p.prob, cfg);
        if (res.gamma <= 0.0 || res.stage1_sigma > 1e-9) {  // gamma stays 0 when stage 1 fails
          ++skipped;
          continue;
        }
        ++qualifying;
        if (res.status == RunStatus::SolverFailure) ++solver_failures;
        worst = std::max(worst, res.sigma_min);
        if (res.sigma_min <= cfg.eps) ++within;
      }
    return Verdict{qualifying > 0 && within == qualifying,
                   fmt("%d of %d qualifying runs end with sigma_2n <= 1e-4 (worst %.3e); %d runs skipped "
                       "(stage-1 sigma > 1e-9); %d solver failures",
                       within, qualifying, worst, skipped, solver_failures)};
  });

  criterion(7, "nuclear-norm epigraph matches SVD, 50 pinned matrices", [] {
    std::mt19937_64 rng(kSeed + 7);
    double worst = 0.0;
    int bad_status = 0;
    for (int t = 0; t < 50; ++t) {
      const Index r = 2 + t % 4, c = r + t % 3;
      const MatrixXd Z = random_matrix(rng, r, c);
      conic::ConicProgram prog;
      const conic::MatrixVar z = prog.add_matrix_variable(r, c, "Z");
      for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) prog.add_equality(conic::LinExpr(z(i, j)), Z(i, j));
      prog.minimize(conic::LinExpr(conic::encode_nuclear_epigraph(prog, z)));
      const conic::ConicSolution sol = conic::solve(prog);
      if (sol.status != conic::SolveStatus::Optimal) ++bad_status;
      const double ref = Eigen::JacobiSVD<MatrixXd>(Z).singularValues().sum();
      worst = std::max(worst, std::abs(sol.objective - ref) / ref);
    }
    return Verdict{worst <= 1e-6 && bad_status == 0,
                   fmt("max relative error %.3e (need 1e-6), non-optimal solves %d", worst, bad_status)};
  });

  criterion(8, "subset-sum reduction equivalence, 50 random instances", [] {
    std::mt19937_64 rng(kSeed + 8);
    std::uniform_int_distribution<long long> entry(-10, 10);
    std::uniform_int_distribution<int> size(1, 10);
    int counterexamples = 0, failed = 0, feasible = 0, checked = 0;
    for (int t = 0; t < 50; ++t) {
      SubsetSumInstance inst;
      const int p = size(rng);
      for (int i = 0; i < p; ++i) inst.s.push_back(entry(rng));
      const EquivalenceReport rep = reduction_equivalence_check(inst, 100, static_cast<std::uint64_t>(t));
      counterexamples += static_cast<int>(rep.counterexamples.size());
      if (!rep.passed) ++failed;
      if (rep.subset_sum_feasible) ++feasible;
      checked += rep.binary_checked;
    }
    return Verdict{counterexamples == 0 && failed == 0,
                   fmt("%d binary vectors checked, %d feasible instances, %d counterexamples, %d failed checks",
                       checked, feasible, counterexamples, failed)};
  });

  criterion(9, "grid oracle crossings sit on the box boundary", [] {
    const AffineFamily fam = benchmarks::channel_family(DeltaShape::Diagonal);
    const StructureMap map = benchmarks::channel_map(DeltaShape::Diagonal);
    const Index res = 101;
    const double h = 0.5284, cell = 2 * h / static_cast<double>(res - 1);
    const GridOracleResult outer = rssr_grid_oracle(fam, map, NormKind::Spectral, {{-h, h}, {-h, h}}, res);
    int interior = 0;
    for (auto i : outer.crossings)
      if (outer.points[i].theta.cwiseAbs().maxCoeff() < h - cell - 1e-12) ++interior;
    const GridOracleResult inner = rssr_grid_oracle(fam, map, NormKind::Spectral, {{-0.5, 0.5}, {-0.5, 0.5}}, res);
    return Verdict{outer.found && interior == 0 && !inner.found,
                   fmt("box 0.5284: %zu crossings, %d deeper than one cell (%.4f); box 0.50: %zu crossings",
                       outer.crossings.size(), interior, cell, inner.crossings.size())};
  });

  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
