#pragma once

// Multi-start protocol: independent seeded trials on a worker pool, each
// certified afterwards, assembled into a report ordered by trial index.

#include "sradius/io/report.hpp"
#include "sradius/radius.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sradius {

struct ExperimentOptions {
  int trials = 100;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  std::optional<bool> keep_trace;  // default: on for ≤ 10 trials
  std::string name;
};

inline io::TrialRecord run_trial(const RadiusProblem& prob, SolverConfig cfg, int index, std::uint64_t master_seed) {
  io::TrialRecord rec;
  rec.index = index;
  rec.seed = trial_seed(master_seed, static_cast<std::uint64_t>(index));
  cfg.seed = rec.seed;
  RadiusResult res;
  try {
    res = run(prob, cfg);
  } catch (const NumericalError& e) {
    res.status = RunStatus::SolverFailure;
    res.message = e.what();
  }
  rec.status = res.status;
  rec.radius = res.radius;
  rec.g = res.g;
  rec.stage1_iterations = res.stage1_iterations;
  rec.stage2_iterations = res.stage2_iterations;
  rec.sigma_min = res.sigma_min;
  rec.stage1_sigma = res.stage1_sigma;
  rec.gamma = res.gamma;
  rec.rejected_increase = res.rejected_increase;
  rec.theta = res.theta;
  rec.lambda = res.lambda;
  rec.mu = res.mu;
  rec.trace = std::move(res.trace);
  if (res.theta.size() == prob.num_params()) {
    const Certificate c = verify_result(prob, res);
    rec.cert_sigma = c.sigma_min;
    rec.m_ucon = c.m_ucon;
    rec.axis_distance = c.axis_distance;
  }
  rec.certified = rec.status != RunStatus::SolverFailure && rec.theta.size() == prob.num_params() &&
                  rec.cert_sigma <= cfg.eps;
  return rec;
}

inline io::ExperimentReport run_experiment(const RadiusProblem& prob, SolverConfig cfg, const ExperimentOptions& opt) {
  cfg.validate();
  check_preconditions(prob);
  if (opt.trials < 1) throw std::invalid_argument("run_experiment: trials must be positive");
  cfg.keep_trace = opt.keep_trace.value_or(opt.trials <= 10);

  io::ExperimentReport rep;
  rep.name = opt.name;
  rep.kind = prob.kind();
  rep.norm = prob.norm();
  rep.master_seed = opt.master_seed;
  rep.eps = cfg.eps;
  rep.xi = cfg.xi;
  rep.max_iter = cfg.max_iter;
  rep.gamma_policy = cfg.gamma_policy;
  rep.gamma_cap = cfg.gamma_cap;
  rep.two_stage = cfg.two_stage;
  rep.records.resize(static_cast<std::size_t>(opt.trials));

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  threads = std::min(threads, opt.trials);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < opt.trials; i = next++) {
      try {
        rep.records[static_cast<std::size_t>(i)] = run_trial(prob, cfg, i, opt.master_seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  io::finalize(rep);
  return rep;
}

}  // namespace sradius
