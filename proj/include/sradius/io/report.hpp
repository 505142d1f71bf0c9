#pragma once

// Multi-start experiment report: one record per trial, radius bins for the
// success-rate table, optional convergence traces, and a line-oriented text
// serialization of all of it.

#include "sradius/io/problem_file.hpp"
#include "sradius/radius.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sradius::io {

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Converged;
  bool certified = false;  // no solver failure and σ_2n(Z*) ≤ ε
  double radius = 0.0;
  double g = 0.0;
  int stage1_iterations = 0;
  int stage2_iterations = 0;
  double sigma_min = 0.0;
  double stage1_sigma = 0.0;
  double gamma = 0.0;
  double cert_sigma = 0.0;
  double rejected_increase = 0.0;
  std::optional<double> m_ucon;
  std::optional<double> axis_distance;
  VectorXd theta;
  double lambda = 0.0;
  std::optional<double> mu;
  std::vector<TracePoint> trace;

  int total_iterations() const { return stage1_iterations + stage2_iterations; }
};

struct RadiusBin {
  double lo = 0.0, hi = 0.0;
  int frequency = 0;
  double share = 0.0;  // frequency / trials
  double avg_iterations = 0.0;
};

struct ExperimentReport {
  std::string name;
  PencilKind kind = PencilKind::Stability;
  NormKind norm = NormKind::Frobenius;
  int trials = 0;
  std::uint64_t master_seed = 0;
  double eps = 0.0, xi = 0.0, gamma_cap = 0.0;
  int max_iter = 0;
  GammaPolicy gamma_policy = GammaPolicy::Capped;
  bool two_stage = true;
  std::vector<TrialRecord> records;  // sorted by index
  std::vector<RadiusBin> bins;        // ascending radius
  int uncertified = 0;
  int failures = 0;
  double success_rate = 0.0;  // share of the smallest-radius bin

  const RadiusBin* best_bin() const { return bins.empty() ? nullptr : &bins.front(); }
  const RadiusBin* most_frequent_bin() const {
    const RadiusBin* b = nullptr;
    for (const auto& x : bins)
      if (!b || x.frequency > b->frequency) b = &x;
    return b;
  }
};

/// Single-linkage clustering of certified radii: sorted radii start a new bin
/// whenever the gap to the previous one exceeds `width`.
inline std::vector<RadiusBin> bin_radii(const std::vector<TrialRecord>& records, int trials, double width = 1e-3) {
  std::vector<const TrialRecord*> ok;
  for (const auto& r : records)
    if (r.certified) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](auto* a, auto* b) { return a->radius < b->radius || (a->radius == b->radius && a->index < b->index); });
  std::vector<RadiusBin> bins;
  double iter_sum = 0.0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (i == 0 || ok[i]->radius - ok[i - 1]->radius > width) {
      if (!bins.empty()) bins.back().avg_iterations = iter_sum / bins.back().frequency;
      bins.push_back({ok[i]->radius, ok[i]->radius, 0, 0.0, 0.0});
      iter_sum = 0.0;
    }
    auto& b = bins.back();
    b.hi = ok[i]->radius;
    ++b.frequency;
    iter_sum += ok[i]->total_iterations();
  }
  if (!bins.empty()) bins.back().avg_iterations = iter_sum / bins.back().frequency;
  for (auto& b : bins) b.share = trials > 0 ? static_cast<double>(b.frequency) / trials : 0.0;
  return bins;
}

inline void finalize(ExperimentReport& rep) {
  std::sort(rep.records.begin(), rep.records.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  rep.trials = static_cast<int>(rep.records.size());
  rep.bins = bin_radii(rep.records, rep.trials);
  rep.uncertified = 0;
  rep.failures = 0;
  for (const auto& r : rep.records) {
    if (!r.certified) ++rep.uncertified;
    if (r.status == RunStatus::SolverFailure) ++rep.failures;
  }
  rep.success_rate = rep.bins.empty() ? 0.0 : rep.bins.front().share;
}

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::optional<RunStatus> parse_status(const std::string& s) {
  for (RunStatus st : {RunStatus::ToleranceMet, RunStatus::Converged, RunStatus::MaxIter, RunStatus::SolverFailure})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

}  // namespace detail

inline void write_report(std::ostream& os, const ExperimentReport& rep) {
  using detail::num;
  os << "sradius-report 1\n";
  os << "name " << (rep.name.empty() ? "-" : rep.name) << '\n';
  os << "kind " << to_string(rep.kind) << '\n';
  os << "norm " << to_string(rep.norm) << '\n';
  os << "trials " << rep.trials << '\n';
  os << "seed " << rep.master_seed << '\n';
  os << "config eps=" << num(rep.eps) << " xi=" << num(rep.xi) << " max_iter=" << rep.max_iter
     << " gamma_policy=" << (rep.gamma_policy == GammaPolicy::Capped ? "capped" : "uncapped")
     << " gamma_cap=" << num(rep.gamma_cap) << " two_stage=" << (rep.two_stage ? 1 : 0) << '\n';
  for (const auto& r : rep.records) {
    os << "trial index=" << r.index << " seed=" << r.seed << " status=" << to_string(r.status)
       << " certified=" << (r.certified ? 1 : 0) << " radius=" << num(r.radius) << " g=" << num(r.g)
       << " it1=" << r.stage1_iterations << " it2=" << r.stage2_iterations << " sigma=" << num(r.sigma_min)
       << " sigma1=" << num(r.stage1_sigma) << " gamma=" << num(r.gamma) << " cert_sigma=" << num(r.cert_sigma);
    if (r.rejected_increase > 0.0) os << " rejected=" << num(r.rejected_increase);
    if (r.m_ucon) os << " m_ucon=" << num(*r.m_ucon);
    if (r.axis_distance) os << " axis=" << num(*r.axis_distance);
    os << " lambda=" << num(r.lambda);
    if (r.mu) os << " mu=" << num(*r.mu);
    os << " theta=";
    for (Index i = 0; i < r.theta.size(); ++i) os << (i ? "," : "") << num(r.theta[i]);
    os << '\n';
  }
  for (const auto& r : rep.records)
    for (const auto& t : r.trace)
      os << "trace " << r.index << ' ' << t.stage << ' ' << t.k << ' ' << num(t.f) << ' ' << num(t.sigma_min) << '\n';
  for (const auto& b : rep.bins)
    os << "bin lo=" << num(b.lo) << " hi=" << num(b.hi) << " freq=" << b.frequency << " share=" << num(b.share)
       << " avg_iter=" << num(b.avg_iterations) << '\n';
  os << "uncertified " << rep.uncertified << '\n';
  os << "failures " << rep.failures << '\n';
  os << "success_rate " << num(rep.success_rate) << '\n';
  os << "end\n";
}

/// Reads a report written by write_report; bins and aggregates are recomputed.
inline ExperimentReport parse_report(std::istream& is) {
  ExperimentReport rep;
  std::string line;
  int ln = 0;
  bool header = false, ended = false;
  std::map<int, std::size_t> by_index;
  auto fail = [&](const std::string& what) { throw ParseError(ln, 1, what); };
  auto kv = [&](std::istringstream& ss) {
    std::map<std::string, std::string> m;
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) fail("expected key=value, got '" + tok + "'");
      m[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return m;
  };
  auto need = [&](const std::map<std::string, std::string>& m, const std::string& k) -> const std::string& {
    auto it = m.find(k);
    if (it == m.end()) throw ParseError(ln, 1, "missing field '" + k + "'");
    return it->second;
  };
  auto to_d = [&](const std::string& s) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      fail("bad number '" + s + "'");
    }
    return 0.0;
  };
  auto to_i = [&](const std::string& s) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      fail("bad integer '" + s + "'");
    }
    return 0LL;
  };
  std::vector<TrialRecord> records;
  while (std::getline(is, line)) {
    ++ln;
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (!header) {
      std::string ver;
      ss >> ver;
      if (kw != "sradius-report" || ver != "1") fail("not a version-1 report file");
      header = true;
      continue;
    }
    if (kw == "name") {
      ss >> rep.name;
    } else if (kw == "kind") {
      std::string k;
      ss >> k;
      if (k == "controllability") rep.kind = PencilKind::Controllability;
      else if (k == "stabilizability") rep.kind = PencilKind::Stabilizability;
      else if (k == "stability") rep.kind = PencilKind::Stability;
      else fail("unknown kind '" + k + "'");
    } else if (kw == "norm") {
      std::string k;
      ss >> k;
      if (k == to_string(NormKind::Frobenius)) rep.norm = NormKind::Frobenius;
      else if (k == to_string(NormKind::Spectral)) rep.norm = NormKind::Spectral;
      else fail("unknown norm '" + k + "'");
    } else if (kw == "trials") {
      ss >> rep.trials;
    } else if (kw == "seed") {
      ss >> rep.master_seed;
    } else if (kw == "config") {
      const auto m = kv(ss);
      rep.eps = to_d(need(m, "eps"));
      rep.xi = to_d(need(m, "xi"));
      rep.max_iter = static_cast<int>(to_i(need(m, "max_iter")));
      rep.gamma_policy = need(m, "gamma_policy") == "capped" ? GammaPolicy::Capped : GammaPolicy::Uncapped;
      rep.gamma_cap = to_d(need(m, "gamma_cap"));
      rep.two_stage = need(m, "two_stage") == "1";
    } else if (kw == "trial") {
      const auto m = kv(ss);
      TrialRecord r;
      r.index = static_cast<int>(to_i(need(m, "index")));
      r.seed = std::stoull(need(m, "seed"));
      const auto st = detail::parse_status(need(m, "status"));
      if (!st) fail("unknown status");
      r.status = *st;
      r.certified = need(m, "certified") == "1";
      r.radius = to_d(need(m, "radius"));
      r.g = to_d(need(m, "g"));
      r.stage1_iterations = static_cast<int>(to_i(need(m, "it1")));
      r.stage2_iterations = static_cast<int>(to_i(need(m, "it2")));
      r.sigma_min = to_d(need(m, "sigma"));
      r.stage1_sigma = to_d(need(m, "sigma1"));
      r.gamma = to_d(need(m, "gamma"));
      r.cert_sigma = to_d(need(m, "cert_sigma"));
      if (m.count("rejected")) r.rejected_increase = to_d(m.at("rejected"));
      if (m.count("m_ucon")) r.m_ucon = to_d(m.at("m_ucon"));
      if (m.count("axis")) r.axis_distance = to_d(m.at("axis"));
      r.lambda = to_d(need(m, "lambda"));
      if (m.count("mu")) r.mu = to_d(m.at("mu"));
      std::vector<double> th;
      std::stringstream ts(need(m, "theta"));
      std::string item;
      while (std::getline(ts, item, ',')) th.push_back(to_d(item));
      r.theta = Eigen::Map<VectorXd>(th.data(), static_cast<Index>(th.size()));
      by_index[r.index] = records.size();
      records.push_back(std::move(r));
    } else if (kw == "trace") {
      long long idx;
      TracePoint t;
      std::string f, s;
      if (!(ss >> idx >> t.stage >> t.k >> f >> s)) fail("malformed trace line");
      t.f = to_d(f);
      t.sigma_min = to_d(s);
      auto it = by_index.find(static_cast<int>(idx));
      if (it == by_index.end()) fail("trace for unknown trial " + std::to_string(idx));
      records[it->second].trace.push_back(t);
    } else if (kw == "bin" || kw == "uncertified" || kw == "failures" || kw == "success_rate") {
      // derived; recomputed below
    } else if (kw == "end") {
      ended = true;
      break;
    } else {
      fail("unknown section '" + kw + "'");
    }
  }
  if (!header) throw ParseError(1, 1, "empty report file");
  if (!ended) fail("missing 'end'");
  rep.records = std::move(records);
  const int declared = rep.trials;
  finalize(rep);
  if (declared != rep.trials) fail("trial count mismatch");
  return rep;
}

inline ExperimentReport read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report file '" + path + "'");
  return parse_report(in);
}

/// Human-readable table.
inline void write_summary(std::ostream& os, const ExperimentReport& rep) {
  os << (rep.name.empty() ? std::string("problem") : rep.name) << ": " << to_string(rep.kind) << ", "
     << to_string(rep.norm) << "-norm, " << rep.trials << " trials, seed " << rep.master_seed << '\n';
  os << "  radius interval              frequency  rate     avg iterations\n";
  for (const auto& b : rep.bins) {
    char buf[160];
    if (b.hi - b.lo < 5e-5)
      std::snprintf(buf, sizeof(buf), "  %-28.4f %9d  %5.1f%%  %8.2f\n", b.lo, b.frequency, 100.0 * b.share,
                    b.avg_iterations);
    else
      std::snprintf(buf, sizeof(buf), "  [%.7f, %.7f]     %9d  %5.1f%%  %8.2f\n", b.lo, b.hi, b.frequency,
                    100.0 * b.share, b.avg_iterations);
    os << buf;
  }
  if (rep.uncertified) os << "  uncertified (sigma > eps or failure): " << rep.uncertified << '\n';
  char buf[80];
  std::snprintf(buf, sizeof(buf), "  success rate %.1f%%\n", 100.0 * rep.success_rate);
  os << buf;
}

/// k,stage,F,sigma_2n,stage_start per iteration of one trial.
inline void write_trace_csv(std::ostream& os, const TrialRecord& r) {
  if (r.trace.empty())
    throw std::runtime_error("trial " + std::to_string(r.index) + " has no trace (rerun with trace retention on)");
  os << "trial,stage,k,F,sigma_2n,stage_start\n";
  for (const auto& t : r.trace)
    os << r.index << ',' << t.stage << ',' << t.k << ',' << detail::num(t.f) << ',' << detail::num(t.sigma_min) << ','
       << (t.k == 0 ? 1 : 0) << '\n';
}

}  // namespace sradius::io
