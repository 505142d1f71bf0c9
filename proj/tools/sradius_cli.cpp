// sradius: structured controllability / stabilizability / stability radii.
//
//   sradius solve PROBLEM [--trials N --seed S --eps E --xi X --gamma-cap C
//                          --gamma-policy capped|uncapped --max-iter K
//                          --single-stage [--gamma G] --threads T
//                          --keep-trace|--no-trace --out REPORT]
//   sradius oracle PROBLEM --box LO,HI [--box LO,HI ...] --resolution R --out PREFIX
//   sradius reduce --subset-sum=A1,A2,... --out PROBLEM
//   sradius trace REPORT [--trial I] --out CSV
//   sradius example NAME --out PROBLEM

#include "sradius/sradius.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sradius;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

struct SolveArgs {
  std::string problem, out, name;
  std::optional<int> trials, max_iter, threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps, xi, gamma_cap, gamma;
  std::string gamma_policy;
  bool single_stage = false, keep_trace = false, no_trace = false;
};

int cmd_solve(const SolveArgs& a) {
  const io::ProblemFile file = io::read_problem_file(a.problem);
  const RadiusProblem prob = file.to_problem();
  SolverConfig cfg;
  file.config.apply(cfg);
  if (a.eps) cfg.eps = *a.eps;
  if (a.xi) cfg.xi = *a.xi;
  if (a.gamma_cap) cfg.gamma_cap = *a.gamma_cap;
  if (a.max_iter) cfg.max_iter = *a.max_iter;
  if (a.gamma) cfg.gamma_fixed = *a.gamma;
  if (a.single_stage) cfg.two_stage = false;
  if (a.gamma_policy == "uncapped") cfg.gamma_policy = GammaPolicy::Uncapped;
  else if (a.gamma_policy == "capped") cfg.gamma_policy = GammaPolicy::Capped;

  ExperimentOptions opt;
  opt.trials = a.trials.value_or(file.config.trials.value_or(100));
  opt.master_seed = a.seed.value_or(file.config.seed.value_or(0));
  opt.threads = a.threads.value_or(0);
  if (a.keep_trace) opt.keep_trace = true;
  if (a.no_trace) opt.keep_trace = false;
  opt.name = a.name.empty() ? std::filesystem::path(a.problem).stem().string() : a.name;

  const io::ExperimentReport rep = run_experiment(prob, cfg, opt);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    io::write_report(out, rep);
  }
  io::write_summary(std::cout, rep);
  if (rep.failures > 0) {
    std::cerr << "sradius: " << rep.failures << " trial(s) ended in solver failure\n";
    return 2;
  }
  return 0;
}

struct OracleArgs {
  std::string problem, out;
  std::vector<std::string> box;
  int resolution = 101;
};

int cmd_oracle(const OracleArgs& a) {
  const io::ProblemFile file = io::read_problem_file(a.problem);
  if (file.kind != PencilKind::Stability) throw std::invalid_argument("oracle: only stability problems are supported");
  if (file.p > 3) throw std::invalid_argument("oracle: p = " + std::to_string(file.p) + " exceeds 3 (grid cost is resolution^p)");
  std::vector<std::pair<double, double>> box;
  for (const auto& b : a.box) {
    const auto parts = split(b, ',');
    if (parts.size() != 2) throw std::invalid_argument("oracle: --box expects LO,HI, got '" + b + "'");
    box.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
  }
  if (box.size() == 1) box.assign(static_cast<std::size_t>(file.p), box.front());
  const AffineFamily fam(file.a0, file.a);
  const auto res = rssr_grid_oracle(fam, file.structure(), file.norm, box, a.resolution);
  {
    auto env = open_out(a.out + "_envelope.csv");
    write_envelope_csv(env, res, file.norm);
    auto cloud = open_out(a.out + "_cloud.csv");
    write_eigen_cloud_csv(cloud, res);
  }
  std::cout << "grid points " << res.points.size() << ", axis_tol " << res.axis_tol << '\n';
  if (!res.found) {
    std::cout << res.message << '\n';
    return 0;
  }
  const auto& best = res.points[res.argmin];
  std::cout << "crossings " << res.crossings.size() << ", oracle radius " << res.radius << " at theta = ("
            << best.theta.transpose() << ")\n";
  return 0;
}

int cmd_reduce(const std::string& list, const std::string& out) {
  SubsetSumInstance inst;
  for (const auto& s : split(list, ',')) inst.s.push_back(std::stoll(s));
  if (inst.s.empty()) throw std::invalid_argument("reduce: empty subset-sum list");
  const RscrReduction red = build_rscr_reduction(inst);
  const Index p = static_cast<Index>(inst.s.size());
  const RadiusProblem prob(StructuredPencil(PencilKind::Controllability, red.a, red.b), StructureMap::vector(p),
                           NormKind::Frobenius);
  io::write_problem_file(out, io::ProblemFile::from_problem(prob));
  std::cout << "wrote " << out << " (n = " << 2 * p + 2 << ", m = " << p + 1 << ", p = " << p << ")\n";
  if (p > 12) {
    std::cerr << "sradius: warning: p = " << p << " exceeds 12, instance written without certificate\n";
    return 0;
  }
  const auto rep = reduction_equivalence_check(inst);
  std::cout << "subset sum to -1: " << (rep.subset_sum_feasible ? "feasible" : "infeasible");
  if (rep.subset_sum_feasible) {
    std::cout << " via {";
    for (std::size_t i = 0; i < rep.witness.size(); ++i)
      std::cout << (i ? ", " : "") << inst.s[static_cast<std::size_t>(rep.witness[i])];
    std::cout << "}";
  }
  std::cout << "\nbinary parameter vectors checked " << rep.binary_checked << ", uncontrollable "
            << rep.binary_uncontrollable << '\n';
  if (rep.random_samples > 0)
    std::cout << "random real samples " << rep.random_samples << ", rank deficient " << rep.random_rank_deficient
              << ", min row-scaled sigma " << rep.random_min_sigma << '\n';
  std::cout << "certificate " << (rep.passed ? "pass" : "FAIL: " + rep.message) << '\n';
  return rep.passed ? 0 : 3;
}

int cmd_trace(const std::string& report, std::optional<int> trial, const std::string& out) {
  const io::ExperimentReport rep = io::read_report_file(report);
  auto os = open_out(out);
  bool header = true;
  int written = 0;
  for (const auto& r : rep.records) {
    if (trial && r.index != *trial) continue;
    if (r.trace.empty()) continue;
    std::ostringstream buf;
    io::write_trace_csv(buf, r);
    std::string text = buf.str();
    if (!header) text = text.substr(text.find('\n') + 1);
    os << text;
    header = false;
    ++written;
  }
  if (written == 0)
    throw std::runtime_error(trial ? "trial " + std::to_string(*trial) + " has no trace in " + report
                                   : "report " + report + " carries no traces (rerun solve with --keep-trace)");
  return 0;
}

int cmd_example(const std::string& name, const std::string& norm_name, const std::string& out) {
  const NormKind norm = norm_name == "spectral" ? NormKind::Spectral : NormKind::Frobenius;
  std::optional<RadiusProblem> prob;
  if (name == "channel-full") prob = benchmarks::channel_stability(benchmarks::DeltaShape::Full, norm);
  else if (name == "channel-diagonal") prob = benchmarks::channel_stability(benchmarks::DeltaShape::Diagonal, norm);
  else if (name == "sparse-controllability") prob = benchmarks::sparse_problem(PencilKind::Controllability);
  else if (name == "sparse-stabilizability") prob = benchmarks::sparse_problem(PencilKind::Stabilizability);
  else
    throw std::invalid_argument("unknown example '" + name +
                                "' (channel-full, channel-diagonal, sparse-controllability, sparse-stabilizability)");
  io::write_problem_file(out, io::ProblemFile::from_problem(*prob));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured controllability, stabilizability and stability radii"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Multi-start radius computation");
  solve->add_option("problem", sa.problem, "Problem file")->required()->check(CLI::ExistingFile);
  solve->add_option("--trials", sa.trials, "Number of trials (default 100)");
  solve->add_option("--seed", sa.seed, "Master seed");
  solve->add_option("--eps", sa.eps, "Tolerance on sigma_2n(Z*)");
  solve->add_option("--xi", sa.xi, "Convergence threshold on |dF|");
  solve->add_option("--gamma-cap", sa.gamma_cap, "Cap in gamma = min(cap, g/eps)");
  solve->add_option("--gamma-policy", sa.gamma_policy, "capped or uncapped")
      ->check(CLI::IsMember({"capped", "uncapped"}));
  solve->add_option("--gamma", sa.gamma, "Fixed gamma for --single-stage");
  solve->add_option("--max-iter", sa.max_iter, "Iteration limit per stage");
  solve->add_flag("--single-stage", sa.single_stage, "Skip the feasibility stage");
  solve->add_option("--threads", sa.threads, "Worker threads (default: hardware concurrency)");
  auto* kt = solve->add_flag("--keep-trace", sa.keep_trace, "Store convergence traces");
  solve->add_flag("--no-trace", sa.no_trace, "Drop convergence traces")->excludes(kt);
  solve->add_option("--out", sa.out, "Report file");
  solve->add_option("--name", sa.name, "Name recorded in the report");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Grid scan of the spectral abscissa (stability problems, p <= 3)");
  oracle->add_option("problem", oa.problem, "Problem file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--box", oa.box, "LO,HI per parameter (one value applies to all)")->required();
  oracle->add_option("--resolution", oa.resolution, "Grid points per axis")->check(CLI::Range(2, 100000));
  oracle->add_option("--out", oa.out, "Output prefix for _envelope.csv and _cloud.csv")->required();

  std::string subset, reduce_out;
  auto* reduce = app.add_subcommand("reduce", "Subset-sum reduction instance with certificate");
  reduce->add_option("--subset-sum", subset, "Comma-separated integers")->required();
  reduce->add_option("--out", reduce_out, "Problem file to write")->required();

  std::string report, trace_out;
  std::optional<int> trial;
  auto* trace = app.add_subcommand("trace", "Convergence CSV from a report");
  trace->add_option("report", report, "Report file from solve")->required()->check(CLI::ExistingFile);
  trace->add_option("--trial", trial, "Only this trial index");
  trace->add_option("--out", trace_out, "CSV file")->required();

  std::string example, example_norm = "frobenius", example_out;
  auto* ex = app.add_subcommand("example", "Write a built-in benchmark problem");
  ex->add_option("name", example, "channel-full, channel-diagonal, sparse-controllability, sparse-stabilizability")
      ->required();
  ex->add_option("--norm", example_norm, "frobenius or spectral")->check(CLI::IsMember({"frobenius", "spectral"}));
  ex->add_option("--out", example_out, "Problem file to write")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(sa);
    if (*oracle) return cmd_oracle(oa);
    if (*reduce) return cmd_reduce(subset, reduce_out);
    if (*trace) return cmd_trace(report, trial, trace_out);
    if (*ex) return cmd_example(example, example_norm, example_out);
  } catch (const io::ParseError& e) {
    std::cerr << "sradius: parse error: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    std::cerr << "sradius: precondition: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sradius: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
