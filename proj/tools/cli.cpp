#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "geoprec/baselines.hpp"
#include "geoprec/bench.hpp"
#include "geoprec/errors.hpp"
#include "geoprec/io.hpp"
#include "geoprec/optimizer.hpp"
#include "geoprec/polysys.hpp"
#include "geoprec/stochastic.hpp"

namespace geoprec::cli {

namespace {

// Raised for semantic usage problems found after parsing (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  return out;
}

void write_csv(const std::string& path, const OptimizationReport& report) {
  if (path.empty()) return;
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  write_report_csv(file, report);
}

void print_summary(std::ostream& out, const OptimizationReport& r) {
  out << "termination: " << to_string(r.termination) << "\n"
      << "iterations: " << r.iterations.back().iter << "\n"
      << "initial kF: " << format_number(r.initial_kF) << "\n"
      << "final kF: " << format_number(r.final_kF) << "\n"
      << "initial kappa: " << format_number(r.initial_kappa) << "\n"
      << "final kappa: " << format_number(r.final_kappa) << "\n"
      << "certificate: " << (r.certificate ? format_number(*r.certificate) : "none") << "\n";
}

GroupScheme make_scheme(const std::string& kind, Side side, Index m, Index n, Index block_size) {
  if (kind == "diag") return GroupScheme::diagonal(side, m, n);
  if (kind == "block") return GroupScheme::block(side, m, n, block_size);
  return GroupScheme::full(side, m, n);
}

struct PreconditionArgs {
  std::string input, scheme = "diag", side = "left", out, emit, probe_kind = "rademacher", mode = "auto";
  Index block_size = 5;
  double eps = 1e-3;
  int max_iters = 10000;
  bool stochastic = false;
  int probes = 100;
  double cg_tol = 1e-8;
  int lanczos_iters = 20;
  double grad_tol = 0.0;
  std::uint64_t seed = 0;
};

int run_precondition(const PreconditionArgs& a, std::ostream& out) {
  const ComplexMatrix matrix = read_matrix(a.input);
  OptimizerConfig config;
  config.scheme = make_scheme(a.scheme, a.side == "both" ? Side::kLeftRight : Side::kLeft, matrix.rows(),
                              matrix.cols(), a.block_size);
  config.target_eps = a.eps;
  config.max_iters = a.max_iters;
  config.seed = a.seed;
  if (a.grad_tol > 0.0) config.grad_tol_override = a.grad_tol;
  config.mode = a.mode == "general"           ? OptimizerMode::kGeneral
                : a.mode == "strongly-convex" ? OptimizerMode::kStronglyConvex
                                              : OptimizerMode::kAuto;

  OptimizationReport report;
  if (a.stochastic) {
    EstimatorConfig est;
    est.num_probes = a.probes;
    est.probe_kind = a.probe_kind == "gaussian" ? ProbeKind::kGaussian : ProbeKind::kRademacher;
    est.cg_tol = a.cg_tol;
    est.lanczos_iters = a.lanczos_iters;
    est.seed = a.seed;
    report = minimize_condition_stochastic(matrix, config, est);
  } else {
    report = minimize_condition(matrix, config);
  }
  print_summary(out, report);
  write_csv(a.out, report);
  if (!a.emit.empty()) {
    const auto paths = split_csv(a.emit);
    write_matrix(paths.at(0), report.final_element.x);
    if (paths.size() > 1) write_matrix(paths[1], report.final_element.y);
  }
  return kOk;
}

struct PolysysArgs {
  std::string input, action = "shuffle", scheme = "full", out;
  Index block_size = 2;
  double eps = 1e-2;
  int max_iters = 5000;
  double grad_tol = 0.0;
};

int run_polysys(const PolysysArgs& a, std::ostream& out) {
  const PolysysFile file = read_polysys(a.input);
  if (!file.point) throw Error(ErrorCode::kParseError, "polynomial system file has no point");
  const PolynomialSystem& f = file.system;
  OptimizerConfig config;
  config.target_eps = a.eps;
  config.max_iters = a.max_iters;
  if (a.grad_tol > 0.0) config.grad_tol_override = a.grad_tol;

  OptimizationReport report;
  if (a.action == "full") {
    config.scheme = make_scheme(a.scheme, Side::kLeftRight, f.size(), f.nvars(), a.block_size);
    report = precondition_full(f, *file.point, config).second;
  } else if (a.action == "sparse") {
    config.scheme = make_scheme(a.scheme, Side::kLeft, f.size(), f.size(), a.block_size);
    const SparsePreconditioner res = precondition_sparse(f, *file.point, config);
    report = res.report;
    out << "t:";
    for (Index k = 0; k < res.t.t.size(); ++k) out << " " << format_number(res.t.t(k));
    out << "\n";
  } else {
    config.scheme = make_scheme(a.scheme, Side::kLeft, f.size(), f.size(), a.block_size);
    report = precondition_shuffle(f, *file.point, config).second;
  }
  out << "initial mu_F: " << format_number(report.initial_kF) << "\n";
  print_summary(out, report);
  write_csv(a.out, report);
  return kOk;
}

int run_condition(const std::string& input, const std::string& kind, std::ostream& out) {
  const ComplexMatrix a = read_matrix(input);
  const double value = kind == "euclidean" ? condition_euclidean(a)
                       : kind == "skeel"   ? condition_skeel(a)
                                           : condition_frobenius(a);
  out << format_number(value) << "\n";
  return kOk;
}

int run_baseline(const std::string& input, const std::string& method, const std::string& out_path,
                 std::ostream& out) {
  const ComplexMatrix a = read_matrix(input);
  DenseMatrix b;
  if (method == "jacobi-left") {
    b = jacobi_precondition(a, JacobiMode::kLeft);
  } else if (method == "jacobi-sym") {
    b = jacobi_precondition(a, JacobiMode::kTwoSided);
  } else {
    const SinkhornResult s = sinkhorn_equilibrate(a, 10000, 1e-10);
    b = scale_diagonal(a, s.x, s.y);
    out << "sinkhorn iterations: " << s.iterations << (s.converged ? "" : " (not converged)") << "\n";
  }
  out << "kF before: " << format_number(condition_frobenius(a)) << "\n"
      << "kF after: " << format_number(condition_frobenius(b)) << "\n"
      << "kappa before: " << format_number(condition_euclidean(a)) << "\n"
      << "kappa after: " << format_number(condition_euclidean(b)) << "\n";
  if (!out_path.empty()) write_matrix(out_path, b);
  return kOk;
}

struct BenchArgs {
  std::string suite = "gaussian", dir, out;
  BenchConfig config;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<BenchResult> results;
  if (a.suite == "dir") {
    if (a.dir.empty()) throw UsageError("--dir is required for the dir suite");
    results = run_directory_suite(a.dir, a.config);
  } else {
    results = run_gaussian_suite(a.config);
  }
  double diag = 0.0, block = 0.0, seconds = 0.0;
  for (const auto& r : results) {
    diag += r.kF_improvement_diag();
    block += r.kF_improvement_block();
    seconds += r.seconds;
  }
  const double count = static_cast<double>(std::max<std::size_t>(1, results.size()));
  out << "instances: " << results.size() << "\n"
      << "mean kF improvement (diag): " << format_number(diag / count) << "\n"
      << "mean kF improvement (block): " << format_number(block / count) << "\n";
  if (results.size() >= 3) out << "pearson(kF, kappa): " << format_number(correlation_kF_kappa(results)) << "\n";
  // Timing stays out of the CSV so that reports are reproducible byte for byte.
  out << "optimizer seconds (sum over instances): " << format_number(seconds) << "\n";
  if (!a.out.empty()) {
    std::ofstream file(a.out);
    if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + a.out);
    write_bench_csv(file, results);
  }
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotConverged:
    case ErrorCode::kExpansionOverflow:
    case ErrorCode::kSingularBlock:
    case ErrorCode::kSingularProbeBlock:
      return kNumericalFailure;
    default:
      return kInputError;
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Condition-number preconditioning on block-diagonal groups", "geoprec"};
  app.require_subcommand(1);

  PreconditionArgs pre;
  auto* precondition = app.add_subcommand("precondition", "Minimize kF(X A Y^-1) over a preconditioner group");
  precondition->add_option("--input", pre.input, "Matrix Market file")->required()->check(CLI::ExistingFile);
  precondition->add_option("--scheme", pre.scheme)->check(CLI::IsMember({"diag", "block", "full"}));
  precondition->add_option("--block-size", pre.block_size)->check(CLI::PositiveNumber);
  precondition->add_option("--side", pre.side)->check(CLI::IsMember({"left", "both"}));
  precondition->add_option("--eps", pre.eps)->check(CLI::PositiveNumber);
  precondition->add_option("--max-iters", pre.max_iters)->check(CLI::NonNegativeNumber);
  precondition->add_option("--mode", pre.mode)->check(CLI::IsMember({"auto", "general", "strongly-convex"}));
  precondition->add_option("--grad-tol", pre.grad_tol)->check(CLI::PositiveNumber);
  precondition->add_flag("--stochastic", pre.stochastic);
  precondition->add_option("--probes", pre.probes)->check(CLI::PositiveNumber);
  precondition->add_option("--probe-kind", pre.probe_kind)->check(CLI::IsMember({"rademacher", "gaussian"}));
  precondition->add_option("--cg-tol", pre.cg_tol)->check(CLI::PositiveNumber);
  precondition->add_option("--lanczos-iters", pre.lanczos_iters)->check(CLI::PositiveNumber);
  precondition->add_option("--seed", pre.seed);
  precondition->add_option("--out", pre.out, "CSV trajectory report");
  precondition->add_option("--emit-preconditioner", pre.emit, "X.mtx[,Y.mtx]");

  PolysysArgs poly;
  auto* polysys = app.add_subcommand("polysys-precondition", "Precondition a polynomial system at a point");
  polysys->add_option("--input", poly.input, "JSON polynomial system")->required()->check(CLI::ExistingFile);
  polysys->add_option("--action", poly.action)->check(CLI::IsMember({"shuffle", "full", "sparse"}));
  polysys->add_option("--scheme", poly.scheme)->check(CLI::IsMember({"diag", "block", "full"}));
  polysys->add_option("--block-size", poly.block_size)->check(CLI::PositiveNumber);
  polysys->add_option("--eps", poly.eps)->check(CLI::PositiveNumber);
  polysys->add_option("--max-iters", poly.max_iters)->check(CLI::NonNegativeNumber);
  polysys->add_option("--grad-tol", poly.grad_tol)->check(CLI::PositiveNumber);
  polysys->add_option("--out", poly.out, "CSV trajectory report");

  std::string cond_input, cond_kind = "frobenius";
  auto* condition = app.add_subcommand("condition", "Print a condition number");
  condition->add_option("--input", cond_input)->required()->check(CLI::ExistingFile);
  condition->add_option("--kind", cond_kind)->check(CLI::IsMember({"frobenius", "euclidean", "skeel"}));

  std::string base_input, base_method = "jacobi-left", base_out;
  auto* baseline = app.add_subcommand("baseline", "Apply a classical diagonal preconditioner");
  baseline->add_option("--input", base_input)->required()->check(CLI::ExistingFile);
  baseline->add_option("--method", base_method)->check(CLI::IsMember({"jacobi-left", "jacobi-sym", "sinkhorn"}));
  baseline->add_option("--out", base_out, "Matrix Market file for the scaled matrix");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Diagonal vs block-diagonal improvement experiment");
  bench_cmd->add_option("--suite", bench.suite)->check(CLI::IsMember({"gaussian", "dir"}));
  bench_cmd->add_option("--dir", bench.dir)->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--n", bench.config.n)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--samples", bench.config.samples)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.config.seed);
  bench_cmd->add_option("--block-size", bench.config.block_size)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--eps", bench.config.target_eps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--max-iters", bench.config.max_iters)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench.config.threads)->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--out", bench.out, "CSV results");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*precondition) return run_precondition(pre, out);
    if (*polysys) return run_polysys(poly, out);
    if (*condition) return run_condition(cond_input, cond_kind, out);
    if (*baseline) return run_baseline(base_input, base_method, base_out, out);
    if (*bench_cmd) return run_bench(bench, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kUsage;
}

}  // namespace geoprec::cli
