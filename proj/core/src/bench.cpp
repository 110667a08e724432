#include "geoprec/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "geoprec/errors.hpp"
#include "geoprec/io.hpp"
#include "geoprec/optimizer.hpp"
#include "geoprec/rng.hpp"

namespace geoprec {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GEOPREC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchResult bench_matrix(const std::string& id, const ComplexMatrix& a, const BenchConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  BenchResult r;
  r.id = id;
  r.n = a.rows();
  OptimizerConfig opt;
  opt.target_eps = config.target_eps;
  opt.max_iters = config.max_iters;
  opt.mode = OptimizerMode::kGeneral;

  opt.scheme = GroupScheme::diagonal(Side::kLeftRight, a.rows(), a.cols());
  const OptimizationReport diag = minimize_condition(a, opt);
  opt.scheme = GroupScheme::block(Side::kLeftRight, a.rows(), a.cols(), config.block_size);
  const OptimizationReport block = minimize_condition(a, opt);

  r.kF_before = diag.initial_kF;
  r.kappa_before = diag.initial_kappa;
  r.kF_diag = diag.final_kF;
  r.kappa_diag = diag.final_kappa;
  r.kF_block = block.final_kF;
  r.kappa_block = block.final_kappa;
  r.iters_diag = diag.iterations.back().iter;
  r.iters_block = block.iterations.back().iter;
  r.certified_diag = diag.termination == Termination::kCertified;
  r.certified_block = block.termination == Termination::kCertified;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

// Runs job(i) for i in [0, count) on a bounded worker pool; the first
// exception (by index) is rethrown after all workers join.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job job) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<BenchResult> run_gaussian_suite(const BenchConfig& config) {
  if (config.samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be positive");
  if (config.block_size < 1 || config.n < 2 * config.block_size)
    throw Error(ErrorCode::kInvalidArgument, "n must be at least twice the block size");
  std::vector<BenchResult> results(static_cast<std::size_t>(config.samples));
  parallel_for(results.size(), resolve_threads(config.threads), [&](std::size_t s) {
    Rng rng(config.seed, s);
    const ComplexMatrix a = ComplexMatrix::from_real(rng.gaussian(config.n, config.n));
    results[s] = bench_matrix("gaussian-" + std::to_string(s), a, config);
  });
  return results;
}

std::vector<BenchResult> run_directory_suite(const std::filesystem::path& dir, const BenchConfig& config) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mtx") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::optional<BenchResult>> slots(files.size());
  parallel_for(files.size(), resolve_threads(config.threads), [&](std::size_t i) {
    const ComplexMatrix a = read_matrix(files[i]);
    if (a.rows() != a.cols()) return;
    slots[i] = bench_matrix(files[i].stem().string(), a, config);
  });
  std::vector<BenchResult> results;
  for (auto& s : slots)
    if (s) results.push_back(std::move(*s));
  return results;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "sample lengths differ");
  if (x.size() < 3) throw Error(ErrorCode::kInsufficientData, "correlation needs at least 3 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kInsufficientData, "constant sample");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_kF_kappa(const std::vector<BenchResult>& results) {
  if (results.size() < 3) throw Error(ErrorCode::kInsufficientData, "correlation needs at least 3 results");
  std::vector<double> kf;
  std::vector<double> kappa;
  for (const auto& r : results) {
    kf.push_back(std::log(r.kF_improvement_diag()));
    kappa.push_back(std::log(r.kappa_improvement_diag()));
    kf.push_back(std::log(r.kF_improvement_block()));
    kappa.push_back(std::log(r.kappa_improvement_block()));
  }
  return pearson(kf, kappa);
}

void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& results) {
  out << "id,n,kF_before,kF_diag,kF_block,kappa_before,kappa_diag,kappa_block,iters_diag,iters_block,"
         "certified_diag,certified_block\n";
  for (const auto& r : results)
    out << r.id << "," << r.n << "," << format_number(r.kF_before) << "," << format_number(r.kF_diag) << ","
        << format_number(r.kF_block) << "," << format_number(r.kappa_before) << ","
        << format_number(r.kappa_diag) << "," << format_number(r.kappa_block) << "," << r.iters_diag << ","
        << r.iters_block << "," << r.certified_diag << "," << r.certified_block << "\n";
}

}  // namespace geoprec
