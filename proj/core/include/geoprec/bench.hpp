#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoprec/matrix.hpp"

namespace geoprec {

struct BenchConfig {
  Index n = 50;
  int samples = 30;
  Index block_size = 5;
  std::uint64_t seed = 42;
  double target_eps = 1e-2;
  int max_iters = 5000;
  // 0 means GEOPREC_THREADS, else hardware concurrency.
  int threads = 0;
};

struct BenchResult {
  std::string id;
  Index n = 0;
  double kF_before = 0.0;
  double kF_diag = 0.0;
  double kF_block = 0.0;
  double kappa_before = 0.0;
  double kappa_diag = 0.0;
  double kappa_block = 0.0;
  int iters_diag = 0;
  int iters_block = 0;
  bool certified_diag = false;
  bool certified_block = false;
  double seconds = 0.0;

  double kF_improvement_diag() const { return kF_before / kF_diag; }
  double kF_improvement_block() const { return kF_before / kF_block; }
  double kappa_improvement_diag() const { return kappa_before / kappa_diag; }
  double kappa_improvement_block() const { return kappa_before / kappa_block; }
};

/// Diagonal and block-diagonal left_right preconditioning of one matrix.
BenchResult bench_matrix(const std::string& id, const ComplexMatrix& a, const BenchConfig& config);

/// Standard normal real n x n matrices, sample s drawn from stream (seed, s).
/// Results are ordered by sample index regardless of thread count.
std::vector<BenchResult> run_gaussian_suite(const BenchConfig& config);

/// Every *.mtx file in `dir` (sorted by name); non-square matrices are skipped.
std::vector<BenchResult> run_directory_suite(const std::filesystem::path& dir, const BenchConfig& config);

/// Pearson correlation between log kF improvements and log kappa improvements,
/// pooling the diagonal and block runs of every result. Throws InsufficientData
/// for fewer than 3 results.
double correlation_kF_kappa(const std::vector<BenchResult>& results);

/// Pearson correlation of two equally long samples.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& results);

/// Worker count: explicit request, else GEOPREC_THREADS, else hardware concurrency.
int resolve_threads(int requested);

}  // namespace geoprec
