#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace geoprec {

// Counter-based seed splitting: every random stream in the library is derived
// from (root seed, stream id) so results never depend on call order or on how
// work is scheduled across threads.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(split_seed(seed, stream)) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }
  std::uint64_t next() { return engine_(); }

  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols);
  Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace geoprec
