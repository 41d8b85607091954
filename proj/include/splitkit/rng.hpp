#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace splitkit {

/// One step of the SplitMix64 generator; also usable as a mixing function.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent substream seed from (root seed, module label, task index).
/// Work items seeded this way are reproducible regardless of how they are
/// scheduled across worker threads.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view module,
                          std::uint64_t task_index);

// Deterministic RNG wrapper.  All floating-point conversions are explicit here
// (no std::*_distribution), so a given seed yields the same draw sequence on
// every build of this project.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (second value cached).
  double normal();

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate);

  /// Uniform index in {0, ..., n-1}.  n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Samples an index from a normalized weight vector by cumulative scan.
  std::size_t categorical(const std::vector<double>& weights);

  Eigen::VectorXd normal_vector(Eigen::Index dim);

  /// Uniform on the unit sphere in R^dim.
  Eigen::VectorXd unit_vector(Eigen::Index dim);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace splitkit
