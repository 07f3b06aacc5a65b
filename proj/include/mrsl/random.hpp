#pragma once

#include <cstdint>
#include <random>

namespace mrsl {

/// Independent stream families derived from one master seed.
enum class Subsystem : std::uint64_t {
  kRobotMotion = 1,
  kObstacleMotion = 2,
  kAnchorShadowing = 3,
  kPeerShadowing = 4,
  kBus = 5,
  kFilter = 6,
  kOdometry = 7,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for (subsystem, entity). Streams for different entities never share state, so
/// adding robots leaves the existing robots' draws untouched.
std::uint64_t derive_seed(std::uint64_t master_seed, Subsystem subsystem, std::uint64_t entity);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t master_seed, Subsystem subsystem, std::uint64_t entity)
      : engine_(derive_seed(master_seed, subsystem, entity)) {}

  double normal(double mean, double sigma) { return mean + sigma * std_normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Uniform on [0, 1).
  double unit() { return std::generate_canonical<double, 53>(engine_); }
  bool bernoulli(double p) { return unit() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

}  // namespace mrsl
