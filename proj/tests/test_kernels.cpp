#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mrsl/kernels.hpp"

using namespace mrsl;
using kernels::Backend;

namespace {

const Bounds kBox = Bounds::from_size(6, 6);
const AnchorArray kAnchors = AnchorArray::corners(kBox);

ParticleSet random_set(std::size_t c, double extent, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, extent);
  ParticleSet s;
  for (std::size_t i = 0; i < c; ++i) s.particles.push_back({{u(gen), u(gen)}, 1.0 / c});
  return s;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-9 * std::max(1.0, std::abs(a[i])));
  }
}

}  // namespace

TEST_CASE("DOA kernels agree across backends") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (double path_exp : {2.0, 3.5}) {
    const RadioParams radio{-40, path_exp, 0};
    for (std::size_t depth : {1u, 5u}) {
      DoaObservationLog log(depth);
      for (std::size_t k = 0; k < depth; ++k) {
        log.push({{0.1 * k, -0.05 * k}, Angle::from_radians(ang(gen))});
      }
      auto set = random_set(1001, 6, depth);
      set.particles[7].pos = kAnchors.center();  // flat forward gradient
      set.particles[8].pos = kAnchors.nodes[2];  // clamped distance
      std::vector<double> serial(set.size());
      std::vector<double> parallel(set.size());
      kernels::doa_log_likelihood(Backend::kSerial, set.particles, log, kAnchors, radio, 0.2, serial);
      kernels::doa_log_likelihood(Backend::kOpenMP, set.particles, log, kAnchors, radio, 0.2, parallel);
      check_close(serial, parallel);
      if (depth == 1) CHECK(serial[7] == kLogLikelihoodFloor);
    }
  }
}

TEST_CASE("DOA kernel matches the per-particle chain") {
  const RadioParams radio{-40, 2, 0};
  DoaObservationLog log(3);
  log.push({{0, 0}, Angle::from_radians(0.4)});
  log.push({{0.1, 0}, Angle::from_radians(0.5)});
  log.push({{0.2, 0.1}, Angle::from_radians(0.45)});
  const auto set = random_set(64, 6, 1);
  std::vector<double> out(set.size());
  kernels::doa_log_likelihood(Backend::kOpenMP, set.particles, log, kAnchors, radio, 0.2, out);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto errors = doa_error(set.particles[i].pos, log, kAnchors, radio);
    CHECK(out[i] == doctest::Approx(log_weight_particle(errors, 0.2)).epsilon(1e-9));
  }
}

TEST_CASE("neighbor kernels agree across backends") {
  const RadioParams radio{-45, 2.5, 0};
  std::vector<SharedPoseMsg> msgs;
  for (std::uint32_t j = 0; j < 6; ++j) {
    msgs.push_back({j, {0.7 * j, 5.0 - 0.6 * j}, 0.001 + 0.1 * j, -50.0 - 2.0 * j, 1.0});
  }
  auto set = random_set(999, 6, 3);
  set.particles[0].pos = msgs[2].est_pos;  // clamped distance
  std::vector<double> serial(set.size());
  std::vector<double> parallel(set.size());
  kernels::neighbor_log_likelihood(Backend::kSerial, set.particles, msgs, radio, 4.0, serial);
  kernels::neighbor_log_likelihood(Backend::kOpenMP, set.particles, msgs, radio, 4.0, parallel);
  check_close(serial, parallel);

  msgs[3].est_weight = 0.0;
  kernels::neighbor_log_likelihood(Backend::kSerial, set.particles, msgs, radio, 4.0, serial);
  kernels::neighbor_log_likelihood(Backend::kOpenMP, set.particles, msgs, radio, 4.0, parallel);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(serial[i] == kLogLikelihoodFloor);
    CHECK(parallel[i] == kLogLikelihoodFloor);
  }

  std::vector<double> none(set.size(), 1.0);
  kernels::neighbor_log_likelihood(Backend::kOpenMP, set.particles, {}, radio, 4.0, none);
  for (double v : none) CHECK(v == 0.0);
}

TEST_CASE("applying a log-likelihood multiplies the weights") {
  ParticleSet set = random_set(5, 6, 2);
  const std::vector<double> w0{0.1, 0.2, 0.3, 0.15, 0.25};
  for (std::size_t i = 0; i < 5; ++i) set.particles[i].weight = w0[i];
  const std::vector<double> ll{-1000, -1001, -1002, -999, kLogLikelihoodFloor};
  kernels::apply_log_likelihood(set, ll);
  // Ratios must match w_i * exp(ll_i) even though exp(ll_i) alone underflows.
  for (std::size_t i = 1; i < 5; ++i) {
    const double expected = std::log(w0[i] / w0[0]) + ll[i] - ll[0];
    CHECK(std::log(set.particles[i].weight / set.particles[0].weight) == doctest::Approx(expected));
  }

  for (auto& p : set.particles) p.weight = 0.0;
  kernels::apply_log_likelihood(set, ll);
  for (const auto& p : set.particles) CHECK(p.weight == 0.0);

  std::vector<double> wrong(4);
  CHECK_THROWS(kernels::apply_log_likelihood(set, wrong));
}
