#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "mrsl/errors.hpp"
#include "mrsl/particle_filter.hpp"

using namespace mrsl;

namespace {

const Bounds kBox = Bounds::from_size(6, 6);
const AnchorArray kAnchors = AnchorArray::corners(kBox);
const RadioParams kRadio{-40, 2, 0};

ParticleSet with_weights(std::vector<double> w) {
  ParticleSet set;
  for (std::size_t i = 0; i < w.size(); ++i) {
    set.particles.push_back({{static_cast<double>(i) + 0.5, 1.0}, w[i]});
  }
  return set;
}

std::vector<double> weights_of(const ParticleSet& s) {
  std::vector<double> w;
  for (const auto& p : s.particles) w.push_back(p.weight);
  return w;
}

double gaussian(double e, double sigma) {
  return std::exp(-e * e / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * kPi));
}

}  // namespace

TEST_CASE("initialization") {
  RandomStream rng(1);
  FilterConfig cfg;
  cfg.particle_count = 4;
  cfg.init_mode = InitMode::kUniformWorkspace;
  const auto uniform = init_particles(cfg, kBox, std::nullopt, rng);
  REQUIRE(uniform.size() == 4);
  for (const auto& p : uniform.particles) {
    CHECK(p.weight == 0.25);
    CHECK(kBox.contains(p.pos));
  }

  cfg.init_mode = InitMode::kGaussianAroundPrior;
  cfg.init_sigma = 0.0;
  const auto point = init_particles(cfg, kBox, Point2{2, 3}, rng);
  for (const auto& p : point.particles) CHECK(p.pos == Point2{2, 3});

  CHECK_THROWS_AS(init_particles(cfg, kBox, Point2{7, 7}, rng), DomainError);
  CHECK_THROWS_AS(init_particles(cfg, kBox, std::nullopt, rng), DomainError);
  CHECK_THROWS_AS(init_particles(cfg, Bounds::from_size(0, 6), Point2{0, 0}, rng), DomainError);

  cfg.init_sigma = 3.0;
  cfg.particle_count = 500;
  for (const auto& p : init_particles(cfg, kBox, Point2{0.2, 5.9}, rng).particles) {
    CHECK(kBox.contains(p.pos));
  }
}

TEST_CASE("propagation") {
  RandomStream rng(1);
  FilterConfig cfg;
  cfg.process_noise = 0.0;
  ParticleSet set = with_weights({0.5, 0.5});
  const auto moved = propagate(set, {1, 0}, cfg, kBox, rng);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(moved.particles[i].pos == set.particles[i].pos + Point2{1, 0});
  }
  CHECK(moved.generation == set.generation + 1);
  const auto still = propagate(set, {0, 0}, cfg, kBox, rng);
  CHECK(still.particles[0].pos == set.particles[0].pos);

  ParticleSet edge;
  edge.particles.push_back({{5.9, 3}, 1.0});
  CHECK(propagate(edge, {0.5, 0}, cfg, kBox, rng).particles[0].pos == Point2{6.0, 3});
}

TEST_CASE("forward model") {
  const Point2 c = kAnchors.center();
  CHECK(predicted_doa(c + Point2{1, 0}, kAnchors, kRadio).radians() == doctest::Approx(0.0));
  CHECK(predicted_doa(c + Point2{0, 1}, kAnchors, kRadio).radians() == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(predicted_doa(c, kAnchors, kRadio), UndefinedDoaError);
}

TEST_CASE("DOA errors against the observation log") {
  const Point2 cand = kAnchors.center() + Point2{1, 0};
  DoaObservationLog log(5);
  for (int k = 0; k < 3; ++k) {
    const Point2 odom{0.1 * k, 0.0};
    // Observation consistent with a robot that moved along +x and is now at cand.
    const Point2 past = cand + (odom - Point2{0.2, 0.0});
    log.push({odom, predicted_doa(past, kAnchors, kRadio)});
  }
  for (double e : doa_error(cand, log, kAnchors, kRadio)) CHECK(std::abs(e) < 1e-12);

  DoaObservationLog one(5);
  one.push({{0, 0}, Angle::from_radians(-0.3)});
  const auto single = doa_error(cand, one, kAnchors, kRadio);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(0.3));

  const Point2 west = kAnchors.center() + Point2{-1.5, 0.15};
  const double pred = predicted_doa(west, kAnchors, kRadio).radians();
  REQUIRE(pred > kPi - 0.2);
  DoaObservationLog wrap(5);
  wrap.push({{0, 0}, Angle::from_radians(pred + 0.2)});
  CHECK(wrap[0].doa.radians() < 0.0);
  CHECK(doa_error(west, wrap, kAnchors, kRadio)[0] == doctest::Approx(-0.2));

  DoaObservationLog ring(2);
  for (int k = 0; k < 4; ++k) ring.push({{static_cast<double>(k), 0}, Angle{}});
  CHECK(ring.size() == 2);
  CHECK(ring[0].odom.x == 2.0);
  CHECK(ring.newest().odom.x == 3.0);
}

TEST_CASE("particle weight") {
  const std::vector<double> zero{0.0};
  CHECK(weight_particle(zero, 1.0) == doctest::Approx(1.0 / std::sqrt(2 * kPi)));
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(weight_particle(zeros, 1.0) == doctest::Approx(1.0 / (2 * kPi)));
  for (double sigma : {0.1, 0.2, 1.0, 3.0}) {
    const std::vector<double> one{sigma};
    CHECK(weight_particle(one, sigma) == doctest::Approx(gaussian(0, sigma) * std::exp(-0.5)));
  }
  double prev = weight_particle(zeros, 0.2);
  for (double e = 0.01; e < 1.0; e += 0.01) {
    const std::vector<double> errs{0.0, e};
    const double w = weight_particle(errs, 0.2);
    CHECK(w < prev);
    prev = w;
  }
  const std::vector<double> huge(10, 50.0);
  CHECK(log_weight_particle(huge, 0.01) == kLogLikelihoodFloor);
  CHECK(weight_particle(huge, 0.01) > 0.0);
}

TEST_CASE("normalization") {
  auto a = with_weights({2, 2});
  CHECK(normalize(a) == NormalizeStatus::kOk);
  CHECK(weights_of(a) == std::vector<double>{0.5, 0.5});
  auto b = with_weights({1, 0, 0});
  normalize(b);
  CHECK(weights_of(b) == std::vector<double>{1, 0, 0});
  auto z = with_weights({0, 0});
  CHECK(normalize(z) == NormalizeStatus::kDegenerate);
  CHECK(weights_of(z) == std::vector<double>{0, 0});

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> mag(-300, 300);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(257);
    for (auto& v : w) v = std::exp(mag(rng));
    auto s = with_weights(w);
    REQUIRE(normalize(s) == NormalizeStatus::kOk);
    const auto n = weights_of(s);
    CHECK(std::abs(std::accumulate(n.begin(), n.end(), 0.0) - 1.0) <= 1e-9);
  }
}

TEST_CASE("resampling") {
  RandomStream rng(4);
  FilterConfig cfg;
  cfg.particle_count = 4;

  auto delta = with_weights({1, 0, 0, 0});
  const auto r = resample(delta, cfg, rng);
  for (const auto& p : r.particles) {
    CHECK(p.pos == delta.particles[0].pos);
    CHECK(p.weight == 0.25);
  }

  auto uniform = with_weights({0.25, 0.25, 0.25, 0.25});
  const auto same = resample(uniform, cfg, rng);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same.particles[i].pos == uniform.particles[i].pos);

  // Oracle: enumerate the systematic pointers over the single offset u and pick each
  // parent by searching the cumulative weights.
  const std::vector<double> w{0.5, 0.5, 0.0, 0.0};
  std::vector<double> cum(w.size());
  std::partial_sum(w.begin(), w.end(), cum.begin());
  const auto half = with_weights(w);
  for (double u = 0.0; u < 0.25; u += 0.25 / 97) {
    std::map<std::size_t, int> expected;
    for (int i = 0; i < 4; ++i) {
      const double ptr = u + i * 0.25;
      expected[std::upper_bound(cum.begin(), cum.end(), ptr) - cum.begin()]++;
    }
    CHECK(expected == std::map<std::size_t, int>{{0, 2}, {1, 2}});
    std::map<std::size_t, int> got;
    for (const auto& p : systematic_resample(half, u).particles) {
      for (std::size_t k = 0; k < 4; ++k) {
        if (p.pos == half.particles[k].pos) got[k]++;
      }
    }
    CHECK(got == expected);
  }
}

TEST_CASE("resampling keeps the count and only copies existing positions") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0, 1);
  RandomStream rng(5);
  FilterConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = 50 + trial;
    std::vector<double> w(c);
    for (auto& v : w) v = std::pow(u(gen), 8);
    ParticleSet s;
    for (std::size_t i = 0; i < c; ++i) s.particles.push_back({{u(gen) * 6, u(gen) * 6}, w[i]});
    normalize(s);
    std::set<std::pair<double, double>> inputs;
    for (const auto& p : s.particles) inputs.insert({p.pos.x, p.pos.y});
    cfg.particle_count = c;
    const auto r = resample(s, cfg, rng);
    CHECK(r.size() == c);
    for (const auto& p : r.particles) CHECK(inputs.count({p.pos.x, p.pos.y}) == 1);
  }
}

TEST_CASE("best estimate") {
  auto s = with_weights({0.1, 0.7, 0.2});
  const auto e = best_estimate(s);
  CHECK(e.index == 1);
  CHECK(e.pos == s.particles[1].pos);
  CHECK(e.weight == doctest::Approx(0.7));
  CHECK(best_estimate(with_weights({0.25, 0.25, 0.25, 0.25})).index == 0);
  const auto single = best_estimate(with_weights({1.0}));
  CHECK(single.index == 0);
  CHECK(single.weight == 1.0);
  CHECK_THROWS_AS(best_estimate(ParticleSet{}), DomainError);

  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(64);
    for (auto& v : w) v = u(gen);
    const auto base = best_estimate(with_weights(w)).index;
    const double k = std::exp(u(gen) * 20 - 10);
    for (auto& v : w) v *= k;
    CHECK(best_estimate(with_weights(w)).index == base);
  }
}

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(with_weights({0.25, 0.25, 0.25, 0.25})) == doctest::Approx(4.0));
  CHECK(effective_sample_size(with_weights({1, 0, 0, 0})) == doctest::Approx(1.0));
}
