#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mrsl/errors.hpp"
#include "mrsl/fusion.hpp"

using namespace mrsl;

namespace {

const RadioParams kRadio{-40, 2, 0};

ParticleSet random_set(std::size_t c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 6);
  std::uniform_real_distribution<double> w(0.1, 1);
  ParticleSet s;
  for (std::size_t i = 0; i < c; ++i) s.particles.push_back({{u(gen), u(gen)}, w(gen)});
  normalize(s);
  return s;
}

std::vector<SharedPoseMsg> random_msgs(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 6);
  std::uniform_real_distribution<double> w(0.001, 0.05);
  std::uniform_real_distribution<double> r(-65, -40);
  std::vector<SharedPoseMsg> msgs;
  for (std::size_t j = 0; j < m; ++j) {
    msgs.push_back({static_cast<std::uint32_t>(j + 1), {u(gen), u(gen)}, w(gen), r(gen), 10.0});
  }
  return msgs;
}

}  // namespace

TEST_CASE("RSSI error sign convention") {
  static_assert(rssi_error(-60, -60) == 0);
  CHECK(rssi_error(-55, -60) == 5);
  CHECK(rssi_error(-60, -55) == -5);
}

TEST_CASE("candidate RSSI") {
  CHECK(candidate_rssi({0, 0}, {1, 0}, kRadio) == doctest::Approx(-40));
  CHECK(candidate_rssi({0, 0}, {6, 8}, kRadio) == doctest::Approx(-60));
  // Oracle: path loss at the 0.1 m clamp.
  CHECK(candidate_rssi({2, 2}, {2, 2}, kRadio) == doctest::Approx(-40 - 20 * std::log10(0.1)));
  CHECK(candidate_rssi({2, 2}, {2, 2}, kRadio) == doctest::Approx(-20));
}

TEST_CASE("neighbor likelihood") {
  const FusionConfig cfg{1.0, 0.2};
  const double peak = 1.0 / std::sqrt(2 * kPi);
  const SharedPoseMsg msg{1, {1, 0}, 1.0, -40, 0.0};
  CHECK(*neighbor_likelihood({0, 0}, msg, kRadio, cfg, 0.0) == doctest::Approx(peak));
  SharedPoseMsg half = msg;
  half.est_weight = 0.5;
  CHECK(*neighbor_likelihood({0, 0}, half, kRadio, cfg, 0.0) == doctest::Approx(0.5 * peak));
  SharedPoseMsg off = half;
  off.reported_rssi = -41;
  CHECK(*neighbor_likelihood({0, 0}, off, kRadio, cfg, 0.0) ==
        doctest::Approx(peak * std::exp(-0.5) * 0.5));
  CHECK(neighbor_likelihood({0, 0}, msg, kRadio, cfg, 0.2).has_value());
  CHECK_FALSE(neighbor_likelihood({0, 0}, msg, kRadio, cfg, 0.25).has_value());
}

TEST_CASE("fusing nothing only normalizes") {
  ParticleSet s = random_set(100, 1);
  for (auto& p : s.particles) p.weight *= 3.0;
  const auto before = best_estimate(s).index;
  const auto res = fuse(s, {}, kRadio, FusionConfig{}, 0.0);
  CHECK(res.fused == 0);
  CHECK_FALSE(res.degenerate);
  CHECK(best_estimate(s).index == before);
  CHECK(s.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));

  ParticleSet t = random_set(50, 2);
  const auto stale = random_msgs(3, 4);
  const ParticleSet copy = t;
  CHECK(fuse(t, stale, kRadio, FusionConfig{}, 100.0).fused == 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.particles[i].weight == doctest::Approx(copy.particles[i].weight));
  }
}

TEST_CASE("an equidistant neighbor leaves the argmax alone") {
  ParticleSet s;
  const Point2 c{3, 3};
  for (int k = 0; k < 12; ++k) {
    const double a = k * kTwoPi / 12;
    s.particles.push_back({c + Point2{std::cos(a), std::sin(a)} * 1.5, 0.01 * (k + 1)});
  }
  normalize(s);
  const auto before = best_estimate(s).index;
  const std::vector<SharedPoseMsg> msg{{1, c, 0.4, -52, 0.0}};
  fuse(s, msg, kRadio, FusionConfig{}, 0.0);
  CHECK(best_estimate(s).index == before);
}

TEST_CASE("a three-sigma RSSI mismatch costs exp(9/2)") {
  const FusionConfig cfg{4.0, 0.2};
  const Point2 neighbor{3, 3};
  const double reported = -50;
  // Distances at which the candidate path-loss RSSI equals reported and reported - 3 sigma.
  const double d_match = std::pow(10.0, (-40 - reported) / 20.0);
  const double d_off = std::pow(10.0, (-40 - (reported - 3 * cfg.rssi_sigma)) / 20.0);
  ParticleSet s;
  s.particles.push_back({neighbor + Point2{d_match, 0}, 0.5});
  s.particles.push_back({neighbor + Point2{0, d_off}, 0.5});
  const std::vector<SharedPoseMsg> msg{{2, neighbor, 0.3, reported, 0.0}};
  fuse(s, msg, kRadio, cfg, 0.0);
  const double ratio = s.particles[0].weight / s.particles[1].weight;
  CHECK(ratio == doctest::Approx(std::exp(4.5)).epsilon(1e-9));
  CHECK(ratio == doctest::Approx(90.0).epsilon(0.001));
}

TEST_CASE("fusion is bit-exact under message permutation") {
  const ParticleSet base = random_set(500, 7);
  auto msgs = random_msgs(7, 8);
  ParticleSet ref = base;
  fuse(ref, msgs, kRadio, FusionConfig{}, 10.0);
  CHECK(ref.weight_sum() == doctest::Approx(1.0).epsilon(1e-9));
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(msgs.begin(), msgs.end(), gen);
    ParticleSet s = base;
    fuse(s, msgs, kRadio, FusionConfig{}, 10.0);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.particles[i].weight == ref.particles[i].weight);
  }
}

TEST_CASE("scaling every neighbor prior keeps the fused argmax") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ParticleSet base = random_set(300, seed);
    auto msgs = random_msgs(4, seed + 100);
    ParticleSet a = base;
    fuse(a, msgs, kRadio, FusionConfig{}, 10.0);
    for (auto& m : msgs) m.est_weight *= 7.5;
    ParticleSet b = base;
    fuse(b, msgs, kRadio, FusionConfig{}, 10.0);
    CHECK(best_estimate(a).index == best_estimate(b).index);
  }
}

TEST_CASE("a zero neighbor prior floors every particle alike") {
  ParticleSet s = random_set(10, 3);
  const ParticleSet before = s;
  const std::vector<SharedPoseMsg> msg{{1, {1, 1}, 0.0, -50, 0.0}};
  const auto res = fuse(s, msg, kRadio, FusionConfig{}, 0.0);
  CHECK_FALSE(res.degenerate);
  CHECK(res.fused == 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.particles[i].weight == doctest::Approx(before.particles[i].weight).epsilon(1e-12));
  }
}

TEST_CASE("wire format round trip") {
  const SharedPoseMsg msg{4, {1.25, 5.5}, 0.0125, -61.5, 12.3};
  const std::string text = encode_message(msg);
  CHECK(decode_message(text) == msg);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.size() == 6);
  CHECK(j.at("sender_id") == 4);
  CHECK(j.at("rssi") == -61.5);

  CHECK_THROWS_AS(decode_message(R"({"sender_id":1,"x":0,"y":0,"weight":2,"rssi":-50,"timestamp":0})"),
                  DomainError);
  CHECK_THROWS_AS(decode_message(R"({"sender_id":1,"x":0,"y":0,"weight":0.5,"rssi":-50})"), DomainError);
  CHECK_THROWS(decode_message(R"({"sender_id":1,"x":0,"y":0,"weight":0.5,"rssi":-50,"t":0})"));
  CHECK_THROWS(decode_message("not json"));
}
