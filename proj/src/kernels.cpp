#include "mrsl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "kernels_simd.hpp"
#include "mrsl/errors.hpp"

namespace mrsl::kernels {

namespace {

constexpr double kMinSquaredDistance = kMinLinkDistance * kMinLinkDistance;

void check_sizes(std::size_t particles, std::size_t out) {
  if (particles != out) throw DomainError("kernel output span does not match particle count");
}

void doa_serial(std::span<const Particle> particles, const DoaObservationLog& log,
                const AnchorArray& anchors, const RadioParams& radio, double sigma,
                std::span<double> out) {
  for (std::size_t i = 0; i < particles.size(); ++i) {
    try {
      const auto errors = doa_error(particles[i].pos, log, anchors, radio);
      out[i] = log_weight_particle(errors, sigma);
    } catch (const UndefinedDoaError&) {
      out[i] = kLogLikelihoodFloor;
    }
  }
}

// The four path-loss terms only enter the gradient through two log-ratios of squared
// distances, so the predicted DOA needs two logarithms instead of four.
void doa_openmp(std::span<const Particle> particles, const DoaObservationLog& log,
                const AnchorArray& anchors, const RadioParams& radio, double sigma,
                std::span<double> out) {
  detail::DoaModel model{};
  for (int a = 0; a < 4; ++a) {
    model.anchor_x[a] = anchors.nodes[a].x;
    model.anchor_y[a] = anchors.nodes[a].y;
  }
  const double k = -5.0 * radio.path_exp / std::numbers::ln10;
  model.kx = k / (2.0 * anchors.delta_x);
  model.ky = k / (2.0 * anchors.delta_y);
  model.min_squared_distance = kMinSquaredDistance;
  model.log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
  model.inv_two_var = 1.0 / (2.0 * sigma * sigma);

  const Point2 now = log.newest().odom;
  std::vector<detail::DoaStep> steps;
  for (const auto& obs : log) {
    const Point2 offset = obs.odom - now;
    const Point2 u = obs.doa.unit_vector();
    steps.push_back({offset.x, offset.y, u.x, u.y});
  }

  const std::size_t n = particles.size();
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = particles[i].pos.x;
    ys[i] = particles[i].pos.y;
  }
  std::vector<unsigned char> undefined(n);
  detail::doa_loglik_soa(xs.data(), ys.data(), n, steps.data(), steps.size(), model, out.data(),
                         undefined.data());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = undefined[i] ? kLogLikelihoodFloor : std::max(out[i], kLogLikelihoodFloor);
  }
}

void neighbor_serial(std::span<const Particle> particles, std::span<const SharedPoseMsg> msgs,
                     const RadioParams& radio, double rssi_sigma, std::span<double> out) {
  const FusionConfig config{rssi_sigma, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < particles.size(); ++i) {
    double total = 0.0;
    for (const auto& msg : msgs) {
      total += std::log(*neighbor_likelihood(particles[i].pos, msg, radio, config, msg.timestamp));
    }
    out[i] = std::max(total, kLogLikelihoodFloor);
  }
}

void neighbor_openmp(std::span<const Particle> particles, std::span<const SharedPoseMsg> msgs,
                     const RadioParams& radio, double rssi_sigma, std::span<double> out) {
  // A zero prior weight makes every product zero.
  for (const auto& msg : msgs) {
    if (!(msg.est_weight > 0.0)) {
      std::fill(out.begin(), out.end(), kLogLikelihoodFloor);
      return;
    }
  }
  std::vector<detail::NeighborTerm> terms;
  for (const auto& msg : msgs) {
    terms.push_back({msg.est_pos.x, msg.est_pos.y, radio.a_ref_dbm - msg.reported_rssi,
                     std::log(msg.est_weight)});
  }
  const std::size_t n = particles.size();
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = particles[i].pos.x;
    ys[i] = particles[i].pos.y;
  }
  detail::neighbor_loglik_soa(xs.data(), ys.data(), n, terms.data(), terms.size(),
                              5.0 * radio.path_exp / std::numbers::ln10, kMinSquaredDistance,
                              -std::log(rssi_sigma * std::sqrt(2.0 * kPi)),
                              1.0 / (2.0 * rssi_sigma * rssi_sigma), out.data());
  for (auto& v : out) v = std::max(v, kLogLikelihoodFloor);
}

}  // namespace

void doa_log_likelihood(Backend backend, std::span<const Particle> particles,
                        const DoaObservationLog& log, const AnchorArray& anchors,
                        const RadioParams& radio, double sigma, std::span<double> out) {
  check_sizes(particles.size(), out.size());
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (log.empty()) throw DomainError("DOA likelihood needs a non-empty observation log");
  if (backend == Backend::kSerial) {
    doa_serial(particles, log, anchors, radio, sigma, out);
  } else {
    doa_openmp(particles, log, anchors, radio, sigma, out);
  }
}

void neighbor_log_likelihood(Backend backend, std::span<const Particle> particles,
                             std::span<const SharedPoseMsg> msgs, const RadioParams& radio,
                             double rssi_sigma, std::span<double> out) {
  check_sizes(particles.size(), out.size());
  if (!(rssi_sigma > 0.0)) throw DomainError("rssi_sigma must be positive");
  if (backend == Backend::kSerial) {
    neighbor_serial(particles, msgs, radio, rssi_sigma, out);
  } else {
    neighbor_openmp(particles, msgs, radio, rssi_sigma, out);
  }
}

void apply_log_likelihood(ParticleSet& set, std::span<const double> loglik) {
  check_sizes(set.size(), loglik.size());
  std::vector<double> combined(set.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    combined[i] = std::log(set.particles[i].weight) + loglik[i];
    peak = std::max(peak, combined[i]);
  }
  if (!std::isfinite(peak)) {
    for (auto& p : set.particles) p.weight = 0.0;
    return;
  }
  for (std::size_t i = 0; i < set.size(); ++i) set.particles[i].weight = std::exp(combined[i] - peak);
}

}  // namespace mrsl::kernels
