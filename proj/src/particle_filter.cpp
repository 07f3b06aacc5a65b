#include "mrsl/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrsl/errors.hpp"

namespace mrsl {

double ParticleSet::weight_sum() const {
  double sum = 0.0;
  for (const auto& p : particles) sum += p.weight;
  return sum;
}

void FilterConfig::validate() const {
  if (particle_count < 1) throw ConfigError("filter.particle_count", "must be at least 1");
  if (history_depth < 1) throw ConfigError("filter.history_depth", "must be at least 1");
  if (!(doa_sigma > 0.0)) throw ConfigError("filter.doa_sigma", "must be positive");
  if (!(init_sigma >= 0.0)) throw ConfigError("filter.init_sigma", "must be non-negative");
  if (!(process_noise >= 0.0)) throw ConfigError("filter.process_noise", "must be non-negative");
  if (!(resample_threshold >= 0.0 && resample_threshold <= 1.0))
    throw ConfigError("filter.resample_threshold", "must lie in [0, 1]");
}

ParticleSet init_particles(const FilterConfig& config, const Bounds& workspace,
                           std::optional<Point2> prior, RandomStream& rng) {
  if (workspace.degenerate()) throw DomainError("degenerate workspace");
  if (prior && !workspace.contains(*prior)) throw DomainError("prior lies outside the workspace");

  ParticleSet set;
  set.particles.resize(config.particle_count);
  const double w = 1.0 / static_cast<double>(config.particle_count);

  if (config.init_mode == InitMode::kUniformWorkspace) {
    for (auto& p : set.particles) {
      p.pos.x = rng.uniform(workspace.min_x, workspace.max_x);
      p.pos.y = rng.uniform(workspace.min_y, workspace.max_y);
      p.weight = w;
    }
    return set;
  }

  if (!prior) throw DomainError("gaussian-around-prior init requires a prior");
  for (auto& p : set.particles) {
    if (config.init_sigma > 0.0) {
      p.pos = workspace.clamp({rng.normal(prior->x, config.init_sigma),
                               rng.normal(prior->y, config.init_sigma)});
    } else {
      p.pos = *prior;
    }
    p.weight = w;
  }
  return set;
}

ParticleSet propagate(ParticleSet set, Point2 odom_delta, const FilterConfig& config,
                      const Bounds& workspace, RandomStream& rng) {
  const double sigma = config.process_noise;
  for (auto& p : set.particles) {
    Point2 next = p.pos + odom_delta;
    if (sigma > 0.0) {
      next.x += rng.normal(0.0, sigma);
      next.y += rng.normal(0.0, sigma);
    }
    p.pos = workspace.clamp(next);
  }
  ++set.generation;
  return set;
}

Angle predicted_doa(Point2 candidate, const AnchorArray& anchors, const RadioParams& radio) {
  RssiSnapshot snapshot;
  for (std::size_t a = 0; a < 4; ++a) {
    snapshot.s[a] = clamped_expected_rssi(radio, distance(candidate, anchors.nodes[a]));
  }
  return doa_from_gradient(rssi_gradient(snapshot, anchors));
}

std::vector<double> doa_error(Point2 candidate, const DoaObservationLog& log,
                              const AnchorArray& anchors, const RadioParams& radio) {
  if (log.empty()) throw DomainError("doa_error needs a non-empty observation log");
  const Point2 now = log.newest().odom;
  std::vector<double> errors;
  errors.reserve(log.size());
  for (const auto& obs : log) {
    const Point2 past = candidate + (obs.odom - now);
    errors.push_back(angular_diff(predicted_doa(past, anchors, radio), obs.doa).radians());
  }
  return errors;
}

double log_weight_particle(std::span<const double> errors, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double log_norm = -std::log(sigma * std::sqrt(2.0 * kPi));
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (double e : errors) total += log_norm - e * e * inv_two_var;
  return std::max(total, kLogLikelihoodFloor);
}

double weight_particle(std::span<const double> errors, double sigma) {
  return std::exp(log_weight_particle(errors, sigma));
}

NormalizeStatus normalize(ParticleSet& set) {
  const double sum = set.weight_sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) return NormalizeStatus::kDegenerate;
  for (auto& p : set.particles) p.weight /= sum;
  return NormalizeStatus::kOk;
}

void reset_uniform_weights(ParticleSet& set) {
  if (set.particles.empty()) return;
  const double w = 1.0 / static_cast<double>(set.size());
  for (auto& p : set.particles) p.weight = w;
}

double effective_sample_size(const ParticleSet& set) {
  double sq = 0.0;
  for (const auto& p : set.particles) sq += p.weight * p.weight;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

ParticleSet systematic_resample(const ParticleSet& set, double u) {
  const std::size_t c = set.size();
  ParticleSet out;
  out.generation = set.generation;
  out.particles.reserve(c);
  const double step = 1.0 / static_cast<double>(c);
  const double w = step;

  // Pointers are scaled by the weight total so a sum that falls short of 1 in the last
  // bit can never push a pointer past the final positive-weight parent.
  const double total = set.weight_sum();
  double cumulative = set.particles.empty() ? 0.0 : set.particles[0].weight;
  std::size_t parent = 0;
  for (std::size_t i = 0; i < c; ++i) {
    const double pointer = (u + static_cast<double>(i) * step) * total;
    while (pointer >= cumulative && parent + 1 < c) {
      ++parent;
      cumulative += set.particles[parent].weight;
    }
    out.particles.push_back({set.particles[parent].pos, w});
  }
  return out;
}

ParticleSet resample(ParticleSet set, const FilterConfig& config, RandomStream& rng) {
  const double c = static_cast<double>(set.size());
  if (set.particles.empty() || effective_sample_size(set) >= config.resample_threshold * c) {
    return set;
  }
  return systematic_resample(set, rng.uniform(0.0, 1.0 / c));
}

PoseEstimate best_estimate(const ParticleSet& set) {
  if (set.particles.empty()) throw DomainError("best_estimate of an empty particle set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (set.particles[i].weight > set.particles[best].weight) best = i;
  }
  const double sum = set.weight_sum();
  const double w = sum > 0.0 ? set.particles[best].weight / sum : 0.0;
  return {set.particles[best].pos, w, best};
}

}  // namespace mrsl
