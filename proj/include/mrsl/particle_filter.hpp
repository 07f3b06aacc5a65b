#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mrsl/doa.hpp"
#include "mrsl/geometry.hpp"
#include "mrsl/radio.hpp"
#include "mrsl/random.hpp"

namespace mrsl {

struct Particle {
  Point2 pos;
  double weight{0.0};
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::size_t generation{0};

  std::size_t size() const { return particles.size(); }
  double weight_sum() const;
};

enum class InitMode { kUniformWorkspace, kGaussianAroundPrior };

struct FilterConfig {
  std::size_t particle_count{1000};  ///< c
  std::size_t history_depth{5};      ///< M, logged steps used by the DOA likelihood
  double doa_sigma{0.2};             ///< radians
  InitMode init_mode{InitMode::kGaussianAroundPrior};
  double init_sigma{0.5};            ///< meters, used by kGaussianAroundPrior
  double process_noise{0.05};        ///< meters per axis per step
  double resample_threshold{0.5};    ///< resample when ESS < threshold * c

  void validate() const;
};

/// One logged step: where odometry put the robot and the smoothed DOA seen there.
struct DoaObservation {
  Point2 odom;
  Angle doa;
};

/// Ring buffer of the last M observations, oldest first.
class DoaObservationLog {
 public:
  explicit DoaObservationLog(std::size_t depth) : depth_(depth == 0 ? 1 : depth) {}

  void push(DoaObservation obs) {
    entries_.push_back(obs);
    if (entries_.size() > depth_) entries_.pop_front();
  }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t depth() const { return depth_; }
  const DoaObservation& operator[](std::size_t i) const { return entries_[i]; }
  const DoaObservation& newest() const { return entries_.back(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::size_t depth_;
  std::deque<DoaObservation> entries_;
};

/// c equally weighted particles, uniform over the workspace or Gaussian around `prior`
/// (clamped into the workspace). Throws DomainError for a degenerate workspace, a prior
/// outside it, or a Gaussian init without a prior.
ParticleSet init_particles(const FilterConfig& config, const Bounds& workspace,
                           std::optional<Point2> prior, RandomStream& rng);

/// Shift by the odometry delta plus N(0, process_noise) per axis; clamp to the workspace.
ParticleSet propagate(ParticleSet set, Point2 odom_delta, const FilterConfig& config,
                      const Bounds& workspace, RandomStream& rng);

/// DOA the anchor array would report for a noiseless, unobstructed transmitter at
/// `candidate`: clamped path loss to each anchor, then rssi_gradient and
/// doa_from_gradient. Throws UndefinedDoaError when the forward gradient vanishes.
Angle predicted_doa(Point2 candidate, const AnchorArray& anchors, const RadioParams& radio);

/// Wrapped (predicted - observed) for every logged step, oldest first. The candidate is
/// carried back to each step by the odometry offset between that step and the newest.
std::vector<double> doa_error(Point2 candidate, const DoaObservationLog& log,
                              const AnchorArray& anchors, const RadioParams& radio);

/// Floor applied to any per-particle log-likelihood before exponentiation.
inline constexpr double kLogLikelihoodFloor = -700.0;

/// Sum of Gaussian log-densities of `errors`, floored at kLogLikelihoodFloor.
double log_weight_particle(std::span<const double> errors, double sigma);

/// Product of Gaussian densities of `errors`, evaluated as exp(log_weight_particle).
double weight_particle(std::span<const double> errors, double sigma);

enum class NormalizeStatus { kOk, kDegenerate };

/// Divides every weight by the sum. All-zero (or non-finite) sums leave the set
/// untouched and return kDegenerate; the caller decides how to recover.
NormalizeStatus normalize(ParticleSet& set);

void reset_uniform_weights(ParticleSet& set);

/// 1 / sum(w^2) for normalized weights.
double effective_sample_size(const ParticleSet& set);

/// Systematic resampling with a single uniform offset, `u` in [0, 1/c).
ParticleSet systematic_resample(const ParticleSet& set, double u);

/// ESS-triggered systematic resampling. Returns the input unchanged when
/// ESS >= resample_threshold * c.
ParticleSet resample(ParticleSet set, const FilterConfig& config, RandomStream& rng);

struct PoseEstimate {
  Point2 pos;
  double weight{0.0};     ///< normalized weight of the chosen particle
  std::size_t index{0};
};

/// Highest-weight particle; ties go to the lowest index. Throws DomainError on an empty set.
PoseEstimate best_estimate(const ParticleSet& set);

}  // namespace mrsl
