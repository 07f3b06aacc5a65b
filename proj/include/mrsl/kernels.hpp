#pragma once

// Per-particle likelihood kernels. Every kernel has a serial reference that walks the
// textbook measurement chain one operation at a time, and an OpenMP kernel that
// evaluates the same quantity in closed form. The simulator uses the OpenMP kernels;
// the references exist for tests and the benchmark.

#include <span>

#include "mrsl/doa.hpp"
#include "mrsl/fusion.hpp"
#include "mrsl/particle_filter.hpp"

namespace mrsl::kernels {

enum class Backend { kSerial, kOpenMP };

/// out[i] = log P_l(particle i): summed Gaussian log-density of the DOA errors over the
/// observation log, floored at kLogLikelihoodFloor. A particle whose back-projected
/// forward gradient vanishes gets the floor.
void doa_log_likelihood(Backend backend, std::span<const Particle> particles,
                        const DoaObservationLog& log, const AnchorArray& anchors,
                        const RadioParams& radio, double sigma, std::span<double> out);

/// out[i] = sum over msgs of log(P(r_j | x_j) * P(x_j)), floored at kLogLikelihoodFloor.
/// Messages are consumed in the order given; callers sort them first.
void neighbor_log_likelihood(Backend backend, std::span<const Particle> particles,
                             std::span<const SharedPoseMsg> msgs, const RadioParams& radio,
                             double rssi_sigma, std::span<double> out);

/// w_i <- w_i * exp(loglik_i - max_j(log w_j + loglik_j)). The common shift keeps the
/// result representable and cancels under normalization.
void apply_log_likelihood(ParticleSet& set, std::span<const double> loglik);

}  // namespace mrsl::kernels
