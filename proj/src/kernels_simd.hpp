#pragma once

// Structure-of-arrays inner loops of the OpenMP kernels. This translation unit is built
// with -ffast-math so the loops vectorize against libmvec; inputs must therefore be
// finite (no zero priors, no zero distances) and callers handle every special case.

#include <cstddef>

namespace mrsl::kernels::detail {

struct DoaStep {
  double offset_x;
  double offset_y;
  double obs_cos;  // unit vector of the observed DOA
  double obs_sin;
};

struct DoaModel {
  double anchor_x[4];
  double anchor_y[4];
  double kx;
  double ky;
  double min_squared_distance;
  double log_norm;
  double inv_two_var;
};

/// out[i] = summed log-density; undefined[i] = 1 when some step's forward gradient vanishes.
void doa_loglik_soa(const double* x, const double* y, std::size_t n, const DoaStep* steps,
                    std::size_t n_steps, const DoaModel& model, double* out, unsigned char* undefined);

struct NeighborTerm {
  double est_x;
  double est_y;
  double offset;  // a_ref - reported_rssi
  double log_prior;
};

/// out[i] = sum_j [log_norm - (offset_j - k * ln(max(d2, min_d2)))^2 * inv_two_var + log_prior_j].
void neighbor_loglik_soa(const double* x, const double* y, std::size_t n, const NeighborTerm* terms,
                         std::size_t n_terms, double k, double min_squared_distance, double log_norm,
                         double inv_two_var, double* out);

}  // namespace mrsl::kernels::detail
