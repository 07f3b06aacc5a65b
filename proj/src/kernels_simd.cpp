#include "kernels_simd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mrsl::kernels::detail {

namespace {

inline double sq(double v) { return v * v; }

}  // namespace

void doa_loglik_soa(const double* x, const double* y, std::size_t n, const DoaStep* steps,
                    std::size_t n_steps, const DoaModel& m, double* out, unsigned char* undefined) {
  const auto count = static_cast<std::int64_t>(n);
  std::vector<double> flat(n, 0.0);
  double* const f = flat.data();
#pragma omp parallel
  {
#pragma omp for simd schedule(static)
    for (std::int64_t i = 0; i < count; ++i) out[i] = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      const DoaStep s = steps[k];
#pragma omp for simd schedule(static)
      for (std::int64_t i = 0; i < count; ++i) {
        const double px = x[i] + s.offset_x;
        const double py = y[i] + s.offset_y;
        const double d0 = std::max(sq(px - m.anchor_x[0]) + sq(py - m.anchor_y[0]), m.min_squared_distance);
        const double d1 = std::max(sq(px - m.anchor_x[1]) + sq(py - m.anchor_y[1]), m.min_squared_distance);
        const double d2 = std::max(sq(px - m.anchor_x[2]) + sq(py - m.anchor_y[2]), m.min_squared_distance);
        const double d3 = std::max(sq(px - m.anchor_x[3]) + sq(py - m.anchor_y[3]), m.min_squared_distance);
        const double lx = std::log((d2 * d3) / (d0 * d1));
        const double ly = std::log((d2 * d1) / (d3 * d0));
        f[i] += (lx == 0.0 && ly == 0.0) ? 1.0 : 0.0;
        const double vx = m.kx * lx;
        const double vy = m.ky * ly;
        // Signed angle from the observed direction to the predicted one.
        const double e = std::atan2(s.obs_cos * vy - s.obs_sin * vx, s.obs_cos * vx + s.obs_sin * vy);
        out[i] += m.log_norm - e * e * m.inv_two_var;
      }
    }
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) undefined[i] = f[i] > 0.0 ? 1 : 0;
  }
}

void neighbor_loglik_soa(const double* x, const double* y, std::size_t n, const NeighborTerm* terms,
                         std::size_t n_terms, double k, double min_squared_distance, double log_norm,
                         double inv_two_var, double* out) {
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel
  {
#pragma omp for simd schedule(static)
    for (std::int64_t i = 0; i < count; ++i) out[i] = 0.0;
    for (std::size_t j = 0; j < n_terms; ++j) {
      const NeighborTerm t = terms[j];
      const double floor_d2 = min_squared_distance;
      const double slope = k;
      const double base = log_norm + t.log_prior;
      const double scale = inv_two_var;
#pragma omp for simd schedule(static)
      for (std::int64_t i = 0; i < count; ++i) {
        const double d2 = std::max(sq(x[i] - t.est_x) + sq(y[i] - t.est_y), floor_d2);
        const double e = t.offset - slope * std::log(d2);
        out[i] += base - e * e * scale;
      }
    }
  }
}

}  // namespace mrsl::kernels::detail
