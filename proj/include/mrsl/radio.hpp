#pragma once

#include <cstdint>
#include <span>

#include "mrsl/geometry.hpp"
#include "mrsl/random.hpp"

namespace mrsl {

/// Log-distance path-loss constants: rssi = a_ref - 10 * path_exp * log10(d).
struct RadioParams {
  double a_ref_dbm{-40.0};        ///< RSSI at the 1 m reference distance.
  double path_exp{2.0};           ///< Propagation exponent, 2 (free space) to 6.
  double shadow_sigma_dbm{2.0};   ///< Std-dev of additive Gaussian shadowing, in dB.

  /// Throws ConfigError when path_exp is outside [2, 6] or shadow_sigma is negative.
  void validate() const;
};

struct RssiSample {
  std::uint32_t source_id{0};
  std::uint32_t sensor_id{0};
  double rssi_dbm{0.0};
  double timestamp{0.0};
};

/// Links shorter than this are evaluated at this distance in measure_rssi and in the
/// filters' forward models; the log model diverges at zero.
inline constexpr double kMinLinkDistance = 0.1;

/// Noiseless path-loss RSSI. Throws DomainError for distance <= 0.
double expected_rssi(const RadioParams& params, double distance);

/// expected_rssi evaluated at max(distance, kMinLinkDistance).
double clamped_expected_rssi(const RadioParams& params, double distance);

/// Total attenuation of every wall the tx-rx path crosses.
double path_attenuation(std::span<const WallSegment> walls, Point2 tx, Point2 rx);

/// Synthetic RSSI: path loss at the clamped distance, minus wall attenuation, plus
/// N(0, shadow_sigma) shadowing. No draw is consumed when shadow_sigma == 0.
/// Throws DomainError when tx == rx.
double measure_rssi(const RadioParams& params, Point2 tx, Point2 rx,
                    std::span<const WallSegment> walls, RandomStream& rng);

}  // namespace mrsl
