#include "mrsl/radio.hpp"

#include <algorithm>
#include <cmath>

#include "mrsl/errors.hpp"

namespace mrsl {

void RadioParams::validate() const {
  if (!(path_exp >= 2.0 && path_exp <= 6.0)) throw ConfigError("radio.path_exp", "must lie in [2, 6]");
  if (!(shadow_sigma_dbm >= 0.0)) throw ConfigError("radio.shadow_sigma", "must be non-negative");
  if (!std::isfinite(a_ref_dbm)) throw ConfigError("radio.a_ref", "must be finite");
}

double expected_rssi(const RadioParams& params, double distance) {
  if (!(distance > 0.0)) throw DomainError("expected_rssi requires a positive distance");
  return params.a_ref_dbm - 10.0 * params.path_exp * std::log10(distance);
}

double clamped_expected_rssi(const RadioParams& params, double distance) {
  return expected_rssi(params, std::max(distance, kMinLinkDistance));
}

double path_attenuation(std::span<const WallSegment> walls, Point2 tx, Point2 rx) {
  double total = 0.0;
  for (const auto& wall : walls) {
    if (segments_intersect(wall, tx, rx)) total += wall.attenuation_db;
  }
  return total;
}

double measure_rssi(const RadioParams& params, Point2 tx, Point2 rx,
                    std::span<const WallSegment> walls, RandomStream& rng) {
  if (tx == rx) throw DomainError("measure_rssi with coincident transmitter and receiver");
  double rssi = clamped_expected_rssi(params, distance(tx, rx)) - path_attenuation(walls, tx, rx);
  if (params.shadow_sigma_dbm > 0.0) rssi += rng.normal(0.0, params.shadow_sigma_dbm);
  return rssi;
}

}  // namespace mrsl
