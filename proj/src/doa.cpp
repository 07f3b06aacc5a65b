#include "mrsl/doa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrsl/errors.hpp"

namespace mrsl {

AnchorArray AnchorArray::corners(const Bounds& workspace) {
  AnchorArray array;
  array.nodes = {Point2{workspace.min_x, workspace.min_y}, Point2{workspace.min_x, workspace.max_y},
                 Point2{workspace.max_x, workspace.max_y}, Point2{workspace.max_x, workspace.min_y}};
  array.delta_x = workspace.width();
  array.delta_y = workspace.height();
  return array;
}

Point2 AnchorArray::center() const {
  Point2 c;
  for (const auto& n : nodes) c += n;
  return c * 0.25;
}

void AnchorArray::validate() const {
  if (!(delta_x > 0.0) || !(delta_y > 0.0)) throw DomainError("anchor spacing must be positive");
}

void DoaWindowConfig::validate() const {
  if (!(time_window > 0.0)) throw ConfigError("doa.time_window", "must be positive");
  if (smoothing_window < 1) throw ConfigError("doa.smoothing_window", "must be at least 1");
  if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("doa.decay", "must lie in (0, 1)");
}

namespace {

// Timestamps are products of a tick index and the tick length, so the window edge
// gets a relative tolerance instead of an exact comparison.
bool in_window(double t, double now, double window) {
  const double eps = 1e-9 * std::max(1.0, std::abs(now));
  return t >= now - window - eps && t <= now + eps;
}

}  // namespace

RssiSnapshot aggregate_window(const std::array<std::vector<RssiSample>, 4>& per_anchor,
                              const DoaWindowConfig& window, double now) {
  RssiSnapshot snapshot;
  snapshot.timestamp = now;
  for (std::size_t a = 0; a < 4; ++a) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& sample : per_anchor[a]) {
      if (in_window(sample.timestamp, now, window.time_window)) {
        sum += sample.rssi_dbm;
        ++count;
      }
    }
    if (count == 0) throw StaleDataError("anchor N" + std::to_string(a + 1) + " has no samples in window");
    snapshot.s[a] = sum / static_cast<double>(count);
  }
  return snapshot;
}

Gradient rssi_gradient(const RssiSnapshot& snapshot, const AnchorArray& anchors) {
  const auto& s = snapshot.s;
  const double two_dx = 2.0 * anchors.delta_x;
  const double two_dy = 2.0 * anchors.delta_y;
  return {(s[2] - s[1]) / two_dx + (s[3] - s[0]) / two_dx,
          (s[2] - s[3]) / two_dy + (s[1] - s[0]) / two_dy};
}

Angle doa_from_gradient(Gradient g) {
  if (g.gx == 0.0 && g.gy == 0.0) throw UndefinedDoaError("zero RSSI gradient");
  return Angle::from_radians(std::atan2(g.gy, g.gx));
}

Angle smooth_doa(std::span<const Angle> history, double decay) {
  if (history.empty()) throw DomainError("smooth_doa needs at least one angle");
  double c = 0.0;
  double s = 0.0;
  double w = 1.0;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    c += w * std::cos(it->radians());
    s += w * std::sin(it->radians());
    w *= decay;
  }
  if (std::hypot(c, s) < 1e-9) return history.back();
  return Angle::from_radians(std::atan2(s, c));
}

void DoaTracker::add_samples(std::span<const RssiSample> samples) {
  for (const auto& sample : samples) {
    if (sample.sensor_id > 3) throw DomainError("anchor sensor id out of range");
    buffers_[sample.sensor_id].push_back(sample);
  }
}

DoaTracker::Update DoaTracker::update(const AnchorArray& anchors, double now) {
  for (auto& buffer : buffers_) {
    std::erase_if(buffer, [&](const RssiSample& s) {
      return !in_window(s.timestamp, now, config_.time_window) && s.timestamp < now;
    });
  }

  Update result;
  auto reuse_previous = [&] {
    if (last_) result.smoothed = last_->smoothed;
  };

  RssiSnapshot snapshot;
  try {
    snapshot = aggregate_window(buffers_, config_, now);
  } catch (const StaleDataError&) {
    result.stale = true;
    reuse_previous();
    return result;
  }

  const Gradient g = rssi_gradient(snapshot, anchors);
  Angle raw;
  try {
    raw = doa_from_gradient(g);
  } catch (const UndefinedDoaError&) {
    result.undefined = true;
    reuse_previous();
    return result;
  }

  raw_history_.push_back(raw);
  while (raw_history_.size() > config_.smoothing_window) raw_history_.pop_front();
  const std::vector<Angle> history(raw_history_.begin(), raw_history_.end());
  last_ = DoaEstimate{raw, smooth_doa(history, config_.decay), g, now};
  result.smoothed = last_->smoothed;
  return result;
}

}  // namespace mrsl
