#pragma once

#include <array>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mrsl/geometry.hpp"
#include "mrsl/radio.hpp"

namespace mrsl {

/// The four fixed corner nodes. Index order is N1 bottom-left, N2 top-left,
/// N3 top-right, N4 bottom-right.
struct AnchorArray {
  std::array<Point2, 4> nodes{};
  double delta_x{0.0};  ///< Horizontal separation of the corner nodes.
  double delta_y{0.0};  ///< Vertical separation of the corner nodes.

  static AnchorArray corners(const Bounds& workspace);

  Point2 center() const;
  /// Throws DomainError when the spacing is not positive.
  void validate() const;
};

/// Window-averaged RSSI of N1..N4.
struct RssiSnapshot {
  std::array<double, 4> s{};
  double timestamp{0.0};
};

/// RSSI gradient in dB per meter.
struct Gradient {
  double gx{0.0};
  double gy{0.0};
};

struct DoaEstimate {
  Angle raw;
  Angle smoothed;
  Gradient gradient;
  double timestamp{0.0};
};

struct DoaWindowConfig {
  double time_window{0.1};      ///< Aggregation window T, seconds.
  std::size_t smoothing_window{5};  ///< K, number of raw DOAs kept for smoothing.
  double decay{0.7};            ///< Exponential weight per step of age, in (0, 1).

  void validate() const;
};

/// Per-anchor mean of the samples whose timestamp lies in [now - T, now].
/// Throws StaleDataError when some anchor has no sample in the window.
RssiSnapshot aggregate_window(const std::array<std::vector<RssiSample>, 4>& per_anchor,
                              const DoaWindowConfig& window, double now);

/// Central finite differences over the four corners.
Gradient rssi_gradient(const RssiSnapshot& snapshot, const AnchorArray& anchors);

/// Full-quadrant direction of the gradient. Throws UndefinedDoaError on a zero gradient.
Angle doa_from_gradient(Gradient g);

/// Exponentially weighted circular mean of `history` (oldest first); the newest entry
/// gets weight 1, the one before it `decay`, and so on. Falls back to the newest raw
/// angle when the weighted resultant is shorter than 1e-9.
Angle smooth_doa(std::span<const Angle> history, double decay);

/// Per-robot DOA pipeline: buffers anchor samples, aggregates, differentiates and smooths.
class DoaTracker {
 public:
  explicit DoaTracker(DoaWindowConfig config) : config_(config) {}

  /// Samples are routed by sensor_id, which must be 0..3 (N1..N4).
  void add_samples(std::span<const RssiSample> samples);

  struct Update {
    std::optional<Angle> smoothed;  ///< Empty only when no DOA has ever been available.
    bool stale{false};              ///< Window was missing an anchor; previous DOA reused.
    bool undefined{false};          ///< Gradient vanished; previous DOA reused.
  };

  Update update(const AnchorArray& anchors, double now);

  const std::optional<DoaEstimate>& last() const { return last_; }

 private:
  DoaWindowConfig config_;
  std::array<std::vector<RssiSample>, 4> buffers_;
  std::deque<Angle> raw_history_;
  std::optional<DoaEstimate> last_;
};

}  // namespace mrsl
