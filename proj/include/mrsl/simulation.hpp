#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrsl/doa.hpp"
#include "mrsl/fusion.hpp"
#include "mrsl/particle_filter.hpp"
#include "mrsl/random.hpp"
#include "mrsl/world.hpp"

namespace mrsl {

/// kArl runs the same filter with every fusion step skipped.
enum class Algorithm { kMrsl, kArl };

std::string to_string(Algorithm algorithm);
/// Throws ConfigError for anything but "mrsl" / "arl".
Algorithm parse_algorithm(const std::string& text);

struct SimulationConfig {
  WorldConfig world;
  FilterConfig filter;
  FusionConfig fusion;
  DoaWindowConfig doa;
  Algorithm algorithm{Algorithm::kMrsl};

  void validate() const;
};

/// Everything one robot owns: its particle set, DOA pipeline, observation log,
/// dead-reckoned odometry and private random streams.
struct RobotFilter {
  std::uint32_t robot_id{0};
  ParticleSet particles;
  DoaTracker doa;
  DoaObservationLog log;
  Point2 odom;
  PoseEstimate estimate;
  RandomStream filter_rng;
  RandomStream anchor_rng;
  RandomStream peer_rng;
  RandomStream odom_rng;
};

/// One row of the trajectory trace.
struct TraceRow {
  std::size_t tick{0};
  std::uint32_t robot_id{0};
  Point2 truth;
  Point2 estimate;
  double err_m{0.0};
  std::size_t n_msgs_fused{0};
  bool degenerate{false};
};

void write_trace_header(std::ostream& os);
void write_trace_row(std::ostream& os, const TraceRow& row);

class Simulation {
 public:
  explicit Simulation(SimulationConfig config);

  /// One full cycle: motion, anchor sensing, DOA update, propagation and DOA weighting,
  /// message exchange over the lossy bus and fusion (MRSL only), resampling.
  /// Returns one trace row per robot.
  std::vector<TraceRow> run_tick();

  const WorldState& world() const { return world_; }
  const std::vector<RobotFilter>& filters() const { return filters_; }
  const SimulationConfig& config() const { return config_; }
  /// Bus traffic of the last tick (empty in ARL mode).
  const BusDelivery& last_delivery() const { return last_delivery_; }

 private:
  void update_local(RobotFilter& filter, Point2 odom_delta, bool& degenerate);
  std::vector<AddressedMsg> outgoing_messages();

  SimulationConfig config_;
  Bounds workspace_;
  MotionStreams motion_;
  RandomStream bus_rng_;
  WorldState world_;
  std::vector<RobotFilter> filters_;
  BusDelivery last_delivery_;
};

}  // namespace mrsl
