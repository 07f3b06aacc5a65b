#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrsl/doa.hpp"
#include "mrsl/fusion.hpp"
#include "mrsl/geometry.hpp"
#include "mrsl/radio.hpp"
#include "mrsl/random.hpp"

namespace mrsl {

struct WorldConfig {
  double width{6.0};
  double height{6.0};
  std::size_t n_robots{3};
  std::size_t n_obstacle_robots{0};
  std::vector<WallSegment> walls;
  RadioParams radio;
  double pdr{0.0};               ///< packet drop ratio of the broadcast bus
  double tick{0.1};              ///< seconds
  double duration{120.0};        ///< seconds per trial
  double speed{0.25};            ///< m/s, robots and obstacles alike
  double turn_sigma{0.2};        ///< radians of heading noise per tick
  double body_length{0.3};       ///< robot/obstacle body segment used for LOS blocking
  double body_attenuation_db{10.0};
  double odometry_noise{0.0};    ///< meters per axis per tick, added to the filters' odometry
  double comm_range{0.0};        ///< meters; 0 means every robot hears every other robot
  std::uint64_t master_seed{1};

  Bounds workspace() const { return Bounds::from_size(width, height); }
  std::size_t ticks() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct EntityState {
  std::uint32_t id{0};
  Point2 pos;
  Angle heading;
};

struct WorldState {
  double time{0.0};
  std::size_t tick_index{0};
  std::vector<EntityState> robots;
  std::vector<EntityState> obstacles;
  AnchorArray anchors;
};

/// Motion streams, one per robot followed by one per obstacle.
struct MotionStreams {
  std::vector<RandomStream> robots;
  std::vector<RandomStream> obstacles;

  static MotionStreams from_seed(const WorldConfig& config);
};

/// Uniform start positions and headings drawn from each entity's own motion stream.
WorldState make_initial_world(const WorldConfig& config, MotionStreams& motion);

/// Heading += N(0, turn_sigma); advance speed * tick; on boundary contact reflect the
/// heading and clamp inside. Advances time by one tick.
void step_random_walk(WorldState& state, const WorldConfig& config, MotionStreams& motion);

/// Body segment of an entity: body_length long, centered on it, across its heading.
WallSegment body_segment(const EntityState& entity, const WorldConfig& config);

/// Walls plus every robot/obstacle body except the two link endpoints. Pass
/// `kNoRobot` for an endpoint that is not a robot (an anchor).
inline constexpr std::uint32_t kNoRobot = 0xFFFFFFFFu;
std::vector<WallSegment> link_obstructions(const WorldState& state, const WorldConfig& config,
                                           std::uint32_t endpoint_a, std::uint32_t endpoint_b);

/// RSSI of the robot's AP at N1..N4, timestamped with state.time.
std::array<RssiSample, 4> sense_anchor_rssi(const WorldState& state, std::uint32_t robot_id,
                                            const WorldConfig& config, RandomStream& rng);

/// RSSI of robot `from_id`'s AP as measured by robot `to_id`. Throws DomainError for
/// equal ids or unknown robots.
double sense_peer_rssi(const WorldState& state, std::uint32_t from_id, std::uint32_t to_id,
                       const WorldConfig& config, RandomStream& rng);

struct AddressedMsg {
  SharedPoseMsg msg;
  std::uint32_t recipient_id{0};
};

struct BusDelivery {
  std::size_t tick_index{0};
  std::vector<AddressedMsg> delivered;
  std::size_t dropped_count{0};

  std::size_t offered() const { return delivered.size() + dropped_count; }
};

/// Drops each (message, recipient) pair independently with probability pdr. Pairs are
/// visited, and survivors listed, in (sender_id, recipient_id) order.
BusDelivery broadcast(std::span<const AddressedMsg> offered, double pdr, std::size_t tick_index,
                      RandomStream& rng);

}  // namespace mrsl
