#include "mrsl/world.hpp"

#include <algorithm>
#include <cmath>

#include "mrsl/errors.hpp"

namespace mrsl {

std::size_t WorldConfig::ticks() const {
  return static_cast<std::size_t>(std::llround(duration / tick));
}

void WorldConfig::validate() const {
  if (!(width > 0.0)) throw ConfigError("world.width", "must be positive");
  if (!(height > 0.0)) throw ConfigError("world.height", "must be positive");
  if (n_robots < 1) throw ConfigError("world.n_robots", "must be at least 1");
  if (!(pdr >= 0.0 && pdr <= 1.0)) throw ConfigError("world.pdr", "must lie in [0, 1]");
  if (!(tick > 0.0)) throw ConfigError("world.tick", "must be positive");
  if (!(duration >= tick)) throw ConfigError("world.duration", "must cover at least one tick");
  if (!(speed >= 0.0)) throw ConfigError("world.speed", "must be non-negative");
  if (!(turn_sigma >= 0.0)) throw ConfigError("world.turn_sigma", "must be non-negative");
  if (!(body_length >= 0.0)) throw ConfigError("world.body_length", "must be non-negative");
  if (!(body_attenuation_db >= 0.0)) throw ConfigError("world.body_attenuation_db", "must be non-negative");
  if (!(odometry_noise >= 0.0)) throw ConfigError("world.odometry_noise", "must be non-negative");
  if (!(comm_range >= 0.0)) throw ConfigError("world.comm_range", "must be non-negative");
  for (std::size_t i = 0; i < walls.size(); ++i) {
    try {
      walls[i].validate();
    } catch (const DomainError& e) {
      throw ConfigError("world.walls[" + std::to_string(i) + "]", e.what());
    }
  }
  radio.validate();
}

MotionStreams MotionStreams::from_seed(const WorldConfig& config) {
  MotionStreams m;
  m.robots.reserve(config.n_robots);
  for (std::size_t i = 0; i < config.n_robots; ++i) {
    m.robots.emplace_back(config.master_seed, Subsystem::kRobotMotion, i);
  }
  m.obstacles.reserve(config.n_obstacle_robots);
  for (std::size_t i = 0; i < config.n_obstacle_robots; ++i) {
    m.obstacles.emplace_back(config.master_seed, Subsystem::kObstacleMotion, i);
  }
  return m;
}

namespace {

EntityState spawn(std::uint32_t id, const Bounds& ws, RandomStream& rng) {
  EntityState e;
  e.id = id;
  e.pos.x = rng.uniform(ws.min_x, ws.max_x);
  e.pos.y = rng.uniform(ws.min_y, ws.max_y);
  e.heading = Angle::from_radians(rng.uniform(-kPi, kPi));
  return e;
}

void advance(EntityState& e, const WorldConfig& config, const Bounds& ws, RandomStream& rng) {
  double heading = e.heading.radians();
  if (config.turn_sigma > 0.0) heading += rng.normal(0.0, config.turn_sigma);
  const double step = config.speed * config.tick;
  Point2 next{e.pos.x + step * std::cos(heading), e.pos.y + step * std::sin(heading)};

  if (next.x < ws.min_x || next.x > ws.max_x) heading = kPi - heading;
  if (next.y < ws.min_y || next.y > ws.max_y) heading = -heading;
  e.pos = ws.clamp(next);
  e.heading = Angle::from_radians(heading);
}

const EntityState& robot_at(const WorldState& state, std::uint32_t id) {
  if (id >= state.robots.size()) throw DomainError("unknown robot id");
  return state.robots[id];
}

}  // namespace

WorldState make_initial_world(const WorldConfig& config, MotionStreams& motion) {
  const Bounds ws = config.workspace();
  WorldState state;
  state.anchors = AnchorArray::corners(ws);
  for (std::size_t i = 0; i < config.n_robots; ++i) {
    state.robots.push_back(spawn(static_cast<std::uint32_t>(i), ws, motion.robots[i]));
  }
  for (std::size_t i = 0; i < config.n_obstacle_robots; ++i) {
    state.obstacles.push_back(spawn(static_cast<std::uint32_t>(i), ws, motion.obstacles[i]));
  }
  return state;
}

void step_random_walk(WorldState& state, const WorldConfig& config, MotionStreams& motion) {
  const Bounds ws = config.workspace();
  for (std::size_t i = 0; i < state.robots.size(); ++i) advance(state.robots[i], config, ws, motion.robots[i]);
  for (std::size_t i = 0; i < state.obstacles.size(); ++i) {
    advance(state.obstacles[i], config, ws, motion.obstacles[i]);
  }
  ++state.tick_index;
  state.time = static_cast<double>(state.tick_index) * config.tick;
}

WallSegment body_segment(const EntityState& entity, const WorldConfig& config) {
  const Point2 across{-std::sin(entity.heading.radians()), std::cos(entity.heading.radians())};
  const Point2 half = across * (0.5 * config.body_length);
  return {entity.pos - half, entity.pos + half, config.body_attenuation_db};
}

std::vector<WallSegment> link_obstructions(const WorldState& state, const WorldConfig& config,
                                           std::uint32_t endpoint_a, std::uint32_t endpoint_b) {
  std::vector<WallSegment> out(config.walls);
  if (config.body_length <= 0.0 || config.body_attenuation_db <= 0.0) return out;
  for (const auto& r : state.robots) {
    if (r.id != endpoint_a && r.id != endpoint_b) out.push_back(body_segment(r, config));
  }
  for (const auto& o : state.obstacles) out.push_back(body_segment(o, config));
  return out;
}

std::array<RssiSample, 4> sense_anchor_rssi(const WorldState& state, std::uint32_t robot_id,
                                            const WorldConfig& config, RandomStream& rng) {
  const EntityState& robot = robot_at(state, robot_id);
  const auto obstructions = link_obstructions(state, config, robot_id, kNoRobot);
  std::array<RssiSample, 4> samples;
  for (std::uint32_t a = 0; a < 4; ++a) {
    const Point2 anchor = state.anchors.nodes[a];
    // A robot parked exactly on an anchor is evaluated at the clamp distance.
    const Point2 rx = robot.pos == anchor ? anchor + Point2{kMinLinkDistance, 0.0} : anchor;
    samples[a] = {robot_id, a, measure_rssi(config.radio, robot.pos, rx, obstructions, rng), state.time};
  }
  return samples;
}

double sense_peer_rssi(const WorldState& state, std::uint32_t from_id, std::uint32_t to_id,
                       const WorldConfig& config, RandomStream& rng) {
  if (from_id == to_id) throw DomainError("peer RSSI between a robot and itself");
  const EntityState& tx = robot_at(state, from_id);
  const EntityState& rx = robot_at(state, to_id);
  const auto obstructions = link_obstructions(state, config, from_id, to_id);
  const Point2 rx_pos = tx.pos == rx.pos ? rx.pos + Point2{kMinLinkDistance, 0.0} : rx.pos;
  return measure_rssi(config.radio, tx.pos, rx_pos, obstructions, rng);
}

BusDelivery broadcast(std::span<const AddressedMsg> offered, double pdr, std::size_t tick_index,
                      RandomStream& rng) {
  std::vector<AddressedMsg> ordered(offered.begin(), offered.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const AddressedMsg& a, const AddressedMsg& b) {
    if (a.msg.sender_id != b.msg.sender_id) return a.msg.sender_id < b.msg.sender_id;
    return a.recipient_id < b.recipient_id;
  });
  BusDelivery delivery;
  delivery.tick_index = tick_index;
  for (auto& m : ordered) {
    if (rng.bernoulli(pdr)) {
      ++delivery.dropped_count;
    } else {
      delivery.delivered.push_back(std::move(m));
    }
  }
  return delivery;
}

}  // namespace mrsl
