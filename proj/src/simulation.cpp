#include "mrsl/simulation.hpp"

#include <cstdint>
#include <cstdio>
#include <ostream>

#include "mrsl/errors.hpp"
#include "mrsl/kernels.hpp"

namespace mrsl {

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kMrsl ? "mrsl" : "arl";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "mrsl") return Algorithm::kMrsl;
  if (text == "arl") return Algorithm::kArl;
  throw ConfigError("algorithm", "unknown algorithm '" + text + "' (expected mrsl or arl)");
}

void SimulationConfig::validate() const {
  world.validate();
  filter.validate();
  fusion.validate();
  doa.validate();
}

void write_trace_header(std::ostream& os) {
  os << "tick,robot_id,true_x,true_y,est_x,est_y,err_m,n_msgs_fused,degeneracy_flag\n";
}

void write_trace_row(std::ostream& os, const TraceRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%zu,%u,%.9g,%.9g,%.9g,%.9g,%.9g,%zu,%d\n", row.tick, row.robot_id,
                row.truth.x, row.truth.y, row.estimate.x, row.estimate.y, row.err_m, row.n_msgs_fused,
                row.degenerate ? 1 : 0);
  os << buf;
}

Simulation::Simulation(SimulationConfig config)
    : config_(std::move(config)),
      workspace_(config_.world.workspace()),
      motion_(),
      bus_rng_(config_.world.master_seed, Subsystem::kBus, 0) {
  config_.validate();
  motion_ = MotionStreams::from_seed(config_.world);
  world_ = make_initial_world(config_.world, motion_);

  const std::uint64_t seed = config_.world.master_seed;
  filters_.reserve(config_.world.n_robots);
  for (const auto& robot : world_.robots) {
    RobotFilter f{robot.id,
                  {},
                  DoaTracker(config_.doa),
                  DoaObservationLog(config_.filter.history_depth),
                  {},
                  {},
                  RandomStream(seed, Subsystem::kFilter, robot.id),
                  RandomStream(seed, Subsystem::kAnchorShadowing, robot.id),
                  RandomStream(seed, Subsystem::kPeerShadowing, robot.id),
                  RandomStream(seed, Subsystem::kOdometry, robot.id)};
    // The start pose is known only up to init_sigma: the prior itself is a noisy draw.
    std::optional<Point2> prior;
    if (config_.filter.init_mode == InitMode::kGaussianAroundPrior) {
      const double s = config_.filter.init_sigma;
      prior = s > 0.0 ? workspace_.clamp({f.filter_rng.normal(robot.pos.x, s),
                                          f.filter_rng.normal(robot.pos.y, s)})
                      : robot.pos;
    }
    f.particles = init_particles(config_.filter, workspace_, prior, f.filter_rng);
    f.estimate = best_estimate(f.particles);
    filters_.push_back(std::move(f));
  }
}

void Simulation::update_local(RobotFilter& f, Point2 odom_delta, bool& degenerate) {
  const auto samples = sense_anchor_rssi(world_, f.robot_id, config_.world, f.anchor_rng);
  f.doa.add_samples(samples);
  const auto doa = f.doa.update(world_.anchors, world_.time);

  f.particles = propagate(std::move(f.particles), odom_delta, config_.filter, workspace_, f.filter_rng);
  if (doa.smoothed) f.log.push({f.odom, *doa.smoothed});

  if (!f.log.empty()) {
    std::vector<double> loglik(f.particles.size());
    kernels::doa_log_likelihood(kernels::Backend::kOpenMP, f.particles.particles, f.log,
                                world_.anchors, config_.world.radio, config_.filter.doa_sigma, loglik);
    kernels::apply_log_likelihood(f.particles, loglik);
  }
  if (normalize(f.particles) == NormalizeStatus::kDegenerate) {
    reset_uniform_weights(f.particles);
    degenerate = true;
  }
  f.estimate = best_estimate(f.particles);
}

std::vector<AddressedMsg> Simulation::outgoing_messages() {
  const std::size_t n = filters_.size();
  std::vector<std::vector<AddressedMsg>> per_sender(n);
  const double range = config_.world.comm_range;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t js = 0; js < static_cast<std::int64_t>(n); ++js) {
    auto& sender = filters_[js];
    const auto j = sender.robot_id;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (i == j) continue;
      if (range > 0.0 && distance(world_.robots[i].pos, world_.robots[j].pos) > range) continue;
      SharedPoseMsg msg;
      msg.sender_id = j;
      msg.est_pos = sender.estimate.pos;
      msg.est_weight = sender.estimate.weight;
      msg.reported_rssi = sense_peer_rssi(world_, i, j, config_.world, sender.peer_rng);
      msg.timestamp = world_.time;
      per_sender[js].push_back({msg, i});
    }
  }

  std::vector<AddressedMsg> offered;
  for (auto& batch : per_sender) offered.insert(offered.end(), batch.begin(), batch.end());
  return offered;
}

std::vector<TraceRow> Simulation::run_tick() {
  const std::size_t n = filters_.size();
  std::vector<Point2> before(n);
  for (std::size_t i = 0; i < n; ++i) before[i] = world_.robots[i].pos;

  step_random_walk(world_, config_.world, motion_);

  std::vector<TraceRow> rows(n);
  std::vector<char> degenerate(n, 0);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
    auto& f = filters_[k];
    Point2 delta = world_.robots[k].pos - before[k];
    if (config_.world.odometry_noise > 0.0) {
      delta.x += f.odom_rng.normal(0.0, config_.world.odometry_noise);
      delta.y += f.odom_rng.normal(0.0, config_.world.odometry_noise);
    }
    f.odom += delta;
    bool flag = false;
    update_local(f, delta, flag);
    degenerate[k] = flag ? 1 : 0;
  }

  last_delivery_ = BusDelivery{world_.tick_index, {}, 0};
  if (config_.algorithm == Algorithm::kMrsl && n > 1) {
    const auto offered = outgoing_messages();
    last_delivery_ = broadcast(offered, config_.world.pdr, world_.tick_index, bus_rng_);

    std::vector<std::vector<SharedPoseMsg>> inbox(n);
    for (const auto& d : last_delivery_.delivered) inbox[d.recipient_id].push_back(d.msg);

    // Dropped messages never trigger fusion: a robot with an empty inbox is left exactly
    // as its local update produced it.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
      if (inbox[k].empty()) continue;
      auto& f = filters_[k];
      const auto result = fuse(f.particles, inbox[k], config_.world.radio, config_.fusion, world_.time);
      rows[k].n_msgs_fused = result.fused;
      if (result.degenerate) degenerate[k] = 1;
      f.estimate = best_estimate(f.particles);
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    auto& f = filters_[k];
    f.particles = resample(std::move(f.particles), config_.filter, f.filter_rng);
    rows[k].tick = world_.tick_index;
    rows[k].robot_id = f.robot_id;
    rows[k].truth = world_.robots[k].pos;
    rows[k].estimate = f.estimate.pos;
    rows[k].err_m = distance(rows[k].truth, rows[k].estimate);
    rows[k].degenerate = degenerate[k] != 0;
  }
  return rows;
}

}  // namespace mrsl
