#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "mrsl/geometry.hpp"
#include "mrsl/particle_filter.hpp"
#include "mrsl/radio.hpp"

namespace mrsl {

/// Payload a robot shares with a neighbor: its best pose estimate, that estimate's
/// normalized weight, and the RSSI of the recipient's AP as measured by the sender.
struct SharedPoseMsg {
  std::uint32_t sender_id{0};
  Point2 est_pos;
  double est_weight{0.0};
  double reported_rssi{0.0};
  double timestamp{0.0};

  bool operator==(const SharedPoseMsg&) const = default;
};

struct FusionConfig {
  double rssi_sigma{4.0};           ///< dB
  double neighbor_staleness{0.2};   ///< seconds; older messages are dropped

  void validate() const;
};

/// measured - received.
constexpr double rssi_error(double measured, double received) { return measured - received; }

/// Noiseless, wall-free path-loss RSSI between a local candidate and a neighbor's estimate.
double candidate_rssi(Point2 candidate, Point2 neighbor_est, const RadioParams& radio);

bool is_fresh(const SharedPoseMsg& msg, double now, const FusionConfig& config);

/// Gaussian density of the RSSI discrepancy times the neighbor prior est_weight.
/// Empty when the message is stale.
std::optional<double> neighbor_likelihood(Point2 candidate, const SharedPoseMsg& msg,
                                          const RadioParams& radio, const FusionConfig& config,
                                          double now);

struct FuseResult {
  std::size_t fused{0};      ///< fresh messages that contributed
  bool degenerate{false};    ///< normalization hit an all-zero weight vector
};

/// Multiplies each particle weight by the product of neighbor likelihoods over the
/// fresh messages, then normalizes. Messages are accumulated in sender_id order so any
/// permutation of `msgs` gives bit-identical weights. With no fresh message only the
/// normalization is applied. A degenerate result resets the set to uniform weights.
FuseResult fuse(ParticleSet& set, std::span<const SharedPoseMsg> msgs, const RadioParams& radio,
                const FusionConfig& config, double now);

// Wire format: {"sender_id","x","y","weight","rssi","timestamp"}.
void to_json(nlohmann::json& j, const SharedPoseMsg& msg);
void from_json(const nlohmann::json& j, SharedPoseMsg& msg);
std::string encode_message(const SharedPoseMsg& msg);
SharedPoseMsg decode_message(const std::string& text);

}  // namespace mrsl
