#include "mrsl/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrsl/errors.hpp"
#include "mrsl/kernels.hpp"

namespace mrsl {

void FusionConfig::validate() const {
  if (!(rssi_sigma > 0.0)) throw ConfigError("fusion.rssi_sigma", "must be positive");
  if (!(neighbor_staleness > 0.0)) throw ConfigError("fusion.neighbor_staleness", "must be positive");
}

double candidate_rssi(Point2 candidate, Point2 neighbor_est, const RadioParams& radio) {
  return clamped_expected_rssi(radio, distance(candidate, neighbor_est));
}

bool is_fresh(const SharedPoseMsg& msg, double now, const FusionConfig& config) {
  return now - msg.timestamp <= config.neighbor_staleness;
}

std::optional<double> neighbor_likelihood(Point2 candidate, const SharedPoseMsg& msg,
                                          const RadioParams& radio, const FusionConfig& config,
                                          double now) {
  if (!is_fresh(msg, now, config)) return std::nullopt;
  const double e = rssi_error(candidate_rssi(candidate, msg.est_pos, radio), msg.reported_rssi);
  const double sigma = config.rssi_sigma;
  const double density = std::exp(-e * e / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * kPi));
  return density * msg.est_weight;
}

FuseResult fuse(ParticleSet& set, std::span<const SharedPoseMsg> msgs, const RadioParams& radio,
                const FusionConfig& config, double now) {
  std::vector<SharedPoseMsg> fresh;
  for (const auto& msg : msgs) {
    if (is_fresh(msg, now, config)) fresh.push_back(msg);
  }
  std::stable_sort(fresh.begin(), fresh.end(), [](const SharedPoseMsg& a, const SharedPoseMsg& b) {
    if (a.sender_id != b.sender_id) return a.sender_id < b.sender_id;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.reported_rssi != b.reported_rssi) return a.reported_rssi < b.reported_rssi;
    if (a.est_weight != b.est_weight) return a.est_weight < b.est_weight;
    if (a.est_pos.x != b.est_pos.x) return a.est_pos.x < b.est_pos.x;
    return a.est_pos.y < b.est_pos.y;
  });

  FuseResult result;
  result.fused = fresh.size();
  if (!fresh.empty()) {
    std::vector<double> loglik(set.size());
    kernels::neighbor_log_likelihood(kernels::Backend::kOpenMP, set.particles, fresh, radio,
                                     config.rssi_sigma, loglik);
    kernels::apply_log_likelihood(set, loglik);
  }
  if (normalize(set) == NormalizeStatus::kDegenerate) {
    reset_uniform_weights(set);
    result.degenerate = true;
  }
  return result;
}

void to_json(nlohmann::json& j, const SharedPoseMsg& msg) {
  j = nlohmann::json{{"sender_id", msg.sender_id}, {"x", msg.est_pos.x},
                     {"y", msg.est_pos.y},         {"weight", msg.est_weight},
                     {"rssi", msg.reported_rssi},  {"timestamp", msg.timestamp}};
}

void from_json(const nlohmann::json& j, SharedPoseMsg& msg) {
  static constexpr const char* kKeys[] = {"sender_id", "x", "y", "weight", "rssi", "timestamp"};
  if (!j.is_object() || j.size() != std::size(kKeys)) {
    throw DomainError("SharedPoseMsg must be an object with exactly six keys");
  }
  for (const char* key : kKeys) {
    if (!j.contains(key)) throw DomainError(std::string("SharedPoseMsg missing key ") + key);
  }
  msg.sender_id = j.at("sender_id").get<std::uint32_t>();
  msg.est_pos = {j.at("x").get<double>(), j.at("y").get<double>()};
  msg.est_weight = j.at("weight").get<double>();
  msg.reported_rssi = j.at("rssi").get<double>();
  msg.timestamp = j.at("timestamp").get<double>();
  if (!(msg.est_weight >= 0.0 && msg.est_weight <= 1.0)) {
    throw DomainError("SharedPoseMsg weight must lie in [0, 1]");
  }
}

std::string encode_message(const SharedPoseMsg& msg) { return nlohmann::json(msg).dump(); }

SharedPoseMsg decode_message(const std::string& text) {
  return nlohmann::json::parse(text).get<SharedPoseMsg>();
}

}  // namespace mrsl
