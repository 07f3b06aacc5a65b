#include "mrsl/config.hpp"

#include <set>
#include <sstream>
#include <type_traits>
#include <vector>

#include "mrsl/errors.hpp"

namespace mrsl {

using nlohmann::json;

namespace {

// Reads optional fields of one JSON object and rejects keys nobody asked for.
class SectionReader {
 public:
  SectionReader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    if constexpr (std::is_integral_v<T>) {
      if (!doc_.at(key).is_number_unsigned()) {
        throw ConfigError(path_ + "." + key, "expected a non-negative integer");
      }
    }
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key, std::string("wrong type (") + e.what() + ")");
    }
  }

  template <typename F>
  void read_with(const char* key, F&& parse) {
    seen_.insert(key);
    if (doc_.contains(key)) parse(doc_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) throw ConfigError(path_ + "." + key, "unknown key");
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

json wall_to_json(const WallSegment& w) {
  return {{"a", {w.a.x, w.a.y}}, {"b", {w.b.x, w.b.y}}, {"attenuation_db", w.attenuation_db}};
}

Point2 point_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(path, "expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<WallSegment> walls_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of walls");
  std::vector<WallSegment> walls;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    SectionReader r(j[i], p);
    WallSegment w;
    r.read_with("a", [&](const json& v, const std::string& kp) { w.a = point_from_json(v, kp); });
    r.read_with("b", [&](const json& v, const std::string& kp) { w.b = point_from_json(v, kp); });
    r.read("attenuation_db", w.attenuation_db);
    r.finish();
    walls.push_back(w);
  }
  return walls;
}

InitMode parse_init_mode(const json& j, const std::string& path) {
  if (j == "uniform") return InitMode::kUniformWorkspace;
  if (j == "gaussian") return InitMode::kGaussianAroundPrior;
  throw ConfigError(path, "expected \"uniform\" or \"gaussian\"");
}

}  // namespace

std::string to_string(InitMode mode) {
  return mode == InitMode::kUniformWorkspace ? "uniform" : "gaussian";
}

json to_json(const SimulationConfig& c) {
  json walls = json::array();
  for (const auto& w : c.world.walls) walls.push_back(wall_to_json(w));
  const auto& w = c.world;
  return {
      {"world",
       {{"width", w.width},
        {"height", w.height},
        {"n_robots", w.n_robots},
        {"n_obstacle_robots", w.n_obstacle_robots},
        {"walls", walls},
        {"pdr", w.pdr},
        {"tick", w.tick},
        {"duration", w.duration},
        {"speed", w.speed},
        {"turn_sigma", w.turn_sigma},
        {"body_length", w.body_length},
        {"body_attenuation_db", w.body_attenuation_db},
        {"odometry_noise", w.odometry_noise},
        {"comm_range", w.comm_range}}},
      {"radio",
       {{"a_ref", w.radio.a_ref_dbm},
        {"path_exp", w.radio.path_exp},
        {"shadow_sigma", w.radio.shadow_sigma_dbm}}},
      {"filter",
       {{"particle_count", c.filter.particle_count},
        {"history_depth", c.filter.history_depth},
        {"doa_sigma", c.filter.doa_sigma},
        {"init_mode", to_string(c.filter.init_mode)},
        {"init_sigma", c.filter.init_sigma},
        {"process_noise", c.filter.process_noise},
        {"resample_threshold", c.filter.resample_threshold}}},
      {"fusion",
       {{"rssi_sigma", c.fusion.rssi_sigma}, {"neighbor_staleness", c.fusion.neighbor_staleness}}},
      {"doa",
       {{"time_window", c.doa.time_window},
        {"smoothing_window", c.doa.smoothing_window},
        {"decay", c.doa.decay}}},
  };
}

SimulationConfig merge_simulation_config(const SimulationConfig& base, const json& doc) {
  SimulationConfig c = base;
  SectionReader top(doc, "config");
  top.read_with("world", [&](const json& j, const std::string&) {
    SectionReader r(j, "world");
    r.read("width", c.world.width);
    r.read("height", c.world.height);
    r.read("n_robots", c.world.n_robots);
    r.read("n_obstacle_robots", c.world.n_obstacle_robots);
    r.read_with("walls", [&](const json& v, const std::string& p) { c.world.walls = walls_from_json(v, p); });
    r.read("pdr", c.world.pdr);
    r.read("tick", c.world.tick);
    r.read("duration", c.world.duration);
    r.read("speed", c.world.speed);
    r.read("turn_sigma", c.world.turn_sigma);
    r.read("body_length", c.world.body_length);
    r.read("body_attenuation_db", c.world.body_attenuation_db);
    r.read("odometry_noise", c.world.odometry_noise);
    r.read("comm_range", c.world.comm_range);
    r.finish();
  });
  top.read_with("radio", [&](const json& j, const std::string&) {
    SectionReader r(j, "radio");
    r.read("a_ref", c.world.radio.a_ref_dbm);
    r.read("path_exp", c.world.radio.path_exp);
    r.read("shadow_sigma", c.world.radio.shadow_sigma_dbm);
    r.finish();
  });
  top.read_with("filter", [&](const json& j, const std::string&) {
    SectionReader r(j, "filter");
    r.read("particle_count", c.filter.particle_count);
    r.read("history_depth", c.filter.history_depth);
    r.read("doa_sigma", c.filter.doa_sigma);
    r.read_with("init_mode", [&](const json& v, const std::string& p) { c.filter.init_mode = parse_init_mode(v, p); });
    r.read("init_sigma", c.filter.init_sigma);
    r.read("process_noise", c.filter.process_noise);
    r.read("resample_threshold", c.filter.resample_threshold);
    r.finish();
  });
  top.read_with("fusion", [&](const json& j, const std::string&) {
    SectionReader r(j, "fusion");
    r.read("rssi_sigma", c.fusion.rssi_sigma);
    r.read("neighbor_staleness", c.fusion.neighbor_staleness);
    r.finish();
  });
  top.read_with("doa", [&](const json& j, const std::string&) {
    SectionReader r(j, "doa");
    r.read("time_window", c.doa.time_window);
    r.read("smoothing_window", c.doa.smoothing_window);
    r.read("decay", c.doa.decay);
    r.finish();
  });
  return c;
}

std::string apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError(key, "unknown key");
    node = &(*node)[part];
  }

  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  if (node->is_array() && value.is_string()) {
    json list = json::array();
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
      json v = json::parse(item, nullptr, false);
      if (v.is_discarded()) throw ConfigError(key, "cannot parse list element '" + item + "'");
      list.push_back(v);
    }
    value = list;
  } else if (node->is_array() && value.is_number()) {
    value = json::array({value});
  }

  const bool type_ok = (node->is_number() && value.is_number()) ||
                       (node->is_string() && value.is_string()) ||
                       (node->is_boolean() && value.is_boolean()) ||
                       (node->is_array() && value.is_array()) || node->is_null();
  if (!type_ok) throw ConfigError(key, "value '" + text + "' has the wrong type");
  *node = value;
  return key;
}

}  // namespace mrsl
