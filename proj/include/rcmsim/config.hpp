#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcmsim/simulation.hpp"

namespace rcmsim {
namespace config {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into a line number for the diagnostic
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ConfigError(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

namespace detail {

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ConfigError("field '" + path + "': expected a number");
  }
  return j.get<double>();
}

inline Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    throw ConfigError("field '" + path + "': expected an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// diagonal gains may be written as one scalar or a 3-array
inline Vec3 as_diag3(const json& j, const std::string& path) {
  if (j.is_number()) return Vec3::Constant(j.get<double>());
  return as_vec3(j, path);
}

inline void reject_unknown(const json& j, const std::string& section,
                           std::initializer_list<const char*> known) {
  if (!j.is_object()) {
    throw ConfigError("section '" + section + "': expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || (it.key() == k);
    if (!ok) {
      throw ConfigError("section '" + section + "': unknown field '" +
                        it.key() + "'");
    }
  }
}

inline Mat3 rotation_from_axis_angle(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, rotvec / angle).toRotationMatrix();
}

inline ManipulatorModel parse_robot(const json& j) {
  reject_unknown(j, "robot",
                 {"builtin", "instrument_length", "name", "joints",
                  "ee_offset"});
  if (j.contains("builtin")) {
    const std::string name = j["builtin"].get<std::string>();
    const double l = j.contains("instrument_length")
                         ? as_number(j["instrument_length"],
                                     "robot.instrument_length")
                         : 0.4;
    if (name == "generic-7dof") return generic_7dof(l);
    if (name == "iiwa-like") return iiwa_like(l);
    throw ConfigError("robot.builtin: unknown model '" + name + "'");
  }
  if (!j.contains("joints") || !j["joints"].is_array() ||
      j["joints"].size() != kNumJoints) {
    throw ConfigError("robot.joints: expected an array of exactly 7 joints");
  }
  std::array<Joint, kNumJoints> joints;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    const json& jj = j["joints"][i];
    const std::string path = "robot.joints[" + std::to_string(i) + "]";
    reject_unknown(jj, path,
                   {"axis", "translation", "rotation_axis_angle", "limits"});
    Joint joint;
    joint.axis = as_vec3(jj.at("axis"), path + ".axis");
    const double axis_norm = joint.axis.norm();
    if (axis_norm < 1e-12) {
      throw ConfigError(path + ".axis: zero vector");
    }
    joint.axis /= axis_norm;
    joint.link.position = jj.contains("translation")
                              ? as_vec3(jj["translation"], path + ".translation")
                              : Vec3::Zero();
    joint.link.orientation =
        jj.contains("rotation_axis_angle")
            ? rotation_from_axis_angle(as_vec3(jj["rotation_axis_angle"],
                                               path + ".rotation_axis_angle"))
            : Mat3::Identity();
    if (jj.contains("limits")) {
      const json& lim = jj["limits"];
      if (!lim.is_array() || lim.size() != 2) {
        throw ConfigError(path + ".limits: expected [min, max]");
      }
      joint.min_position = lim[0].get<double>();
      joint.max_position = lim[1].get<double>();
    }
    joints[i] = joint;
  }
  Pose ee_offset;
  if (j.contains("ee_offset")) {
    const json& je = j["ee_offset"];
    reject_unknown(je, "robot.ee_offset",
                   {"translation", "rotation_axis_angle"});
    if (je.contains("translation")) {
      ee_offset.position = as_vec3(je["translation"],
                                   "robot.ee_offset.translation");
    }
    if (je.contains("rotation_axis_angle")) {
      ee_offset.orientation = rotation_from_axis_angle(
          as_vec3(je["rotation_axis_angle"],
                  "robot.ee_offset.rotation_axis_angle"));
    }
  }
  const double l = as_number(j.at("instrument_length"),
                             "robot.instrument_length");
  return ManipulatorModel(j.value("name", std::string("custom")), joints,
                          ee_offset, l);
}

inline TrocarTrajectory parse_trocar(const json& j, bool& auto_center,
                                     Vec3& auto_offset) {
  reject_unknown(j, "trocar",
                 {"kind", "center", "offset", "direction", "amplitude",
                  "period", "samples"});
  const std::string kind = j.value("kind", std::string("static"));

  auto_center = true;
  auto_offset = Vec3::Zero();
  Vec3 center = Vec3::Zero();
  if (j.contains("center")) {
    if (j["center"].is_string()) {
      if (j["center"].get<std::string>() != "auto") {
        throw ConfigError("trocar.center: expected [x,y,z] or \"auto\"");
      }
    } else {
      center = as_vec3(j["center"], "trocar.center");
      auto_center = false;
    }
  }
  if (j.contains("offset")) {
    auto_offset = as_vec3(j["offset"], "trocar.offset");
    if (!auto_center) {
      throw ConfigError("trocar.offset is only meaningful with center=auto");
    }
  }

  if (kind == "static") {
    return TrocarTrajectory::static_point(center);
  }
  if (kind == "linear_oscillation") {
    return TrocarTrajectory::linear_oscillation(
        center, as_vec3(j.at("direction"), "trocar.direction"),
        as_number(j.at("amplitude"), "trocar.amplitude"),
        as_number(j.at("period"), "trocar.period"));
  }
  if (kind == "custom_samples") {
    if (!j.contains("samples") || !j["samples"].is_array()) {
      throw ConfigError("trocar.samples: expected an array");
    }
    std::vector<std::pair<double, Vec3>> samples;
    for (std::size_t i = 0; i < j["samples"].size(); ++i) {
      const json& s = j["samples"][i];
      const std::string path = "trocar.samples[" + std::to_string(i) + "]";
      samples.emplace_back(as_number(s.at("t"), path + ".t"),
                           as_vec3(s.at("position"), path + ".position"));
    }
    auto_center = false;
    return TrocarTrajectory::from_samples(std::move(samples));
  }
  throw ConfigError("trocar.kind: unknown kind '" + kind + "'");
}

inline DesiredTrajectory parse_desired(const json& j) {
  reject_unknown(j, "desired_trajectory",
                 {"kind", "point", "start", "end", "travel_time", "radius",
                  "frequency", "normal", "center", "waypoints"});
  const std::string kind = j.value("kind", std::string("hold"));
  if (kind == "hold") {
    std::optional<Vec3> point;
    if (j.contains("point")) {
      point = as_vec3(j["point"], "desired_trajectory.point");
    }
    return DesiredTrajectory::hold(point);
  }
  if (kind == "line") {
    std::optional<Vec3> start;
    if (j.contains("start")) {
      start = as_vec3(j["start"], "desired_trajectory.start");
    }
    return DesiredTrajectory::line(
        start, as_vec3(j.at("end"), "desired_trajectory.end"),
        as_number(j.at("travel_time"), "desired_trajectory.travel_time"));
  }
  if (kind == "circle") {
    std::optional<Vec3> center;
    if (j.contains("center")) {
      center = as_vec3(j["center"], "desired_trajectory.center");
    }
    const Vec3 normal = j.contains("normal")
                            ? as_vec3(j["normal"], "desired_trajectory.normal")
                            : Vec3(Vec3::UnitZ());
    return DesiredTrajectory::circle(
        as_number(j.at("radius"), "desired_trajectory.radius"),
        as_number(j.at("frequency"), "desired_trajectory.frequency"), normal,
        center);
  }
  if (kind == "waypoints") {
    if (!j.contains("waypoints") || !j["waypoints"].is_array()) {
      throw ConfigError("desired_trajectory.waypoints: expected an array");
    }
    std::vector<std::pair<double, Vec3>> pts;
    for (std::size_t i = 0; i < j["waypoints"].size(); ++i) {
      const json& s = j["waypoints"][i];
      const std::string path =
          "desired_trajectory.waypoints[" + std::to_string(i) + "]";
      pts.emplace_back(as_number(s.at("t"), path + ".t"),
                       as_vec3(s.at("position"), path + ".position"));
    }
    return DesiredTrajectory::waypoints(std::move(pts));
  }
  throw ConfigError("desired_trajectory.kind: unknown kind '" + kind + "'");
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const json& doc,
                                     const std::string& fallback_name) {
  using namespace detail;
  reject_unknown(doc, "<top level>",
                 {"name", "robot", "initial_q", "initial_eta", "gains",
                  "environment", "estimator", "trocar", "loads",
                  "desired_trajectory", "f_rcm_desired", "dt", "duration",
                  "seed", "capture_distance"});

  ScenarioConfig cfg;
  cfg.name = doc.value("name", fallback_name);

  if (doc.contains("robot")) cfg.robot = parse_robot(doc["robot"]);

  if (doc.contains("initial_q")) {
    const json& jq = doc["initial_q"];
    if (!jq.is_array() || jq.size() != kNumJoints) {
      throw ConfigError("initial_q: expected an array of 7 numbers");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      cfg.initial_q[i] = as_number(jq[static_cast<std::size_t>(i)],
                                   "initial_q[" + std::to_string(i) + "]");
    }
  }
  if (doc.contains("initial_eta")) {
    cfg.initial_eta = as_number(doc["initial_eta"], "initial_eta");
  }

  if (doc.contains("gains")) {
    const json& g = doc["gains"];
    reject_unknown(g, "gains",
                   {"k_ins", "k_adm", "eta0", "lambda_dls", "w_gain",
                    "qdot_limit"});
    if (g.contains("k_ins")) cfg.gains.k_ins = as_diag3(g["k_ins"], "gains.k_ins");
    if (g.contains("k_adm")) cfg.gains.k_adm = as_number(g["k_adm"], "gains.k_adm");
    if (g.contains("eta0")) cfg.gains.eta0 = as_number(g["eta0"], "gains.eta0");
    if (g.contains("lambda_dls")) {
      cfg.gains.lambda_dls = as_number(g["lambda_dls"], "gains.lambda_dls");
    }
    if (g.contains("w_gain")) cfg.gains.w_gain = as_number(g["w_gain"], "gains.w_gain");
    if (g.contains("qdot_limit")) {
      cfg.gains.qdot_limit = as_number(g["qdot_limit"], "gains.qdot_limit");
    }
  }

  if (doc.contains("environment")) {
    const json& e = doc["environment"];
    reject_unknown(e, "environment", {"k_env", "b_env", "noise"});
    if (e.contains("k_env")) {
      cfg.environment.k_env = as_diag3(e["k_env"], "environment.k_env");
    }
    if (e.contains("b_env")) {
      cfg.environment.b_env = as_diag3(e["b_env"], "environment.b_env");
    }
    if (e.contains("noise")) {
      reject_unknown(e["noise"], "environment.noise",
                     {"force_std", "moment_std"});
      cfg.noise.force_std = e["noise"].value("force_std", 0.0);
      cfg.noise.moment_std = e["noise"].value("moment_std", 0.0);
    }
  }

  if (doc.contains("estimator")) {
    const json& e = doc["estimator"];
    reject_unknown(e, "estimator",
                   {"epsilon_gamma", "epsilon_f", "prior_staleness",
                    "svd_cutoff"});
    if (e.contains("epsilon_gamma")) {
      cfg.estimator.epsilon_gamma =
          as_number(e["epsilon_gamma"], "estimator.epsilon_gamma");
    }
    if (e.contains("epsilon_f")) {
      cfg.estimator.epsilon_f = as_number(e["epsilon_f"], "estimator.epsilon_f");
    }
    if (e.contains("prior_staleness")) {
      cfg.estimator.prior_staleness =
          as_number(e["prior_staleness"], "estimator.prior_staleness");
    }
    if (e.contains("svd_cutoff")) {
      cfg.estimator.svd_cutoff =
          as_number(e["svd_cutoff"], "estimator.svd_cutoff");
    }
  }

  if (doc.contains("trocar")) {
    cfg.trocar = parse_trocar(doc["trocar"], cfg.trocar_auto_center,
                              cfg.trocar_auto_offset);
  }

  if (doc.contains("loads")) {
    const json& l = doc["loads"];
    reject_unknown(l, "loads", {"enabled", "schedule"});
    cfg.loads.enabled = l.value("enabled", true);
    if (l.contains("schedule")) {
      if (!l["schedule"].is_array()) {
        throw ConfigError("loads.schedule: expected an array");
      }
      for (std::size_t i = 0; i < l["schedule"].size(); ++i) {
        const json& s = l["schedule"][i];
        const std::string path = "loads.schedule[" + std::to_string(i) + "]";
        reject_unknown(s, path, {"t_start", "t_end", "force"});
        ExternalLoad::Entry entry;
        entry.t_start = as_number(s.at("t_start"), path + ".t_start");
        entry.t_end = as_number(s.at("t_end"), path + ".t_end");
        entry.force = as_vec3(s.at("force"), path + ".force");
        if (!(entry.t_end > entry.t_start)) {
          throw ConfigError(path + ": t_end must be > t_start");
        }
        cfg.loads.schedule.push_back(entry);
      }
    }
  }

  if (doc.contains("desired_trajectory")) {
    cfg.desired = parse_desired(doc["desired_trajectory"]);
  }

  if (doc.contains("f_rcm_desired")) {
    cfg.f_rcm_desired = as_vec3(doc["f_rcm_desired"], "f_rcm_desired");
  }
  if (doc.contains("dt")) cfg.dt = as_number(doc["dt"], "dt");
  if (doc.contains("duration")) {
    cfg.duration = as_number(doc["duration"], "duration");
  }
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("capture_distance")) {
    cfg.capture_distance =
        as_number(doc["capture_distance"], "capture_distance");
  }
  return cfg;
}

/// Applies one `--set path.to.key=value` override onto the JSON document.
/// The value is parsed as JSON when possible, else taken as a string.
inline void apply_override(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare strings are allowed unquoted
  }

  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = key.find('.', begin);
    const std::string part =
        key.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (part.empty()) {
      throw ConfigError("override '" + assignment + "': empty path segment");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

inline ScenarioConfig load_scenario(
    const std::string& path,
    const std::vector<std::string>& overrides = {}) {
  json doc = load_json_file(path);
  for (const std::string& o : overrides) apply_override(doc, o);

  std::string stem = path;
  const std::size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  const std::size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);

  return parse_scenario(doc, stem);
}

}  // namespace config
}  // namespace rcmsim
