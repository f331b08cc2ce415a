#include "objnav/config.hpp"

#include "objnav/explore.hpp"
#include "objnav/scene_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace objnav {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_keys(const ordered_json& j, const std::set<std::string>& known,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ParseError(where + ": unknown key: " + it.key());
  }
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["policy"] = cfg.policy;
  j["noise"] = cfg.noise;
  j["max_steps"] = cfg.max_steps;
  j["max_collisions"] = cfg.max_collisions;
  j["success_radius"] = cfg.success_radius;
  ordered_json m;
  m["m"] = cfg.map_m;
  m["denoise"] = cfg.denoise;
  m["confirm"] = cfg.obstacle_confirm;
  m["opening_radius"] = cfg.opening_radius;
  j["map"] = m;
  ordered_json p;
  p["dilation_radius"] = cfg.dilation_radius;
  p["stop_margin"] = cfg.stop_margin;
  j["planner"] = p;
  ordered_json c;
  c["hfov_deg"] = cfg.camera.hfov_deg;
  c["n_rays"] = cfg.camera.n_rays;
  c["max_range"] = cfg.camera.max_range;
  j["camera"] = c;
  j["parallelism"] = cfg.parallelism;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be an object");
  check_keys(j, {"seed", "policy", "noise", "max_steps", "max_collisions", "success_radius",
                 "map", "planner", "camera", "parallelism"},
             "config");

  RunConfig cfg;
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("policy")) cfg.policy = j["policy"].get<std::string>();
  if (j.contains("noise")) cfg.noise = j["noise"].get<std::string>();
  if (j.contains("max_steps")) cfg.max_steps = j["max_steps"].get<int>();
  if (j.contains("max_collisions")) cfg.max_collisions = j["max_collisions"].get<int>();
  if (j.contains("success_radius")) cfg.success_radius = j["success_radius"].get<double>();
  if (j.contains("map")) {
    const auto& m = j["map"];
    check_keys(m, {"m", "denoise", "confirm", "opening_radius"}, "config.map");
    if (m.contains("m")) cfg.map_m = m["m"].get<int>();
    if (m.contains("denoise")) cfg.denoise = m["denoise"].get<bool>();
    if (m.contains("confirm")) cfg.obstacle_confirm = m["confirm"].get<int>();
    if (m.contains("opening_radius")) cfg.opening_radius = m["opening_radius"].get<int>();
  }
  if (j.contains("planner")) {
    const auto& p = j["planner"];
    check_keys(p, {"dilation_radius", "stop_margin"}, "config.planner");
    if (p.contains("dilation_radius")) cfg.dilation_radius = p["dilation_radius"].get<int>();
    if (p.contains("stop_margin")) cfg.stop_margin = p["stop_margin"].get<double>();
  }
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    check_keys(c, {"hfov_deg", "n_rays", "max_range"}, "config.camera");
    if (c.contains("hfov_deg")) cfg.camera.hfov_deg = c["hfov_deg"].get<double>();
    if (c.contains("n_rays")) cfg.camera.n_rays = c["n_rays"].get<int>();
    if (c.contains("max_range")) cfg.camera.max_range = c["max_range"].get<double>();
  }
  if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<int>();

  if (cfg.policy != "frontier" && cfg.policy != "prior" && cfg.policy != "random")
    throw ParseError("unknown policy: " + cfg.policy);
  if (cfg.noise != "none" && cfg.noise != "simlike" && cfg.noise != "reallike")
    throw ParseError("unknown noise profile: " + cfg.noise);
  if (cfg.parallelism < 1) throw ParseError("parallelism must be >= 1");
  if (cfg.map_m < 3 || cfg.map_m % 2 == 0) throw ParseError("map.m must be odd and >= 3");
  if (cfg.max_steps < 0) throw ParseError("max_steps must be >= 0");
  if (cfg.dilation_radius < 0) throw ParseError("planner.dilation_radius must be >= 0");
  if (cfg.camera.n_rays < 2) throw ParseError("camera.n_rays must be >= 2");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return run_config_from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int effective_max_steps(const RunConfig& cfg) {
  if (cfg.max_steps > 0) return cfg.max_steps;
  return cfg.noise == "reallike" ? 200 : 500;
}

NoiseProfile noise_by_name(const std::string& name, int n_categories) {
  if (name == "none") return zero_noise();
  if (name == "simlike") return simlike_noise(n_categories);
  if (name == "reallike") return reallike_noise(n_categories);
  throw ParseError("unknown noise profile: " + name);
}

BatchConfig to_batch_config(const RunConfig& cfg, const CategorySet& categories) {
  BatchConfig bc;
  bc.pipeline.camera = cfg.camera;
  bc.pipeline.n_categories = categories.size();
  bc.pipeline.policy = cfg.policy;
  bc.pipeline.priors = default_priors(categories);
  bc.pipeline.denoise_enabled = cfg.denoise;
  bc.pipeline.denoise.obstacle_confirm = cfg.obstacle_confirm;
  bc.pipeline.denoise.opening_radius = cfg.opening_radius;
  bc.pipeline.map_m = cfg.map_m;
  bc.pipeline.dilation_radius = cfg.dilation_radius;
  bc.pipeline.stop_margin = cfg.stop_margin;
  bc.noise = noise_by_name(cfg.noise, categories.size());
  bc.max_steps_override = effective_max_steps(cfg);
  return bc;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(run_config_to_json(cfg))));
  return buf;
}

}  // namespace objnav
