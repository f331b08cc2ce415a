#pragma once

#include "objnav/bench.hpp"

#include <cstdint>
#include <string>

namespace objnav {

// One human-editable JSON config drives gen/run/attribute; CLI flags
// override fields after load.
struct RunConfig {
  std::uint64_t seed = 7;
  std::string policy = "prior";  // frontier | prior | random
  std::string noise = "none";    // none | simlike | reallike
  int max_steps = 0;             // 0 = profile default (500; reallike 200)
  int max_collisions = 20;
  double success_radius = 1.0;
  int map_m = 481;
  bool denoise = true;
  int obstacle_confirm = 2;
  int opening_radius = 1;
  int dilation_radius = 2;
  double stop_margin = 0.1;
  CameraModel camera;
  int parallelism = 1;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

// 0 in cfg.max_steps defers to the noise profile's budget.
int effective_max_steps(const RunConfig& cfg);

NoiseProfile noise_by_name(const std::string& name, int n_categories);

BatchConfig to_batch_config(const RunConfig& cfg, const CategorySet& categories);

std::uint64_t fnv1a64(const std::string& text);

// Digest of the canonicalized config, embedded in every output file.
std::string config_hash(const RunConfig& cfg);

}  // namespace objnav
