#pragma once

#include "objnav/rng.hpp"
#include "objnav/scene.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

struct GenerationError : std::runtime_error {
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

inline const std::vector<std::string>& room_type_names() {
  static const std::vector<std::string> names = {"bedroom", "livingroom", "bathroom", "kitchen",
                                                 "hall"};
  return names;
}

struct GenParams {
  int width_min = 200;
  int width_max = 260;
  int height_min = 160;
  int height_max = 200;
  int min_rooms = 5;
  int max_rooms = 8;
  int door_width = 9;
  double cell_size = 0.05;
  int instances_min = 1;
  int instances_max = 2;
  bool mirrors = true;
  double mirror_prob = 0.35;
  double tv_reflective_prob = 0.5;
  // placement[category][room type]: weight for placing that category in
  // that room type. Rows must have at least one positive entry.
  std::vector<std::vector<double>> placement;
};

GenParams default_gen_params(const CategorySet& categories);

/// Deterministic procedural home: BSP rooms behind 1-cell walls with
// punched doorways, typed rooms, affinity-placed furniture, optional
// mirrors and beyond-range TV surfaces. Free space is one connected
// component. Throws GenerationError after bounded retries.
Scene generate_home(std::uint64_t seed, const GenParams& params, const CategorySet& categories);

}  // namespace objnav
