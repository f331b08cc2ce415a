#pragma once

#include "objnav/categories.hpp"
#include "objnav/grid.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

struct Pose {
  double x = 0.0;       // meters
  double y = 0.0;       // meters
  double heading = 0.0;  // radians in [0, 2pi)
};

double wrap_heading(double heading);

struct ObjectInstance {
  int instance_id = 0;
  int category = k_no_category;
  std::vector<Cell> cells;  // kept sorted row-major
};

enum class ReflectiveMode { mirror, beyond_range };

// A line segment in world coordinates (meters).
struct Segment {
  double x0 = 0.0, y0 = 0.0;
  double x1 = 0.0, y1 = 0.0;
};

struct ReflectiveSurface {
  std::vector<Cell> cells;  // sorted row-major
  ReflectiveMode mode = ReflectiveMode::beyond_range;
  Segment mirror_axis{};  // meaningful for mirror mode only
};

// Ground-truth home: an immutable 2D semantic occupancy grid. Safe to
// share across concurrently running episodes.
struct Scene {
  std::string id;
  int width = 0;   // columns
  int height = 0;  // rows
  double cell_size = 0.05;
  GridU8 traversable;  // height x width; nonzero = free
  std::vector<ObjectInstance> objects;
  std::vector<ReflectiveSurface> reflective;
};

Cell scene_cell_of(const Scene& scene, double x, double y);
bool pose_valid(const Scene& scene, const Pose& pose);

// Checks every Scene invariant; throws InvariantError naming the first
// violated one. Category indices are validated against the set.
void validate_scene(const Scene& scene, const CategorySet& categories);

// All cells occupied by some object instance (any category).
GridU8 object_mask(const Scene& scene);

// Reflective-surface lookup grid: 0 = none, otherwise index+1 into
// scene.reflective.
Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> reflective_index(
    const Scene& scene);

struct NearestGoal {
  const ObjectInstance* instance = nullptr;
  double geodesic_distance = 0.0;  // meters
};

struct NoInstanceError : std::runtime_error {
  explicit NoInstanceError(const std::string& what) : std::runtime_error(what) {}
};
struct UnreachableGoalError : std::runtime_error {
  explicit UnreachableGoalError(const std::string& what) : std::runtime_error(what) {}
};

// Goal instance whose cell set minimizes geodesic distance from the start
// over ground-truth traversability (planner distance field from the start
// cell). Throws NoInstanceError / UnreachableGoalError.
NearestGoal nearest_goal_instance(const Scene& scene, const Pose& start, int category);

}  // namespace objnav
