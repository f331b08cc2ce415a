#include "objnav/scene.hpp"

#include "objnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace objnav {

namespace {
constexpr double k_two_pi = 6.283185307179586;
}

double wrap_heading(double heading) {
  double h = std::fmod(heading, k_two_pi);
  if (h < 0.0) h += k_two_pi;
  if (h >= k_two_pi) h = 0.0;
  return h;
}

Cell scene_cell_of(const Scene& scene, double x, double y) {
  return {static_cast<int>(std::floor(y / scene.cell_size)),
          static_cast<int>(std::floor(x / scene.cell_size))};
}

bool pose_valid(const Scene& scene, const Pose& pose) {
  Cell c = scene_cell_of(scene, pose.x, pose.y);
  if (!in_bounds(scene.height, scene.width, c)) return false;
  return scene.traversable(c.row, c.col) != 0;
}

GridU8 object_mask(const Scene& scene) {
  GridU8 mask = GridU8::Zero(scene.height, scene.width);
  for (const auto& obj : scene.objects) {
    for (const Cell& c : obj.cells) mask(c.row, c.col) = 1;
  }
  return mask;
}

Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> reflective_index(
    const Scene& scene) {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> idx =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(scene.height,
                                                                               scene.width);
  for (size_t i = 0; i < scene.reflective.size(); ++i) {
    for (const Cell& c : scene.reflective[i].cells) {
      idx(c.row, c.col) = static_cast<int>(i) + 1;
    }
  }
  return idx;
}

namespace {

void fail(const std::string& what) { throw InvariantError(what); }

void check_cells_in_bounds(const std::vector<Cell>& cells, int rows, int cols,
                           const std::string& owner) {
  for (const Cell& c : cells) {
    if (!in_bounds(rows, cols, c)) {
      std::ostringstream os;
      os << owner << " cell (" << c.row << "," << c.col << ") out of bounds";
      fail(os.str());
    }
  }
}

void check_sorted_unique(const std::vector<Cell>& cells, const std::string& owner) {
  for (size_t i = 1; i < cells.size(); ++i) {
    if (!(cells[i - 1] < cells[i])) fail(owner + " cells not sorted row-major unique");
  }
}

}  // namespace

void validate_scene(const Scene& scene, const CategorySet& categories) {
  if (scene.id.empty()) fail("scene id empty");
  if (scene.width < 3 || scene.height < 3) fail("scene dimensions too small");
  if (!(scene.cell_size > 0.0)) fail("cell_size must be positive");
  if (scene.traversable.rows() != scene.height || scene.traversable.cols() != scene.width) {
    fail("traversable grid shape mismatch");
  }

  // Border ring must be blocked so rays and motion never leave the grid.
  for (int col = 0; col < scene.width; ++col) {
    if (scene.traversable(0, col) || scene.traversable(scene.height - 1, col)) {
      fail("border cell traversable");
    }
  }
  for (int row = 0; row < scene.height; ++row) {
    if (scene.traversable(row, 0) || scene.traversable(row, scene.width - 1)) {
      fail("border cell traversable");
    }
  }

  std::set<int> seen_ids;
  std::vector<GridU8> owned_by_cat(static_cast<size_t>(categories.size()),
                                   GridU8::Zero(scene.height, scene.width));
  for (const auto& obj : scene.objects) {
    if (obj.category < 0 || obj.category >= categories.size()) {
      std::ostringstream os;
      os << "object " << obj.instance_id << " category " << obj.category << " out of range";
      fail(os.str());
    }
    if (!seen_ids.insert(obj.instance_id).second) {
      std::ostringstream os;
      os << "duplicate instance_id " << obj.instance_id;
      fail(os.str());
    }
    if (obj.cells.empty()) fail("object with empty cell set");
    std::ostringstream owner;
    owner << "object " << obj.instance_id;
    check_cells_in_bounds(obj.cells, scene.height, scene.width, owner.str());
    check_sorted_unique(obj.cells, owner.str());
    GridU8& owned = owned_by_cat[static_cast<size_t>(obj.category)];
    for (const Cell& c : obj.cells) {
      if (scene.traversable(c.row, c.col)) {
        std::ostringstream os;
        os << "object " << obj.instance_id << " cell (" << c.row << "," << c.col
           << ") is traversable";
        fail(os.str());
      }
      if (owned(c.row, c.col)) {
        std::ostringstream os;
        os << "object cell (" << c.row << "," << c.col
           << ") owned by two instances of one category";
        fail(os.str());
      }
      owned(c.row, c.col) = 1;
    }
  }

  for (size_t i = 0; i < scene.reflective.size(); ++i) {
    std::ostringstream owner;
    owner << "reflective surface " << i;
    if (scene.reflective[i].cells.empty()) fail(owner.str() + " has empty cell set");
    check_cells_in_bounds(scene.reflective[i].cells, scene.height, scene.width, owner.str());
    check_sorted_unique(scene.reflective[i].cells, owner.str());
    for (const Cell& c : scene.reflective[i].cells) {
      if (scene.traversable(c.row, c.col)) {
        fail(owner.str() + " cell is traversable");
      }
    }
  }
}

NearestGoal nearest_goal_instance(const Scene& scene, const Pose& start, int category) {
  std::vector<const ObjectInstance*> candidates;
  for (const auto& obj : scene.objects) {
    if (obj.category == category) candidates.push_back(&obj);
  }
  if (candidates.empty()) {
    throw NoInstanceError("scene " + scene.id + " has no instance of requested category");
  }

  Cell start_cell = scene_cell_of(scene, start.x, start.y);
  if (!in_bounds(scene.height, scene.width, start_cell) ||
      !scene.traversable(start_cell.row, start_cell.col)) {
    throw UnreachableGoalError("start pose not on a traversable cell");
  }

  DistanceField field =
      distance_field(scene.traversable, {start_cell}, scene.cell_size);

  NearestGoal best;
  best.geodesic_distance = std::numeric_limits<double>::infinity();
  for (const ObjectInstance* obj : candidates) {
    // Objects sit on blocked cells; measure to the nearest traversable cell
    // 4-adjacent to the instance footprint.
    double d = std::numeric_limits<double>::infinity();
    for (const Cell& c : obj->cells) {
      for (int k = 0; k < 4; ++k) {
        Cell nb{c.row + k_d4_row[k], c.col + k_d4_col[k]};
        if (!in_bounds(scene.height, scene.width, nb)) continue;
        if (!scene.traversable(nb.row, nb.col)) continue;
        d = std::min(d, static_cast<double>(field.values(nb.row, nb.col)));
      }
    }
    if (d < best.geodesic_distance) {
      best.geodesic_distance = d;
      best.instance = obj;
    }
  }
  if (!best.instance || !std::isfinite(best.geodesic_distance)) {
    throw UnreachableGoalError("no instance of requested category is reachable from start");
  }
  return best;
}

}  // namespace objnav
