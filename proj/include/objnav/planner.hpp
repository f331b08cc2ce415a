#pragma once

#include "objnav/action.hpp"
#include "objnav/grid.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

inline constexpr double k_unreachable = std::numeric_limits<double>::infinity();

struct AllSourcesBlockedError : std::runtime_error {
  AllSourcesBlockedError() : std::runtime_error("distance field: all source cells are blocked") {}
};

// Geodesic distance field from an eikonal solve, |grad T| = 1 on the
// traversable region with T = 0 at the sources. Unreached cells hold
// k_unreachable. Immutable after construction.
struct DistanceField {
  GridF values;
  GridU8 traversable;
  std::vector<Cell> sources;
  double cell_size = 0.05;

  double at(Cell c) const { return values(c.row, c.col); }
  bool reachable(Cell c) const { return std::isfinite(values(c.row, c.col)); }
};

// Obstacle mask grown by a Chebyshev radius; footprint clearance for
// planning. radius 0 is the identity.
GridU8 dilate_obstacles(const GridU8& obstacle_mask, int radius);

// First-order upwind fast marching over the traversable mask. Sources may
// sit on blocked cells (goals on object cells); they seed the front at
// zero and propagate into traversable neighbors only. Throws
// AllSourcesBlockedError when the front cannot reach any traversable cell.
DistanceField distance_field(const GridU8& traversable, const std::vector<Cell>& sources,
                             double cell_size);

// Same solve restricted to a window; everything outside is treated as
// blocked and left unreachable. Sources outside the window are dropped.
DistanceField distance_field(const GridU8& traversable, const std::vector<Cell>& sources,
                             double cell_size, const GridWindow& window);

// Early-terminating solve: stops once stop_after nonzero cells of the
// target mask have been finalized, or the front exhausts. Finalized values
// are exact (the front finalizes in nondecreasing order); cells the stop
// cuts off stay unreachable. finalized, when given, receives the target
// cells in finalization order. stop_after <= 0 runs to exhaustion.
DistanceField distance_field_until(const GridU8& traversable, const std::vector<Cell>& sources,
                                   double cell_size, const GridU8& targets, int stop_after,
                                   std::vector<Cell>* finalized = nullptr);

// Largest violation of the discrete upwind quadratic over reachable
// non-source cells, in meters. A valid solve keeps this at rounding level.
double max_eikonal_residual(const DistanceField& field);

enum class StepSignal { action, at_goal, stuck, unreachable };

struct NextStep {
  StepSignal signal = StepSignal::stuck;
  ActionKind action = ActionKind::stop;
  Cell waypoint{};
};

struct PlannerPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

// Cell a forward stride ends in: the sweep advances in cell_size substeps
// and stops before the first untraversable cell, like the motion model.
Cell forward_landing(const DistanceField& field, const PlannerPose& pose);

// Greedy descent on the field: waypoint is the 8-connected neighbor with
// the smallest value (row-major tie-break); forward when the bearing to it
// is within 15 degrees of the heading and the stride lands on a strictly
// lower cell, otherwise turn toward it. A blocked aligned stride is stuck.
NextStep next_action(const DistanceField& field, const PlannerPose& pose);

// Debug dump as a binary PFM float grid (row 0 written last, per format).
void write_pfm(const DistanceField& field, const std::string& path);

}  // namespace objnav
