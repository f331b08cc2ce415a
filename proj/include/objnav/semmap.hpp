#pragma once

#include "objnav/grid.hpp"
#include "objnav/scene.hpp"
#include "objnav/sensors.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

struct OutOfMapError : std::runtime_error {
  explicit OutOfMapError(const std::string& what) : std::runtime_error(what) {}
};

// Agent-side binary semantic map, K = C + 4 channels over an M x M grid
// centered on the episode start pose. Channel order: obstacle, explored,
// current_location, past_locations, then one channel per category.
struct SemanticMap {
  int M = 0;
  int C = 0;
  double cell_size = 0.05;
  double origin_x = 0.0;  // world coords mapped to the map center cell
  double origin_y = 0.0;
  int obstacle_confirm = 1;

  GridU8 obstacle;
  GridU8 explored;
  GridU8 past_locations;
  Cell current{};
  std::vector<GridU8> categories;
  GridU16 evidence;

  int channel_count() const { return C + 4; }
  GridU8 channel(int k) const;

  bool contains(Cell c) const { return in_bounds(M, M, c); }

  // World point -> map cell. The origin lands at the center of the center
  // cell, so a start pose on a scene cell center keeps both grids aligned.
  Cell cell_at(double wx, double wy) const;
  double map_x(double wx) const { return wx - origin_x + (M / 2 + 0.5) * cell_size; }
  double map_y(double wy) const { return wy - origin_y + (M / 2 + 0.5) * cell_size; }
  double world_x(int col) const { return origin_x + (col - M / 2) * cell_size; }
  double world_y(int row) const { return origin_y + (row - M / 2) * cell_size; }
};

SemanticMap new_map(int C, int M, double cell_size = 0.05, double origin_x = 0.0,
                    double origin_y = 0.0, int obstacle_confirm = 1);

// Fuses one observation: explored space along each ray, obstacle evidence
// at finite-depth hits (obstacle bit set once evidence reaches
// obstacle_confirm), category channel at categorized hits, and the
// location channels. Throws OutOfMapError if the pose leaves the map.
void integrate(SemanticMap& map, const Observation& obs, const CameraModel& camera);

struct DenoiseParams {
  int obstacle_confirm = 2;
  int opening_radius = 1;
};

// Rebuilds the obstacle channel from evidence: threshold at
// obstacle_confirm, then drop connected blobs smaller than
// (2*opening_radius+1)^2 cells (area opening; a shape opening of the same
// radius would erase single-cell walls wholesale). Explored and category
// channels are untouched. Pure in evidence, so repeated calls agree.
void denoise(SemanticMap& map, const DenoiseParams& params);
GridU8 denoised_obstacles(const SemanticMap& map, const DenoiseParams& params);

std::vector<Cell> goal_cells(const SemanticMap& map, int category);

// Image dumps for debugging. PGM per binary channel (255 = set), PPM
// color composite. Row 0 is written at the bottom so north is up.
void write_pgm(const std::string& path, const GridU8& grid);
void write_map_ppm(const std::string& path, const SemanticMap& map);

}  // namespace objnav
