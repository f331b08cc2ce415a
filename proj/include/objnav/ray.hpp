#pragma once

#include "objnav/grid.hpp"

#include <cmath>
#include <limits>

namespace objnav {

// Amanatides-Woo cell traversal. Visits every cell the ray passes through,
// in order, starting with the cell containing (x0, y0). The visitor gets
// (cell, t_entry) with t_entry in meters along the ray (0 for the first
// cell) and returns true to continue marching. Stops when t_entry would
// exceed t_max or the ray leaves the grid bounds.
template <typename Visitor>
void march_ray(int rows, int cols, double cell_size, double x0, double y0, double dir_x,
               double dir_y, double t_max, Visitor&& visit) {
  const double inf = std::numeric_limits<double>::infinity();
  int col = static_cast<int>(std::floor(x0 / cell_size));
  int row = static_cast<int>(std::floor(y0 / cell_size));

  int step_col = dir_x > 0 ? 1 : (dir_x < 0 ? -1 : 0);
  int step_row = dir_y > 0 ? 1 : (dir_y < 0 ? -1 : 0);

  double t_delta_col = step_col ? cell_size / std::abs(dir_x) : inf;
  double t_delta_row = step_row ? cell_size / std::abs(dir_y) : inf;

  auto first_crossing = [cell_size](double p, double d, int idx, int step) {
    if (step == 0) return std::numeric_limits<double>::infinity();
    double boundary = (step > 0 ? idx + 1 : idx) * cell_size;
    return (boundary - p) / d;
  };
  double t_next_col = first_crossing(x0, dir_x, col, step_col);
  double t_next_row = first_crossing(y0, dir_y, row, step_row);

  double t = 0.0;
  while (true) {
    if (row < 0 || row >= rows || col < 0 || col >= cols) return;
    if (t > t_max) return;
    if (!visit(Cell{row, col}, t)) return;
    if (t_next_col <= t_next_row) {
      t = t_next_col;
      t_next_col += t_delta_col;
      col += step_col;
    } else {
      t = t_next_row;
      t_next_row += t_delta_row;
      row += step_row;
    }
    if (!std::isfinite(t)) return;
  }
}

}  // namespace objnav
