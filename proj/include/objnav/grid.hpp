#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <tuple>
#include <vector>

namespace objnav {

// Dense row-major grids. (row, col) indexing everywhere; row 0 is the
// southern edge, col 0 the western edge. World x runs along columns,
// world y along rows, so cell centers sit at ((col+0.5)h, (row+0.5)h).
using GridU8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridU16 = Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using GridF = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell& a, const Cell& b) {
    return a.row == b.row && a.col == b.col;
  }
  friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
  // Row-major order; ties everywhere in the codebase break toward the
  // smaller cell under this ordering.
  friend bool operator<(const Cell& a, const Cell& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  }
};

template <typename Derived>
bool in_bounds(const Eigen::ArrayBase<Derived>& g, Cell c) {
  return c.row >= 0 && c.row < g.rows() && c.col >= 0 && c.col < g.cols();
}

inline bool in_bounds(int rows, int cols, Cell c) {
  return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
}

// Rectangular sub-window [row_lo, row_hi] x [col_lo, col_hi], inclusive.
// Degenerate (lo > hi) means empty.
struct GridWindow {
  int row_lo = 0;
  int row_hi = -1;
  int col_lo = 0;
  int col_hi = -1;

  static GridWindow full(const GridU8& g) {
    return {0, static_cast<int>(g.rows()) - 1, 0, static_cast<int>(g.cols()) - 1};
  }
  bool empty() const { return row_lo > row_hi || col_lo > col_hi; }
  int rows() const { return row_hi - row_lo + 1; }
  int cols() const { return col_hi - col_lo + 1; }
  bool contains(Cell c) const {
    return c.row >= row_lo && c.row <= row_hi && c.col >= col_lo && c.col <= col_hi;
  }
  GridWindow clipped(int rows, int cols) const;
  GridWindow expanded(int margin) const {
    return {row_lo - margin, row_hi + margin, col_lo - margin, col_hi + margin};
  }
};

// Tight bounding window of nonzero cells; empty window when none are set.
GridWindow set_bbox(const GridU8& g);

// 4-neighborhood in row-major order (N relative to row-major scan).
inline constexpr int k_d4_row[4] = {-1, 0, 0, 1};
inline constexpr int k_d4_col[4] = {0, -1, 1, 0};

// 8-neighborhood, row-major order.
inline constexpr int k_d8_row[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int k_d8_col[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

std::vector<Cell> set_cells(const GridU8& g);

// Connected component labelling over nonzero cells; returns label grid
// (0 = background, labels start at 1) and the component sizes indexed by
// label-1. 8-connectivity.
std::pair<Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>, std::vector<int>>
label_components(const GridU8& g);

// Flood fill over nonzero (traversable) cells from a seed, 4-connected.
// Returns the visited mask; seed must be nonzero in g.
GridU8 flood_fill(const GridU8& g, Cell seed);

}  // namespace objnav
