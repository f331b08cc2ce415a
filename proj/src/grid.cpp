#include "objnav/grid.hpp"

#include <deque>

namespace objnav {

GridWindow GridWindow::clipped(int rows, int cols) const {
  return {std::max(0, row_lo), std::min(rows - 1, row_hi), std::max(0, col_lo),
          std::min(cols - 1, col_hi)};
}

GridWindow set_bbox(const GridU8& g) {
  const int rows = static_cast<int>(g.rows());
  const int cols = static_cast<int>(g.cols());
  const auto row_any = g.rowwise().maxCoeff();
  const auto col_any = g.colwise().maxCoeff();
  GridWindow w{rows, -1, cols, -1};
  for (int r = 0; r < rows; ++r) {
    if (!row_any(r)) continue;
    w.row_lo = std::min(w.row_lo, r);
    w.row_hi = r;
  }
  for (int c = 0; c < cols; ++c) {
    if (!col_any(c)) continue;
    w.col_lo = std::min(w.col_lo, c);
    w.col_hi = c;
  }
  if (w.row_hi < 0) return {0, -1, 0, -1};
  return w;
}

std::vector<Cell> set_cells(const GridU8& g) {
  std::vector<Cell> out;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      if (g(r, c)) out.push_back({r, c});
  return out;
}

std::pair<Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>, std::vector<int>>
label_components(const GridU8& g) {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> labels(g.rows(), g.cols());
  labels.setZero();
  std::vector<int> sizes;
  std::deque<Cell> queue;
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      if (!g(r, c) || labels(r, c)) continue;
      const int label = static_cast<int>(sizes.size()) + 1;
      int size = 0;
      labels(r, c) = label;
      queue.push_back({r, c});
      while (!queue.empty()) {
        Cell cur = queue.front();
        queue.pop_front();
        ++size;
        for (int k = 0; k < 8; ++k) {
          Cell nb{cur.row + k_d8_row[k], cur.col + k_d8_col[k]};
          if (!in_bounds(g, nb) || !g(nb.row, nb.col) || labels(nb.row, nb.col)) continue;
          labels(nb.row, nb.col) = label;
          queue.push_back(nb);
        }
      }
      sizes.push_back(size);
    }
  }
  return {std::move(labels), std::move(sizes)};
}

GridU8 flood_fill(const GridU8& g, Cell seed) {
  GridU8 visited(g.rows(), g.cols());
  visited.setZero();
  if (!in_bounds(g, seed) || !g(seed.row, seed.col)) return visited;
  std::deque<Cell> queue{seed};
  visited(seed.row, seed.col) = 1;
  while (!queue.empty()) {
    Cell cur = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      Cell nb{cur.row + k_d4_row[k], cur.col + k_d4_col[k]};
      if (!in_bounds(g, nb) || !g(nb.row, nb.col) || visited(nb.row, nb.col)) continue;
      visited(nb.row, nb.col) = 1;
      queue.push_back(nb);
    }
  }
  return visited;
}

}  // namespace objnav
