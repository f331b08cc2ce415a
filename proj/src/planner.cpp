#include "objnav/planner.hpp"

#include "objnav/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace objnav {
namespace {

constexpr double k_align_threshold = k_turn_step_rad / 2.0;  // 15 deg dead-band-free

double wrap_pi(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

// Upwind quadratic update from the known axis minima. h is the spacing.
double solve_quadratic(double a, double b, double h) {
  if (!std::isfinite(a)) return b + h;
  if (!std::isfinite(b)) return a + h;
  const double diff = a - b;
  const double disc = 2.0 * h * h - diff * diff;
  if (disc < 0.0) return std::min(a, b) + h;  // one-axis fallback
  return 0.5 * (a + b + std::sqrt(disc));
}

struct HeapEntry {
  double value;
  int index;
  bool operator>(const HeapEntry& other) const {
    if (value != other.value) return value > other.value;
    return index > other.index;  // deterministic tie order
  }
};

}  // namespace

GridU8 dilate_obstacles(const GridU8& obstacle_mask, int radius) {
  return morphology::dilate(obstacle_mask, radius);
}

namespace {

DistanceField solve_field(const GridU8& traversable, const std::vector<Cell>& sources,
                          double cell_size, const GridWindow& window, const GridU8* targets,
                          int stop_after, std::vector<Cell>* finalized) {
  const int rows = static_cast<int>(traversable.rows());
  const int cols = static_cast<int>(traversable.cols());
  const GridWindow win = window.clipped(rows, cols);

  DistanceField field;
  field.traversable = traversable;
  field.cell_size = cell_size;
  field.values.resize(rows, cols);
  field.values.setConstant(k_unreachable);

  std::vector<std::uint8_t> known(static_cast<size_t>(rows) * cols, 0);
  const auto idx = [cols](Cell c) { return c.row * cols + c.col; };

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap;
  for (const Cell& s : sources) {
    if (!win.contains(s)) continue;
    field.sources.push_back(s);
    field.values(s.row, s.col) = 0.0;
    heap.push({0.0, idx(s)});
  }
  if (field.sources.empty()) throw AllSourcesBlockedError();

  int remaining = stop_after > 0 && targets ? stop_after : -1;
  bool stopped_early = false;
  bool reached_traversable = false;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    const Cell cur{top.index / cols, top.index % cols};
    if (known[static_cast<size_t>(top.index)]) continue;
    if (top.value != field.values(cur.row, cur.col)) continue;  // stale entry
    known[static_cast<size_t>(top.index)] = 1;
    if (traversable(cur.row, cur.col)) reached_traversable = true;
    if (targets && (*targets)(cur.row, cur.col)) {
      if (finalized) finalized->push_back(cur);
      if (remaining > 0 && --remaining == 0) {
        stopped_early = true;
        break;
      }
    }

    for (int k = 0; k < 4; ++k) {
      const Cell nb{cur.row + k_d4_row[k], cur.col + k_d4_col[k]};
      if (!win.contains(nb) || !traversable(nb.row, nb.col)) continue;
      if (known[static_cast<size_t>(idx(nb))]) continue;

      // Axis minima over already-accepted neighbors.
      double hmin = k_unreachable;
      double vmin = k_unreachable;
      for (int dc : {-1, 1}) {
        const Cell a{nb.row, nb.col + dc};
        if (win.contains(a) && known[static_cast<size_t>(idx(a))])
          hmin = std::min(hmin, field.values(a.row, a.col));
      }
      for (int dr : {-1, 1}) {
        const Cell a{nb.row + dr, nb.col};
        if (win.contains(a) && known[static_cast<size_t>(idx(a))])
          vmin = std::min(vmin, field.values(a.row, a.col));
      }
      const double cand = solve_quadratic(hmin, vmin, cell_size);
      if (cand < field.values(nb.row, nb.col)) {
        field.values(nb.row, nb.col) = cand;
        heap.push({cand, idx(nb)});
      }
    }
  }

  // Values still sitting in the heap were never finalized; on an early
  // stop they are optimistic lower bounds, so wipe them.
  if (stopped_early) {
    for (int r = win.row_lo; r <= win.row_hi; ++r) {
      for (int c = win.col_lo; c <= win.col_hi; ++c) {
        if (!known[static_cast<size_t>(r * cols + c)]) field.values(r, c) = k_unreachable;
      }
    }
  }

  if (!stopped_early) {
    const bool any_traversable_source =
        std::any_of(field.sources.begin(), field.sources.end(),
                    [&](Cell s) { return traversable(s.row, s.col) != 0; });
    if (!reached_traversable && !any_traversable_source) throw AllSourcesBlockedError();
  }
  return field;
}

}  // namespace

DistanceField distance_field(const GridU8& traversable, const std::vector<Cell>& sources,
                             double cell_size) {
  return distance_field(traversable, sources, cell_size, GridWindow::full(traversable));
}

DistanceField distance_field(const GridU8& traversable, const std::vector<Cell>& sources,
                             double cell_size, const GridWindow& window) {
  return solve_field(traversable, sources, cell_size, window, nullptr, -1, nullptr);
}

DistanceField distance_field_until(const GridU8& traversable, const std::vector<Cell>& sources,
                                   double cell_size, const GridU8& targets, int stop_after,
                                   std::vector<Cell>* finalized) {
  return solve_field(traversable, sources, cell_size, GridWindow::full(traversable), &targets,
                     stop_after, finalized);
}

double max_eikonal_residual(const DistanceField& field) {
  const int rows = static_cast<int>(field.values.rows());
  const int cols = static_cast<int>(field.values.cols());
  GridU8 source_mask(rows, cols);
  source_mask.setZero();
  for (const Cell& s : field.sources) source_mask(s.row, s.col) = 1;

  double worst = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = field.values(r, c);
      if (!std::isfinite(v) || source_mask(r, c) || !field.traversable(r, c)) continue;
      // Upwind reconstruction from strictly smaller neighbors.
      double hmin = k_unreachable;
      double vmin = k_unreachable;
      for (int dc : {-1, 1})
        if (c + dc >= 0 && c + dc < cols && field.values(r, c + dc) < v)
          hmin = std::min(hmin, field.values(r, c + dc));
      for (int dr : {-1, 1})
        if (r + dr >= 0 && r + dr < rows && field.values(r + dr, c) < v)
          vmin = std::min(vmin, field.values(r + dr, c));
      if (!std::isfinite(hmin) && !std::isfinite(vmin)) continue;
      worst = std::max(worst, std::abs(solve_quadratic(hmin, vmin, field.cell_size) - v));
    }
  }
  return worst;
}

NextStep next_action(const DistanceField& field, const PlannerPose& pose) {
  const int rows = static_cast<int>(field.values.rows());
  const int cols = static_cast<int>(field.values.cols());
  const Cell at{static_cast<int>(std::floor(pose.y / field.cell_size)),
                static_cast<int>(std::floor(pose.x / field.cell_size))};
  if (!in_bounds(rows, cols, at) || !field.reachable(at)) return {StepSignal::unreachable};

  const double here = field.at(at);
  if (here <= field.cell_size) return {StepSignal::at_goal, ActionKind::stop, at};

  Cell best{};
  double best_value = k_unreachable;
  for (int k = 0; k < 8; ++k) {
    const Cell nb{at.row + k_d8_row[k], at.col + k_d8_col[k]};
    if (!in_bounds(rows, cols, nb)) continue;
    // No corner cutting: a diagonal step is valid only when both orthogonal
    // cells it brushes are traversable.
    if (k_d8_row[k] != 0 && k_d8_col[k] != 0 &&
        (!field.traversable(at.row, nb.col) || !field.traversable(nb.row, at.col))) {
      continue;
    }
    const double v = field.values(nb.row, nb.col);
    if (v < best_value) {  // row-major scan order breaks ties
      best_value = v;
      best = nb;
    }
  }
  if (!(best_value < here)) return {StepSignal::stuck};

  const double wx = (best.col + 0.5) * field.cell_size;
  const double wy = (best.row + 0.5) * field.cell_size;
  const double bearing = std::atan2(wy - pose.y, wx - pose.x);
  const double diff = wrap_pi(bearing - pose.heading);
  if (std::abs(diff) <= k_align_threshold + 1e-12) {
    // A forward stride spans several cells and can overshoot a bend onto a
    // higher-value cell, breaking monotone descent. Simulate the sweep the
    // way the motion model does and only move when the landing improves.
    const double dx = std::cos(pose.heading);
    const double dy = std::sin(pose.heading);
    Cell landing = at;
    const int n_sub = static_cast<int>(std::ceil(k_forward_step_m / field.cell_size));
    for (int k = 1; k <= n_sub; ++k) {
      const double t = std::min(k_forward_step_m, k * field.cell_size);
      const Cell c{static_cast<int>(std::floor((pose.y + dy * t) / field.cell_size)),
                   static_cast<int>(std::floor((pose.x + dx * t) / field.cell_size))};
      if (!in_bounds(rows, cols, c) || !field.traversable(c.row, c.col)) break;
      landing = c;
    }
    if (field.reachable(landing) && field.at(landing) < here)
      return {StepSignal::action, ActionKind::forward, best};
    return {StepSignal::stuck, ActionKind::stop, best};
  }
  return {StepSignal::action, diff > 0 ? ActionKind::turn_left : ActionKind::turn_right, best};
}

void write_pfm(const DistanceField& field, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const int rows = static_cast<int>(field.values.rows());
  const int cols = static_cast<int>(field.values.cols());
  std::fprintf(f, "Pf\n%d %d\n-1.0\n", cols, rows);
  std::vector<float> row(static_cast<size_t>(cols));
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = 0; c < cols; ++c) row[static_cast<size_t>(c)] = static_cast<float>(field.values(r, c));
    std::fwrite(row.data(), sizeof(float), row.size(), f);
  }
  std::fclose(f);
}

}  // namespace objnav
