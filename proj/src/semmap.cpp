#include "objnav/semmap.hpp"

#include "objnav/morphology.hpp"
#include "objnav/ray.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace objnav {

namespace {
constexpr double k_pi = 3.141592653589793;
constexpr double k_deg = k_pi / 180.0;
constexpr double k_hit_nudge = 1e-6;
}  // namespace

GridU8 SemanticMap::channel(int k) const {
  if (k == 0) return obstacle;
  if (k == 1) return explored;
  if (k == 2) {
    GridU8 g = GridU8::Zero(M, M);
    g(current.row, current.col) = 1;
    return g;
  }
  if (k == 3) return past_locations;
  if (k >= 4 && k < channel_count()) return categories[static_cast<size_t>(k - 4)];
  throw std::out_of_range("channel index");
}

Cell SemanticMap::cell_at(double wx, double wy) const {
  // Floor in world space so a pose sitting on a cell boundary lands in the
  // same cell as the scene lattice, bit for bit.
  int k0r = static_cast<int>(std::floor(origin_y / cell_size));
  int k0c = static_cast<int>(std::floor(origin_x / cell_size));
  return {static_cast<int>(std::floor(wy / cell_size)) - k0r + M / 2,
          static_cast<int>(std::floor(wx / cell_size)) - k0c + M / 2};
}

SemanticMap new_map(int C, int M, double cell_size, double origin_x, double origin_y,
                    int obstacle_confirm) {
  if (C < 1) throw std::invalid_argument("new_map: C must be >= 1");
  if (M < 3 || M % 2 == 0) throw std::invalid_argument("new_map: M must be odd and >= 3");
  if (!(cell_size > 0.0)) throw std::invalid_argument("new_map: cell_size must be positive");
  if (obstacle_confirm < 1) throw std::invalid_argument("new_map: obstacle_confirm must be >= 1");
  SemanticMap map;
  map.M = M;
  map.C = C;
  map.cell_size = cell_size;
  // Snap the origin to the center of its lattice cell so map cell boundaries
  // coincide with world-lattice boundaries.
  map.origin_x = (std::floor(origin_x / cell_size) + 0.5) * cell_size;
  map.origin_y = (std::floor(origin_y / cell_size) + 0.5) * cell_size;
  map.obstacle_confirm = obstacle_confirm;
  map.obstacle = GridU8::Zero(M, M);
  map.explored = GridU8::Zero(M, M);
  map.past_locations = GridU8::Zero(M, M);
  map.current = {M / 2, M / 2};
  map.categories.assign(static_cast<size_t>(C), GridU8::Zero(M, M));
  map.evidence = GridU16::Zero(M, M);
  return map;
}

void integrate(SemanticMap& map, const Observation& obs, const CameraModel& camera) {
  Cell pose_cell = map.cell_at(obs.pose.x, obs.pose.y);
  if (!map.contains(pose_cell)) throw OutOfMapError("pose outside map bounds");

  Cell prior = map.current;
  map.past_locations(prior.row, prior.col) = 1;
  map.current = pose_cell;
  map.explored(pose_cell.row, pose_cell.col) = 1;

  const double hfov = camera.hfov_deg * k_deg;
  const double mx = map.map_x(obs.pose.x);
  const double my = map.map_y(obs.pose.y);
  const int n = static_cast<int>(obs.depth.size());

  for (int i = 0; i < n; ++i) {
    double bearing = obs.pose.heading - hfov / 2.0 + i * hfov / (n - 1);
    double dx = std::cos(bearing);
    double dy = std::sin(bearing);
    double depth = obs.depth[i];
    double reach = std::isfinite(depth) ? depth : camera.max_range;

    march_ray(map.M, map.M, map.cell_size, mx, my, dx, dy, reach,
              [&](Cell c, double) {
                map.explored(c.row, c.col) = 1;
                return true;
              });

    if (!std::isfinite(depth)) continue;
    double qx = mx + dx * (depth + k_hit_nudge);
    double qy = my + dy * (depth + k_hit_nudge);
    Cell hit{static_cast<int>(std::floor(qy / map.cell_size)),
             static_cast<int>(std::floor(qx / map.cell_size))};
    if (!map.contains(hit)) continue;
    map.explored(hit.row, hit.col) = 1;
    if (map.evidence(hit.row, hit.col) < std::numeric_limits<std::uint16_t>::max()) {
      map.evidence(hit.row, hit.col) += 1;
    }
    if (map.evidence(hit.row, hit.col) >= map.obstacle_confirm) {
      map.obstacle(hit.row, hit.col) = 1;
    }
    if (obs.category[i] != k_no_category && obs.category[i] < map.C) {
      map.categories[static_cast<size_t>(obs.category[i])](hit.row, hit.col) = 1;
    }
  }
}

GridU8 denoised_obstacles(const SemanticMap& map, const DenoiseParams& params) {
  GridU8 kept =
      (map.evidence >= static_cast<std::uint16_t>(params.obstacle_confirm)).cast<std::uint8_t>();
  int side = 2 * params.opening_radius + 1;
  return morphology::remove_small_components(kept, side * side);
}

void denoise(SemanticMap& map, const DenoiseParams& params) {
  map.obstacle = denoised_obstacles(map, params);
}

std::vector<Cell> goal_cells(const SemanticMap& map, int category) {
  if (category < 0 || category >= map.C) throw std::out_of_range("goal_cells: category");
  return set_cells(map.categories[static_cast<size_t>(category)]);
}

void write_pgm(const std::string& path, const GridU8& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << grid.cols() << " " << grid.rows() << "\n255\n";
  for (int row = static_cast<int>(grid.rows()) - 1; row >= 0; --row) {
    for (int col = 0; col < grid.cols(); ++col) {
      out.put(grid(row, col) ? static_cast<char>(255) : 0);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_map_ppm(const std::string& path, const SemanticMap& map) {
  static const unsigned char palette[][3] = {
      {230, 60, 60},  {60, 160, 60},  {60, 60, 230},  {200, 160, 40},
      {160, 60, 200}, {40, 190, 190}, {240, 120, 40}, {120, 120, 240},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P6\n" << map.M << " " << map.M << "\n255\n";
  for (int row = map.M - 1; row >= 0; --row) {
    for (int col = 0; col < map.M; ++col) {
      unsigned char r = 40, g = 40, b = 40;
      if (map.explored(row, col)) r = g = b = 200;
      if (map.obstacle(row, col)) r = g = b = 0;
      for (int c = 0; c < map.C; ++c) {
        if (map.categories[static_cast<size_t>(c)](row, col)) {
          const unsigned char* p = palette[c % 8];
          r = p[0];
          g = p[1];
          b = p[2];
        }
      }
      if (map.past_locations(row, col)) {
        r = 90;
        g = 90;
        b = 220;
      }
      if (map.current.row == row && map.current.col == col) {
        r = 255;
        g = 40;
        b = 40;
      }
      out.put(static_cast<char>(r));
      out.put(static_cast<char>(g));
      out.put(static_cast<char>(b));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace objnav
