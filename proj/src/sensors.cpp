#include "objnav/sensors.hpp"

#include "objnav/ray.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace objnav {

namespace {

constexpr double k_pi = 3.141592653589793;
constexpr double k_deg = k_pi / 180.0;
constexpr double k_min_depth = 1e-6;

bool identity_confusion(const std::vector<std::vector<double>>& m) {
  for (size_t r = 0; r < m.size(); ++r) {
    for (size_t c = 0; c < m[r].size(); ++c) {
      double want = r == c ? 1.0 : 0.0;
      if (std::abs(m[r][c] - want) > 1e-12) return false;
    }
  }
  return true;
}

struct RayHit {
  bool hit = false;
  double depth = 0.0;
  Cell cell{};
};

RayHit first_blocked(const SceneView& view, double x0, double y0, double dx, double dy,
                     double t_max) {
  const Scene& s = *view.scene;
  RayHit out;
  march_ray(s.height, s.width, s.cell_size, x0, y0, dx, dy, t_max,
            [&](Cell c, double t) {
              if (s.traversable(c.row, c.col)) return true;
              out.hit = true;
              out.depth = t;
              out.cell = c;
              return false;
            });
  return out;
}

}  // namespace

void validate_noise(const NoiseProfile& noise, int n_categories) {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvariantError(std::string(what) + " outside [0,1]");
  };
  prob(noise.depth_dropout, "depth_dropout");
  if (noise.depth_sigma < 0.0) throw InvariantError("depth_sigma negative");
  if (noise.actuation_trans_sigma < 0.0) throw InvariantError("actuation_trans_sigma negative");
  if (noise.actuation_rot_sigma < 0.0) throw InvariantError("actuation_rot_sigma negative");
  if (!noise.seg_miss.empty() && static_cast<int>(noise.seg_miss.size()) != n_categories) {
    throw InvariantError("seg_miss size does not match category count");
  }
  for (double p : noise.seg_miss) prob(p, "seg_miss");
  if (!noise.seg_confusion.empty()) {
    if (static_cast<int>(noise.seg_confusion.size()) != n_categories) {
      throw InvariantError("seg_confusion must be CxC");
    }
    for (const auto& row : noise.seg_confusion) {
      if (static_cast<int>(row.size()) != n_categories) {
        throw InvariantError("seg_confusion must be CxC");
      }
      double sum = 0.0;
      for (double p : row) {
        prob(p, "seg_confusion entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) throw InvariantError("seg_confusion row does not sum to 1");
    }
  }
}

NoiseProfile zero_noise() {
  NoiseProfile n;
  n.name = "none";
  return n;
}

namespace {
std::vector<std::vector<double>> diagonal_confusion(int c, double diag) {
  std::vector<std::vector<double>> m(c, std::vector<double>(c, 0.0));
  double off = c > 1 ? (1.0 - diag) / (c - 1) : 0.0;
  for (int r = 0; r < c; ++r) {
    for (int k = 0; k < c; ++k) m[r][k] = r == k ? diag : off;
  }
  return m;
}
}  // namespace

NoiseProfile simlike_noise(int n_categories) {
  NoiseProfile n;
  n.name = "simlike";
  n.seg_miss.assign(n_categories, 0.05);
  n.seg_confusion = diagonal_confusion(n_categories, 0.90);
  return n;
}

NoiseProfile reallike_noise(int n_categories) {
  NoiseProfile n;
  n.name = "reallike";
  n.depth_sigma = 0.02;
  n.depth_dropout = 0.01;
  n.reflections_enabled = true;
  n.seg_miss.assign(n_categories, 0.15);
  n.seg_confusion = diagonal_confusion(n_categories, 0.95);
  return n;
}

SceneView make_scene_view(const Scene& scene) {
  SceneView view;
  view.scene = &scene;
  view.category_of = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(
      scene.height, scene.width, k_no_category);
  view.instance_of = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(
      scene.height, scene.width, -1);
  for (size_t k = 0; k < scene.objects.size(); ++k) {
    for (const Cell& c : scene.objects[k].cells) {
      view.category_of(c.row, c.col) = scene.objects[k].category;
      view.instance_of(c.row, c.col) = static_cast<int>(k);
    }
  }
  view.reflective_of = reflective_index(scene);
  return view;
}

std::vector<int> detector_labels(const Scene& scene, const NoiseProfile& noise, Rng& rng) {
  std::vector<int> labels(scene.objects.size());
  const bool confuse = !noise.seg_confusion.empty() && !identity_confusion(noise.seg_confusion);
  for (size_t k = 0; k < scene.objects.size(); ++k) {
    int cat = scene.objects[k].category;
    labels[k] = confuse ? rng.weighted_index(noise.seg_confusion[cat]) : cat;
  }
  return labels;
}

Observation observe(const SceneView& view, const Pose& pose, const CameraModel& camera,
                    const NoiseProfile& noise, Rng& rng, int step_index,
                    const std::vector<int>* instance_labels) {
  const Scene& scene = *view.scene;
  Observation obs;
  obs.pose = pose;
  obs.step_index = step_index;
  obs.depth.assign(camera.n_rays, k_sentinel_far);
  obs.category.assign(camera.n_rays, k_no_category);

  const bool confuse = !noise.seg_confusion.empty() && !identity_confusion(noise.seg_confusion);
  const double hfov = camera.hfov_deg * k_deg;

  for (int i = 0; i < camera.n_rays; ++i) {
    double bearing = pose.heading - hfov / 2.0 + i * hfov / (camera.n_rays - 1);
    double dx = std::cos(bearing);
    double dy = std::sin(bearing);

    double depth = k_sentinel_far;
    int category = k_no_category;
    int instance = -1;

    RayHit hit = first_blocked(view, pose.x, pose.y, dx, dy, camera.max_range);
    if (hit.hit) {
      depth = hit.depth;
      category = view.category_of(hit.cell.row, hit.cell.col);
      instance = view.instance_of(hit.cell.row, hit.cell.col);
      int refl = view.reflective_of(hit.cell.row, hit.cell.col);
      if (noise.reflections_enabled && refl) {
        const ReflectiveSurface& surf = scene.reflective[refl - 1];
        if (surf.mode == ReflectiveMode::beyond_range) {
          depth = k_sentinel_far;
          category = k_no_category;
          instance = -1;
        } else {
          double ax = surf.mirror_axis.x1 - surf.mirror_axis.x0;
          double ay = surf.mirror_axis.y1 - surf.mirror_axis.y0;
          double norm = std::hypot(ax, ay);
          depth = k_sentinel_far;
          category = k_no_category;
          instance = -1;
          if (norm > 0.0) {
            ax /= norm;
            ay /= norm;
            double dot = dx * ax + dy * ay;
            double rx = 2.0 * dot * ax - dx;
            double ry = 2.0 * dot * ay - dy;
            double px = pose.x + dx * hit.depth + rx * 1e-9;
            double py = pose.y + dy * hit.depth + ry * 1e-9;
            RayHit second =
                first_blocked(view, px, py, rx, ry, camera.max_range - hit.depth);
            if (second.hit) {
              depth = hit.depth + second.depth;
              category = view.category_of(second.cell.row, second.cell.col);
              instance = view.instance_of(second.cell.row, second.cell.col);
            }
          }
        }
      }
    }

    if (std::isfinite(depth) && noise.depth_sigma > 0.0) {
      depth = std::max(k_min_depth, depth * (1.0 + noise.depth_sigma * rng.normal()));
      if (depth > camera.max_range) depth = k_sentinel_far;
    }
    if (noise.depth_dropout > 0.0 && rng.bernoulli(noise.depth_dropout)) {
      depth = k_sentinel_far;
    }
    if (!std::isfinite(depth)) category = k_no_category;
    if (category != k_no_category) {
      depth = std::max(depth, k_min_depth);
      if (!noise.seg_miss.empty() && noise.seg_miss[category] > 0.0 &&
          rng.bernoulli(noise.seg_miss[category])) {
        category = k_no_category;
      } else if (instance_labels && instance >= 0) {
        category = (*instance_labels)[instance];
      } else if (confuse) {
        category = rng.weighted_index(noise.seg_confusion[category]);
      }
    } else if (std::isfinite(depth)) {
      depth = std::max(depth, k_min_depth);
    }
    obs.depth[i] = depth;
    obs.category[i] = category;
  }
  return obs;
}

Observation observe(const Scene& scene, const Pose& pose, const CameraModel& camera,
                    const NoiseProfile& noise, Rng& rng, int step_index) {
  return observe(make_scene_view(scene), pose, camera, noise, rng, step_index);
}

MoveResult apply_action(const Scene& scene, const Pose& pose, ActionKind cmd,
                        const NoiseProfile& noise, Rng& rng) {
  MoveResult out;
  out.pose = pose;
  if (cmd == ActionKind::stop) throw std::invalid_argument("apply_action: stop is not a motion");

  if (cmd == ActionKind::turn_left || cmd == ActionKind::turn_right) {
    double delta = cmd == ActionKind::turn_left ? k_turn_step_rad : -k_turn_step_rad;
    if (noise.actuation_rot_sigma > 0.0) delta += rng.normal(0.0, noise.actuation_rot_sigma);
    out.pose.heading = wrap_heading(pose.heading + delta);
    return out;
  }

  double dist = k_forward_step_m;
  if (noise.actuation_trans_sigma > 0.0) {
    dist = std::max(0.0, dist + rng.normal(0.0, noise.actuation_trans_sigma));
  }
  const double dx = std::cos(pose.heading);
  const double dy = std::sin(pose.heading);
  const double h = scene.cell_size;
  const int n_sub = std::max(1, static_cast<int>(std::ceil(dist / h)));
  double ok_x = pose.x;
  double ok_y = pose.y;
  for (int k = 1; k <= n_sub; ++k) {
    double t = std::min(dist, k * h);
    double x = pose.x + dx * t;
    double y = pose.y + dy * t;
    Cell c = scene_cell_of(scene, x, y);
    if (!in_bounds(scene.height, scene.width, c) || !scene.traversable(c.row, c.col)) {
      out.collided = true;
      if (in_bounds(scene.height, scene.width, c)) out.blocked = c;
      break;
    }
    ok_x = x;
    ok_y = y;
  }
  out.pose.x = ok_x;
  out.pose.y = ok_y;
  return out;
}

std::vector<double> segmentation_quality(const NoiseProfile& noise, const Scene& scene,
                                         const CameraModel& camera, int n_categories,
                                         int n_frames, Rng& rng) {
  if (n_frames < 1) throw std::invalid_argument("segmentation_quality: n_frames must be >= 1");
  SceneView view = make_scene_view(scene);
  std::vector<Cell> free_cells = set_cells(scene.traversable);
  if (free_cells.empty()) throw InvariantError("scene has no traversable cells");

  std::vector<std::int64_t> visible(n_categories, 0), correct(n_categories, 0);
  NoiseProfile clean = zero_noise();
  Rng dummy(0);
  for (int f = 0; f < n_frames; ++f) {
    Cell c = free_cells[static_cast<size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(free_cells.size()) - 1))];
    Pose pose;
    pose.x = (c.col + 0.5) * scene.cell_size;
    pose.y = (c.row + 0.5) * scene.cell_size;
    pose.heading = rng.uniform(0.0, 2.0 * k_pi);
    Observation truth = observe(view, pose, camera, clean, dummy, f);
    Observation noisy = observe(view, pose, camera, noise, rng, f);
    for (int i = 0; i < camera.n_rays; ++i) {
      if (truth.category[i] == k_no_category) continue;
      ++visible[truth.category[i]];
      if (noisy.category[i] == truth.category[i]) ++correct[truth.category[i]];
    }
  }
  std::vector<double> rate(n_categories, -1.0);
  for (int c = 0; c < n_categories; ++c) {
    if (visible[c] > 0) rate[c] = static_cast<double>(correct[c]) / visible[c];
  }
  return rate;
}

}  // namespace objnav
