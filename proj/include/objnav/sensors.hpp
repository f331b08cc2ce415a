#pragma once

#include "objnav/action.hpp"
#include "objnav/categories.hpp"
#include "objnav/rng.hpp"
#include "objnav/scene.hpp"

#include <limits>
#include <vector>

namespace objnav {

inline constexpr double k_sentinel_far = std::numeric_limits<double>::infinity();

struct CameraModel {
  double hfov_deg = 42.0;
  int n_rays = 64;
  double max_range = 4.0;
};

struct Observation {
  std::vector<double> depth;  // meters, or k_sentinel_far
  std::vector<int> category;  // k_no_category or category index
  Pose pose;
  int step_index = 0;
};

struct NoiseProfile {
  std::string name = "none";
  double depth_sigma = 0.0;  // relative multiplicative speckle std
  double depth_dropout = 0.0;
  bool reflections_enabled = false;
  std::vector<double> seg_miss;              // per category; empty = all zero
  std::vector<std::vector<double>> seg_confusion;  // CxC row-stochastic; empty = identity
  double actuation_trans_sigma = 0.0;
  double actuation_rot_sigma = 0.0;
};

// Throws InvariantError on out-of-range probabilities, non-stochastic
// confusion rows, negative sigmas, or size mismatches against C.
void validate_noise(const NoiseProfile& noise, int n_categories);

NoiseProfile zero_noise();
NoiseProfile simlike_noise(int n_categories);
NoiseProfile reallike_noise(int n_categories);

// Per-scene lookup grids, built once and shared by all rays of all
// episodes on that scene.
struct SceneView {
  const Scene* scene = nullptr;
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> category_of;  // k_no_category or index
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> instance_of;  // -1 or object index
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> reflective_of;  // 0 or index+1
};

SceneView make_scene_view(const Scene& scene);

// One detector label per object instance, drawn once from the confusion
// row of the instance's true category. A mislabeled instance then reports
// that label on every sighting; per-ray misses are unaffected.
std::vector<int> detector_labels(const Scene& scene, const NoiseProfile& noise, Rng& rng);

// instance_labels, when given, replaces the per-ray confusion draw with the
// hit instance's fixed label.
Observation observe(const SceneView& view, const Pose& pose, const CameraModel& camera,
                    const NoiseProfile& noise, Rng& rng, int step_index = 0,
                    const std::vector<int>* instance_labels = nullptr);
Observation observe(const Scene& scene, const Pose& pose, const CameraModel& camera,
                    const NoiseProfile& noise, Rng& rng, int step_index = 0);

struct MoveResult {
  Pose pose;
  bool collided = false;
  Cell blocked{-1, -1};  // scene cell that stopped the sweep, if any
};

MoveResult apply_action(const Scene& scene, const Pose& pose, ActionKind cmd,
                        const NoiseProfile& noise, Rng& rng);

// Monte-Carlo P(reported category == true category | category visible),
// estimated over n_frames random valid poses. Returns one rate per
// category; categories never seen in any frame report -1.
std::vector<double> segmentation_quality(const NoiseProfile& noise, const Scene& scene,
                                         const CameraModel& camera, int n_categories,
                                         int n_frames, Rng& rng);

}  // namespace objnav
