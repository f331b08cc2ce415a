#pragma once

#include "objnav/explore.hpp"
#include "objnav/planner.hpp"
#include "objnav/scene.hpp"
#include "objnav/semmap.hpp"
#include "objnav/sensors.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace objnav {

struct EpisodeSpec {
  std::string scene_id;
  Pose start;
  int goal_category = 0;
  int max_steps = 500;
  int max_collisions = 20;
  double success_radius = 1.0;
  std::uint64_t seed = 0;
};

enum class FailureClass { none, timeout, collision_budget, false_stop };
const char* failure_class_name(FailureClass fc);
FailureClass failure_class_from_name(const std::string& name);

struct TraceStep {
  int step = 0;
  Pose pose;
  ActionKind action = ActionKind::stop;
  GoalMode mode = GoalMode::explore;
  Cell goal{};
  int collisions = 0;
  bool stuck = false;
};

struct EpisodeResult {
  bool success = false;
  double agent_path_length = 0.0;
  double shortest_path_length = 0.0;
  int steps = 0;
  int collisions = 0;
  bool stop_called = false;
  double terminal_distance_to_goal = 0.0;
  FailureClass failure_class = FailureClass::none;
  // Diagnostics the attribution pass reads.
  bool exploration_exhausted = false;
  int stuck_events = 0;
  int unreachable_events = 0;
  std::vector<TraceStep> trace;
};

struct PipelineConfig {
  CameraModel camera;
  int n_categories = 6;
  std::string policy = "prior";  // frontier | prior | random
  CategoryPriors priors;
  bool denoise_enabled = true;
  DenoiseParams denoise{};
  int map_m = 481;
  int dilation_radius = 2;
  double stop_margin = 0.1;
  // Attribution rerun knob: replaces per-ray semantics with ground truth
  // (seg_miss = 0, identity confusion). Depth noise is untouched.
  bool oracle_segmentation = false;
};

// One sense->map->select->plan cycle per call. Owns the episode's mutable
// state (map, goal cache, fallback bookkeeping).
class Pipeline {
 public:
  Pipeline(const EpisodeSpec& spec, const PipelineConfig& cfg, Rng policy_rng);

  struct Decision {
    ActionKind action = ActionKind::stop;
    GoalMode mode = GoalMode::explore;
    Cell goal{};
    bool stuck = false;
  };

  Decision step(const Observation& obs);

  // Collision feedback: blocks the cell one sweep sub-step past the halted
  // pose so the planner stops replaying the same bump.
  void note_collision(const Pose& halted, Cell scene_blocked, double scene_cell_size);

  const SemanticMap& map() const { return map_; }
  bool exploration_exhausted() const { return exhausted_; }
  int stuck_events() const { return stuck_events_; }
  int unreachable_events() const { return unreachable_events_; }

 private:
  GridU8 planning_mask(const std::vector<Cell>& goals, Cell agent, int radius) const;
  // NoFrontier handling: spin in place, then patrol a visited cell. Returns
  // the action to emit now, or nullopt once a patrol goal landed in the cache.
  std::optional<ActionKind> fallback(Cell agent);
  std::optional<Cell> pick_patrol(Cell agent);
  // Writes off an explore goal that survived a full in-place scan or is
  // sealed behind confirmed obstacles even undilated.
  void reject_goal(Cell g);
  Decision explore_arrival(const Pose& pose, Cell goal);

  EpisodeSpec spec_;
  PipelineConfig cfg_;
  SemanticMap map_;
  std::unique_ptr<ExplorationPolicy> policy_;
  Rng policy_rng_;
  Cell cached_goal_{};
  int cached_age_ = 0;
  bool cache_valid_ = false;
  bool patrolling_ = false;
  bool exhausted_ = false;
  int spin_left_ = 0;
  int stuck_events_ = 0;
  int unreachable_events_ = 0;
  GridU8 bumped_;
  GridU8 rejected_;
  Cell last_arrived_{-1, -1};
  int arrive_spins_ = 0;
  Cell facing_goal_{-1, -1};
};

// Odd map side that covers every pose the scene can produce from this
// start, never smaller than the configured default.
int required_map_side(const Scene& scene, int configured);

void validate_spec(const Scene& scene, const EpisodeSpec& spec, int n_categories);

// Called after each pipeline step with the step index and the live
// pipeline (for map snapshots during replay).
using StepHook = std::function<void(int, const Pipeline&)>;

EpisodeResult run_episode(const Scene& scene, const SceneView& view, const EpisodeSpec& spec,
                          const PipelineConfig& cfg, const NoiseProfile& noise,
                          bool with_trace = false, SemanticMap* final_map = nullptr,
                          const StepHook& on_step = {});
EpisodeResult run_episode(const Scene& scene, const EpisodeSpec& spec, const PipelineConfig& cfg,
                          const NoiseProfile& noise, bool with_trace = false);

}  // namespace objnav
