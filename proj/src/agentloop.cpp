#include "objnav/agentloop.hpp"

#include "objnav/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace objnav {

namespace {

constexpr int k_spin_steps = 12;  // full revolution at 30 deg per turn
constexpr double k_patrol_min_dist_m = 1.0;

double distance_to_category(const Scene& scene, const Pose& pose, int category) {
  double best = std::numeric_limits<double>::infinity();
  for (const ObjectInstance& obj : scene.objects) {
    if (obj.category != category) continue;
    for (const Cell& c : obj.cells) {
      double cx = (c.col + 0.5) * scene.cell_size;
      double cy = (c.row + 0.5) * scene.cell_size;
      best = std::min(best, std::hypot(pose.x - cx, pose.y - cy));
    }
  }
  return best;
}

}  // namespace

const char* failure_class_name(FailureClass fc) {
  switch (fc) {
    case FailureClass::none: return "none";
    case FailureClass::timeout: return "timeout";
    case FailureClass::collision_budget: return "collision_budget";
    case FailureClass::false_stop: return "false_stop";
  }
  return "none";
}

FailureClass failure_class_from_name(const std::string& name) {
  if (name == "none") return FailureClass::none;
  if (name == "timeout") return FailureClass::timeout;
  if (name == "collision_budget") return FailureClass::collision_budget;
  if (name == "false_stop") return FailureClass::false_stop;
  throw std::invalid_argument("unknown failure class: " + name);
}

Pipeline::Pipeline(const EpisodeSpec& spec, const PipelineConfig& cfg, Rng policy_rng)
    : spec_(spec), cfg_(cfg), policy_rng_(policy_rng) {
  int confirm = cfg_.denoise_enabled ? cfg_.denoise.obstacle_confirm : 1;
  map_ = new_map(cfg_.n_categories, cfg_.map_m, 0.05, spec.start.x, spec.start.y, confirm);
  policy_ = make_policy(cfg_.policy, cfg_.priors, Rng(policy_rng_.next_u64()));
  bumped_ = GridU8::Zero(map_.M, map_.M);
  rejected_ = GridU8::Zero(map_.M, map_.M);
}

void Pipeline::note_collision(const Pose& halted, Cell scene_blocked, double scene_cell_size) {
  double bx, by;
  if (scene_blocked.row >= 0) {
    // Bumper contact localized to the cell that stopped the sweep.
    bx = (scene_blocked.col + 0.5) * scene_cell_size;
    by = (scene_blocked.row + 0.5) * scene_cell_size;
  } else {
    bx = halted.x + std::cos(halted.heading) * map_.cell_size;
    by = halted.y + std::sin(halted.heading) * map_.cell_size;
  }
  Cell c = map_.cell_at(bx, by);
  if (!map_.contains(c)) return;
  if (std::getenv("OBJNAV_DEBUG")) {
    std::fprintf(stderr, "dbg bump cell=%d,%d agent=%d,%d head=%.3f obst=%d\n", c.row, c.col,
                 map_.current.row, map_.current.col, halted.heading,
                 int(map_.obstacle(c.row, c.col)));
  }
  bumped_(c.row, c.col) = 1;
  map_.explored(c.row, c.col) = 1;
}

void Pipeline::reject_goal(Cell g) {
  if (map_.contains(g)) rejected_(g.row, g.col) = 1;
}

Pipeline::Decision Pipeline::explore_arrival(const Pose& pose, Cell goal) {
  bool ended_patrol = patrolling_;
  cache_valid_ = false;
  patrolling_ = false;
  if (ended_patrol) {
    spin_left_ = k_spin_steps;
    return {ActionKind::turn_left, GoalMode::explore, goal, false};
  }
  Cell agent = map_.current;
  if (agent == goal) {
    // Standing on the goal cell: no bearing to face, fall back to a full
    // revolution before writing it off.
    if (agent == last_arrived_) {
      if (arrive_spins_ >= k_spin_steps) {
        reject_goal(goal);
      } else {
        ++arrive_spins_;
      }
    } else {
      last_arrived_ = agent;
      arrive_spins_ = 1;
    }
    return {ActionKind::turn_left, GoalMode::explore, goal, false};
  }
  // Face the goal cell. The next observation integrates before the policy
  // re-selects, so a frontier that is still chosen after being looked at
  // straight on is unobservable from reachable space; write it off. The
  // facing latch keeps descent turns from undoing the alignment mid-way.
  double gx = (goal.col + 0.5) * map_.cell_size;
  double gy = (goal.row + 0.5) * map_.cell_size;
  double bearing = std::atan2(gy - map_.map_y(pose.y), gx - map_.map_x(pose.x));
  double diff = std::remainder(bearing - pose.heading, 2.0 * M_PI);
  if (std::abs(diff) <= 0.5 * k_turn_step_rad + 1e-12) {
    reject_goal(goal);
    facing_goal_ = {-1, -1};
    return {ActionKind::turn_left, GoalMode::explore, goal, false};
  }
  facing_goal_ = goal;
  return {diff > 0 ? ActionKind::turn_left : ActionKind::turn_right, GoalMode::explore, goal,
          false};
}

GridU8 Pipeline::planning_mask(const std::vector<Cell>& goals, Cell agent, int radius) const {
  const int M = map_.M;
  const int rad = radius;
  GridU8 blocked = GridU8::Zero(M, M);
  GridWindow box = set_bbox(map_.obstacle);
  if (!box.empty() && rad > 0) {
    GridWindow grown = box.expanded(rad).clipped(M, M);
    GridU8 sub = map_.obstacle.block(grown.row_lo, grown.col_lo, grown.rows(), grown.cols());
    blocked.block(grown.row_lo, grown.col_lo, grown.rows(), grown.cols()) =
        morphology::dilate(sub, rad);
  } else {
    blocked = map_.obstacle;
  }
  // Dilation halos may seal the goal pocket or the agent's own cell; peel
  // them back there, keeping raw mapped obstacles blocked.
  auto relieve = [&](Cell center, int radius) {
    for (int r = center.row - radius; r <= center.row + radius; ++r) {
      if (r < 0 || r >= M) continue;
      for (int c = center.col - radius; c <= center.col + radius; ++c) {
        if (c < 0 || c >= M) continue;
        if (!map_.obstacle(r, c)) blocked(r, c) = 0;
      }
    }
  };
  for (const Cell& g : goals) relieve(g, rad + 1);
  relieve(agent, rad);
  GridU8 mask = (blocked == 0).cast<std::uint8_t>();
  mask(agent.row, agent.col) = 1;
  return mask;
}

std::optional<Cell> Pipeline::pick_patrol(Cell agent) {
  GridU8 mask = planning_mask({}, agent, cfg_.dilation_radius);
  DistanceField field = distance_field(mask, {agent}, map_.cell_size);
  GridWindow box = set_bbox(map_.explored);
  std::vector<Cell> far_pool;
  std::vector<Cell> near_pool;
  for (int r = box.row_lo; r <= box.row_hi; ++r) {
    for (int c = box.col_lo; c <= box.col_hi; ++c) {
      if (!map_.explored(r, c)) continue;
      double d = field.values(r, c);
      if (!std::isfinite(d) || d <= 0.0) continue;
      if (d >= k_patrol_min_dist_m) {
        far_pool.push_back({r, c});
      } else {
        near_pool.push_back({r, c});
      }
    }
  }
  const std::vector<Cell>& pool = far_pool.empty() ? near_pool : far_pool;
  if (pool.empty()) return std::nullopt;
  auto idx = policy_rng_.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1);
  return pool[static_cast<std::size_t>(idx)];
}

std::optional<ActionKind> Pipeline::fallback(Cell agent) {
  if (!exhausted_) {
    exhausted_ = true;
    spin_left_ = k_spin_steps;
  }
  if (spin_left_ > 0) {
    --spin_left_;
    return ActionKind::turn_left;
  }
  std::optional<Cell> target = pick_patrol(agent);
  if (!target) return ActionKind::turn_left;
  cached_goal_ = *target;
  cached_age_ = 0;
  cache_valid_ = true;
  patrolling_ = true;
  return std::nullopt;
}

Pipeline::Decision Pipeline::step(const Observation& obs) {
  integrate(map_, obs, cfg_.camera);
  if (cfg_.denoise_enabled) {
    GridWindow box = set_bbox(map_.explored);
    if (!box.empty()) {
      box = box.expanded(1).clipped(map_.M, map_.M);
      GridU8 sub = (map_.evidence.block(box.row_lo, box.col_lo, box.rows(), box.cols()) >=
                    static_cast<std::uint16_t>(cfg_.denoise.obstacle_confirm))
                       .cast<std::uint8_t>();
      int side = 2 * cfg_.denoise.opening_radius + 1;
      sub = morphology::remove_small_components(sub, side * side);
      map_.obstacle.setZero();
      map_.obstacle.block(box.row_lo, box.col_lo, box.rows(), box.cols()) = sub;
    }
  }
  // Collision-confirmed cells and written-off explore goals are obstacles
  // regardless of ray evidence; the opening must not erase them.
  map_.obstacle = map_.obstacle.max(bumped_).max(rejected_);

  const Cell agent = map_.current;
  std::vector<Cell> goals = goal_cells(map_, spec_.goal_category);
  GoalMode mode = GoalMode::exploit;
  if (!goals.empty()) {
    cache_valid_ = false;
    patrolling_ = false;
  } else {
    mode = GoalMode::explore;
    if (patrolling_ && cache_valid_) {
      goals = {cached_goal_};
    } else if (cache_valid_ && cached_age_ + 1 < policy_->resample_period()) {
      ++cached_age_;
      goals = {cached_goal_};
    } else {
      try {
        cached_goal_ = policy_->select_goal(map_, agent, spec_.goal_category);
        cached_age_ = 0;
        cache_valid_ = true;
        patrolling_ = false;
        goals = {cached_goal_};
      } catch (const NoFrontierError&) {
        std::optional<ActionKind> act = fallback(agent);
        if (act) return {*act, GoalMode::explore, agent, false};
        goals = {cached_goal_};
      }
    }
  }

  if (facing_goal_.row >= 0) {
    if (mode == GoalMode::explore && goals.front() == facing_goal_) {
      return explore_arrival(obs.pose, goals.front());
    }
    facing_goal_ = {-1, -1};
  }

  GridU8 target = GridU8::Zero(map_.M, map_.M);
  target(agent.row, agent.col) = 1;
  DistanceField field;
  bool planned = false;
  // Dilation halos can seal narrow passages; retry leaner before giving up.
  for (int rad = cfg_.dilation_radius; rad >= 0 && !planned; --rad) {
    GridU8 mask = planning_mask(goals, agent, rad);
    try {
      field = distance_field_until(mask, goals, map_.cell_size, target, 1);
      planned = std::isfinite(field.at(agent));
    } catch (const AllSourcesBlockedError&) {
    }
  }
  if (!planned) {
    ++unreachable_events_;
    if (mode == GoalMode::explore) return explore_arrival(obs.pose, goals.front());
    cache_valid_ = false;
    patrolling_ = false;
    return {ActionKind::turn_left, mode, goals.front(), false};
  }

  if (mode == GoalMode::exploit) {
    double v = field.at(agent);
    if (std::isfinite(v) && v <= spec_.success_radius - cfg_.stop_margin) {
      return {ActionKind::stop, mode, goals.front(), false};
    }
  } else {
    // One forward step of the goal counts as arrived; chasing the last few
    // centimeters of an unseeable sliver shuttles forever.
    double v = field.at(agent);
    if (std::isfinite(v) && v <= k_forward_step_m) return explore_arrival(obs.pose, goals.front());
  }

  PlannerPose pp{map_.map_x(obs.pose.x), map_.map_y(obs.pose.y), obs.pose.heading};
  // A pose on a cell boundary can floor into the neighbor cell; keep the
  // planner's cell assignment identical to the map's.
  const double h = map_.cell_size;
  const double eps = 1e-6 * h;
  pp.x = std::clamp(pp.x, agent.col * h + eps, (agent.col + 1) * h - eps);
  pp.y = std::clamp(pp.y, agent.row * h + eps, (agent.row + 1) * h - eps);
  NextStep ns = next_action(field, pp);
  if (std::getenv("OBJNAV_DEBUG")) {
    std::fprintf(
        stderr,
        "dbg step=%d mode=%d goal=%d,%d agent=%d,%d field_at=%.3f sig=%d wp=%d,%d head=%.3f\n",
        obs.step_index, static_cast<int>(mode), goals.front().row, goals.front().col, agent.row,
        agent.col, field.at(agent), static_cast<int>(ns.signal), ns.waypoint.row, ns.waypoint.col,
        obs.pose.heading);
  }
  switch (ns.signal) {
    case StepSignal::action:
      return {ns.action, mode, goals.front(), false};
    case StepSignal::at_goal:
      if (mode == GoalMode::exploit) return {ActionKind::stop, mode, goals.front(), false};
      return explore_arrival(obs.pose, goals.front());
    case StepSignal::stuck:
      ++stuck_events_;
      if (mode == GoalMode::explore) return explore_arrival(obs.pose, goals.front());
      cache_valid_ = false;
      patrolling_ = false;
      return {ActionKind::turn_left, mode, goals.front(), true};
    case StepSignal::unreachable:
      ++unreachable_events_;
      if (mode == GoalMode::explore) return explore_arrival(obs.pose, goals.front());
      cache_valid_ = false;
      patrolling_ = false;
      return {ActionKind::turn_left, mode, goals.front(), false};
  }
  return {ActionKind::turn_left, mode, goals.front(), false};
}

int required_map_side(const Scene& scene, int configured) {
  const double map_cell = 0.05;
  const double reach = CameraModel{}.max_range;
  double diag = std::hypot(scene.width * scene.cell_size, scene.height * scene.cell_size);
  int half = static_cast<int>(std::ceil((diag + reach) / map_cell)) + 2;
  int side = 2 * half + 1;
  if (configured < 3) configured = 3;
  if (configured % 2 == 0) ++configured;
  return std::max(side, configured);
}

void validate_spec(const Scene& scene, const EpisodeSpec& spec, int n_categories) {
  if (!spec.scene_id.empty() && spec.scene_id != scene.id) {
    throw InvariantError("episode scene_id does not match scene: " + spec.scene_id);
  }
  if (spec.goal_category < 0 || spec.goal_category >= n_categories) {
    throw InvariantError("episode goal_category out of range");
  }
  if (spec.max_steps <= 0) throw InvariantError("episode max_steps must be positive");
  if (spec.max_collisions < 0) throw InvariantError("episode max_collisions must be nonnegative");
  if (!(spec.success_radius > 0.0)) {
    throw InvariantError("episode success_radius must be positive");
  }
  if (!pose_valid(scene, spec.start)) throw InvariantError("episode start pose is not valid");
}

EpisodeResult run_episode(const Scene& scene, const SceneView& view, const EpisodeSpec& spec,
                          const PipelineConfig& cfg, const NoiseProfile& noise, bool with_trace,
                          SemanticMap* final_map, const StepHook& on_step) {
  validate_spec(scene, spec, cfg.n_categories);
  validate_noise(noise, cfg.n_categories);
  NearestGoal ng = nearest_goal_instance(scene, spec.start, spec.goal_category);

  PipelineConfig runcfg = cfg;
  runcfg.map_m = required_map_side(scene, cfg.map_m);
  NoiseProfile active = noise;
  if (cfg.oracle_segmentation) {
    active.seg_miss.clear();
    active.seg_confusion.clear();
  }

  Rng sensor_rng(spec.seed, 11);
  Rng actuation_rng(spec.seed, 22);
  Rng policy_rng(spec.seed, 33);
  Rng detector_rng(spec.seed, 44);
  std::vector<int> labels = detector_labels(scene, active, detector_rng);
  Pipeline pipeline(spec, runcfg, policy_rng);

  EpisodeResult res;
  res.shortest_path_length = ng.geodesic_distance;

  Pose pose = spec.start;
  FailureClass budget_failure = FailureClass::timeout;
  while (res.steps < spec.max_steps) {
    Observation obs =
        observe(view, pose, runcfg.camera, active, sensor_rng, res.steps, &labels);
    Pipeline::Decision d = pipeline.step(obs);
    if (with_trace) {
      res.trace.push_back({res.steps, pose, d.action, d.mode, d.goal, res.collisions, d.stuck});
    }
    if (on_step) on_step(res.steps, pipeline);
    ++res.steps;
    if (d.action == ActionKind::stop) {
      res.stop_called = true;
      break;
    }
    MoveResult mv = apply_action(scene, pose, d.action, active, actuation_rng);
    res.agent_path_length += std::hypot(mv.pose.x - pose.x, mv.pose.y - pose.y);
    pose = mv.pose;
    if (mv.collided) {
      if (std::getenv("OBJNAV_DEBUG")) {
        std::fprintf(stderr, "dbg coll pose=%.4f,%.4f head=%.3f blocked_scene=%d,%d\n", pose.x,
                     pose.y, pose.heading, mv.blocked.row, mv.blocked.col);
      }
      pipeline.note_collision(pose, mv.blocked, scene.cell_size);
      ++res.collisions;
      if (res.collisions > spec.max_collisions) {
        budget_failure = FailureClass::collision_budget;
        break;
      }
    }
  }

  res.terminal_distance_to_goal = distance_to_category(scene, pose, spec.goal_category);
  if (res.stop_called) {
    res.success = res.terminal_distance_to_goal <= spec.success_radius;
    res.failure_class = res.success ? FailureClass::none : FailureClass::false_stop;
  } else {
    res.success = false;
    res.failure_class = budget_failure;
  }
  res.exploration_exhausted = pipeline.exploration_exhausted();
  res.stuck_events = pipeline.stuck_events();
  res.unreachable_events = pipeline.unreachable_events();
  if (final_map) *final_map = pipeline.map();
  return res;
}

EpisodeResult run_episode(const Scene& scene, const EpisodeSpec& spec, const PipelineConfig& cfg,
                          const NoiseProfile& noise, bool with_trace) {
  SceneView view = make_scene_view(scene);
  return run_episode(scene, view, spec, cfg, noise, with_trace);
}

}  // namespace objnav
