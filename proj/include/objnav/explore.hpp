#pragma once

#include "objnav/rng.hpp"
#include "objnav/semmap.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

struct NoFrontierError : std::runtime_error {
  explicit NoFrontierError(const std::string& what) : std::runtime_error(what) {}
};

// Explored, non-obstacle cells 4-adjacent to at least one in-bounds
// unexplored cell. Sorted row-major.
std::vector<Cell> frontier_cells(const SemanticMap& map);

// Reachable frontier cell with minimal geodesic distance from agent_cell
// over map free space; row-major tie-break. Throws NoFrontierError when no
// reachable frontier exists (exploration exhausted).
Cell frontier_goal(const SemanticMap& map, Cell agent_cell);

struct CategoryPriors {
  std::vector<std::vector<double>> affinity;  // [goal][observed], nonnegative
  double lambda_m = 2.0;
  double beta_per_m = 0.05;
};

void validate_priors(const CategoryPriors& priors, int n_categories);

// Identity-dominant affinities plus a few cross-category weights for
// commonly co-located furniture; rows indexed by the default category set.
CategoryPriors default_priors(const CategorySet& categories);

// Frontier cell maximizing
//   sum_c affinity[goal][c] * exp(-d_euclid(f, nearest cat_c cell) / lambda)
//     - beta * d_geo(agent, f)
// with distances in meters; row-major tie-break; unreachable frontier
// cells are skipped. Throws NoFrontierError.
Cell prior_goal(const SemanticMap& map, Cell agent_cell, int goal_category,
                const CategoryPriors& priors);

class ExplorationPolicy {
 public:
  virtual ~ExplorationPolicy() = default;
  virtual Cell select_goal(const SemanticMap& map, Cell agent_cell, int goal_category) = 0;
  virtual int resample_period() const = 0;
  virtual std::string name() const = 0;
};

class FrontierPolicy : public ExplorationPolicy {
 public:
  Cell select_goal(const SemanticMap& map, Cell agent_cell, int) override {
    return frontier_goal(map, agent_cell);
  }
  int resample_period() const override { return 1; }
  std::string name() const override { return "frontier"; }
};

class PriorPolicy : public ExplorationPolicy {
 public:
  explicit PriorPolicy(CategoryPriors priors) : priors_(std::move(priors)) {}
  Cell select_goal(const SemanticMap& map, Cell agent_cell, int goal_category) override {
    return prior_goal(map, agent_cell, goal_category, priors_);
  }
  int resample_period() const override { return 25; }
  std::string name() const override { return "prior"; }
  const CategoryPriors& priors() const { return priors_; }

 private:
  CategoryPriors priors_;
};

class RandomPolicy : public ExplorationPolicy {
 public:
  explicit RandomPolicy(Rng rng) : rng_(rng) {}
  Cell select_goal(const SemanticMap& map, Cell agent_cell, int goal_category) override;
  int resample_period() const override { return 25; }
  std::string name() const override { return "random"; }

 private:
  Rng rng_;
};

std::unique_ptr<ExplorationPolicy> make_policy(const std::string& name,
                                               const CategoryPriors& priors, Rng rng);

enum class GoalMode { exploit, explore };

struct GoalSelection {
  std::vector<Cell> cells;
  GoalMode mode = GoalMode::explore;
};

// Mapped goal cells when any exist (exploit), else a single exploration
// goal from the policy (explore).
GoalSelection goal_or_explore(const SemanticMap& map, Cell agent_cell, int goal_category,
                              ExplorationPolicy& policy);

}  // namespace objnav
