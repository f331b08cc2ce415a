#include "objnav/explore.hpp"

#include "objnav/planner.hpp"

#include <cmath>
#include <limits>

namespace objnav {

std::vector<Cell> frontier_cells(const SemanticMap& map) {
  std::vector<Cell> out;
  const GridWindow box = set_bbox(map.explored);
  for (int row = box.row_lo; row <= box.row_hi; ++row) {
    for (int col = box.col_lo; col <= box.col_hi; ++col) {
      if (!map.explored(row, col) || map.obstacle(row, col)) continue;
      bool boundary = false;
      for (int k = 0; k < 4 && !boundary; ++k) {
        Cell nb{row + k_d4_row[k], col + k_d4_col[k]};
        if (in_bounds(map.M, map.M, nb) && !map.explored(nb.row, nb.col)) boundary = true;
      }
      if (boundary) out.push_back({row, col});
    }
  }
  return out;
}

namespace {

GridU8 free_space(const SemanticMap& map) {
  return (map.obstacle == 0).cast<std::uint8_t>();
}

GridU8 cell_mask(int M, const std::vector<Cell>& cells) {
  GridU8 mask = GridU8::Zero(M, M);
  for (const Cell& c : cells) mask(c.row, c.col) = 1;
  return mask;
}

}  // namespace

Cell frontier_goal(const SemanticMap& map, Cell agent_cell) {
  std::vector<Cell> frontier = frontier_cells(map);
  if (frontier.empty()) throw NoFrontierError("no frontier cells remain");
  // The front finalizes cells in (value, row-major) order, so the first
  // finalized frontier cell is the geodesic argmin with the right
  // tie-break, and the solve can stop there.
  std::vector<Cell> found;
  distance_field_until(free_space(map), {agent_cell}, map.cell_size,
                       cell_mask(map.M, frontier), 1, &found);
  if (found.empty()) throw NoFrontierError("no reachable frontier cell");
  return found[0];
}

void validate_priors(const CategoryPriors& priors, int n_categories) {
  if (static_cast<int>(priors.affinity.size()) != n_categories) {
    throw InvariantError("priors affinity must be CxC");
  }
  for (const auto& row : priors.affinity) {
    if (static_cast<int>(row.size()) != n_categories) {
      throw InvariantError("priors affinity must be CxC");
    }
    for (double w : row) {
      if (!std::isfinite(w) || w < 0.0) throw InvariantError("priors affinity entries must be finite and nonnegative");
    }
  }
  if (!(priors.lambda_m > 0.0)) throw InvariantError("priors lambda must be positive");
  if (!std::isfinite(priors.beta_per_m) || priors.beta_per_m < 0.0) {
    throw InvariantError("priors beta must be finite and nonnegative");
  }
}

CategoryPriors default_priors(const CategorySet& categories) {
  const int C = categories.size();
  CategoryPriors p;
  p.affinity.assign(static_cast<size_t>(C), std::vector<double>(static_cast<size_t>(C), 0.0));
  for (int c = 0; c < C; ++c) p.affinity[c][c] = 1.0;
  auto set = [&](const char* a, const char* b, double w) {
    auto ia = categories.index_of(a);
    auto ib = categories.index_of(b);
    if (ia && ib) {
      p.affinity[static_cast<size_t>(*ia)][static_cast<size_t>(*ib)] = w;
      p.affinity[static_cast<size_t>(*ib)][static_cast<size_t>(*ia)] = w;
    }
  };
  set("tv", "couch", 0.7);
  set("bed", "chair", 0.4);
  set("chair", "couch", 0.3);
  set("potted_plant", "tv", 0.2);
  return p;
}

Cell prior_goal(const SemanticMap& map, Cell agent_cell, int goal_category,
                const CategoryPriors& priors) {
  if (goal_category < 0 || goal_category >= map.C) {
    throw std::out_of_range("prior_goal: goal category");
  }
  std::vector<Cell> frontier = frontier_cells(map);
  if (frontier.empty()) throw NoFrontierError("no frontier cells remain");
  DistanceField field =
      distance_field_until(free_space(map), {agent_cell}, map.cell_size,
                           cell_mask(map.M, frontier), static_cast<int>(frontier.size()), nullptr);

  std::vector<std::vector<Cell>> cat_cells(static_cast<size_t>(map.C));
  for (int c = 0; c < map.C; ++c) {
    if (priors.affinity[static_cast<size_t>(goal_category)][static_cast<size_t>(c)] > 0.0) {
      cat_cells[static_cast<size_t>(c)] = goal_cells(map, c);
    }
  }

  const Cell* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const Cell& f : frontier) {
    double d_geo = field.values(f.row, f.col);
    if (!std::isfinite(d_geo)) continue;
    double score = -priors.beta_per_m * d_geo;
    for (int c = 0; c < map.C; ++c) {
      double a = priors.affinity[static_cast<size_t>(goal_category)][static_cast<size_t>(c)];
      if (a <= 0.0 || cat_cells[static_cast<size_t>(c)].empty()) continue;
      double d2_min = std::numeric_limits<double>::infinity();
      for (const Cell& g : cat_cells[static_cast<size_t>(c)]) {
        double dr = f.row - g.row;
        double dc = f.col - g.col;
        d2_min = std::min(d2_min, dr * dr + dc * dc);
      }
      double d_m = std::sqrt(d2_min) * map.cell_size;
      score += a * std::exp(-d_m / priors.lambda_m);
    }
    if (score > best_score) {
      best_score = score;
      best = &f;
    }
  }
  if (!best) throw NoFrontierError("no reachable frontier cell");
  return *best;
}

Cell RandomPolicy::select_goal(const SemanticMap& map, Cell, int) {
  std::vector<Cell> frontier = frontier_cells(map);
  if (frontier.empty()) throw NoFrontierError("no frontier cells remain");
  auto idx = rng_.uniform_int(0, static_cast<std::int64_t>(frontier.size()) - 1);
  return frontier[static_cast<size_t>(idx)];
}

std::unique_ptr<ExplorationPolicy> make_policy(const std::string& name,
                                               const CategoryPriors& priors, Rng rng) {
  if (name == "frontier") return std::make_unique<FrontierPolicy>();
  if (name == "prior") return std::make_unique<PriorPolicy>(priors);
  if (name == "random") return std::make_unique<RandomPolicy>(rng);
  throw std::invalid_argument("unknown policy: " + name);
}

GoalSelection goal_or_explore(const SemanticMap& map, Cell agent_cell, int goal_category,
                              ExplorationPolicy& policy) {
  GoalSelection out;
  out.cells = goal_cells(map, goal_category);
  if (!out.cells.empty()) {
    out.mode = GoalMode::exploit;
    return out;
  }
  out.mode = GoalMode::explore;
  out.cells = {policy.select_goal(map, agent_cell, goal_category)};
  return out;
}

}  // namespace objnav
