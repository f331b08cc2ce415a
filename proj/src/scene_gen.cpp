#include "objnav/scene_gen.hpp"

#include "objnav/grid.hpp"
#include "objnav/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace objnav {

namespace {

constexpr int k_min_room_dim = 34;
constexpr int k_door_clearance = 6;
constexpr int k_scene_attempts = 20;
constexpr int k_place_tries = 40;

struct Leaf {
  int r0, r1, c0, c1;
  int type = -1;
  int rows() const { return r1 - r0 + 1; }
  int cols() const { return c1 - c0 + 1; }
  long area() const { return static_cast<long>(rows()) * cols(); }
};

struct Footprint {
  int rows;
  int cols;
  bool wall_snap;
};

Footprint footprint_for(const std::string& name) {
  if (name == "chair") return {6, 6, false};
  if (name == "couch") return {8, 16, true};
  if (name == "potted_plant") return {4, 4, false};
  if (name == "toilet") return {6, 8, true};
  if (name == "tv") return {3, 12, true};
  if (name == "bed") return {16, 24, true};
  return {6, 6, false};
}

int room_type_index(const std::string& name) {
  const auto& names = room_type_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

struct BuildFailure {};

Scene build_home(Rng& rng, const GenParams& params, const CategorySet& categories,
                 std::uint64_t seed) {
  const int W = static_cast<int>(rng.uniform_int(params.width_min, params.width_max));
  const int H = static_cast<int>(rng.uniform_int(params.height_min, params.height_max));

  Scene scene;
  scene.id = "home-" + std::to_string(seed);
  scene.width = W;
  scene.height = H;
  scene.cell_size = params.cell_size;
  scene.traversable = GridU8::Zero(H, W);
  scene.traversable.block(1, 1, H - 2, W - 2).setConstant(1);

  GridU8 door_mask = GridU8::Zero(H, W);

  std::vector<Leaf> leaves = {{1, H - 2, 1, W - 2}};
  const int target_rooms =
      static_cast<int>(rng.uniform_int(params.min_rooms, params.max_rooms));

  auto splittable_cols = [](const Leaf& l) { return l.cols() >= 2 * k_min_room_dim + 1; };
  auto splittable_rows = [](const Leaf& l) { return l.rows() >= 2 * k_min_room_dim + 1; };

  while (static_cast<int>(leaves.size()) < target_rooms) {
    int pick = -1;
    long best = -1;
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (!splittable_cols(leaves[i]) && !splittable_rows(leaves[i])) continue;
      if (leaves[i].area() > best) {
        best = leaves[i].area();
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) break;
    Leaf leaf = leaves[static_cast<size_t>(pick)];

    bool vertical;  // wall along a column
    if (splittable_cols(leaf) && (!splittable_rows(leaf) || leaf.cols() >= leaf.rows())) {
      vertical = true;
    } else {
      vertical = false;
    }

    if (vertical) {
      int pos = static_cast<int>(rng.uniform_int(leaf.c0 + k_min_room_dim, leaf.c1 - k_min_room_dim));
      for (int r = leaf.r0; r <= leaf.r1; ++r) scene.traversable(r, pos) = 0;
      int span = leaf.rows();
      int dw = std::min(params.door_width, span);
      int start = static_cast<int>(rng.uniform_int(leaf.r0, leaf.r1 - dw + 1));
      for (int r = start; r < start + dw; ++r) {
        scene.traversable(r, pos) = 1;
        door_mask(r, pos) = 1;
      }
      leaves[static_cast<size_t>(pick)] = {leaf.r0, leaf.r1, leaf.c0, pos - 1};
      leaves.push_back({leaf.r0, leaf.r1, pos + 1, leaf.c1});
    } else {
      int pos = static_cast<int>(rng.uniform_int(leaf.r0 + k_min_room_dim, leaf.r1 - k_min_room_dim));
      for (int c = leaf.c0; c <= leaf.c1; ++c) scene.traversable(pos, c) = 0;
      int span = leaf.cols();
      int dw = std::min(params.door_width, span);
      int start = static_cast<int>(rng.uniform_int(leaf.c0, leaf.c1 - dw + 1));
      for (int c = start; c < start + dw; ++c) {
        scene.traversable(pos, c) = 1;
        door_mask(pos, c) = 1;
      }
      leaves[static_cast<size_t>(pick)] = {leaf.r0, pos - 1, leaf.c0, leaf.c1};
      leaves.push_back({pos + 1, leaf.r1, leaf.c0, leaf.c1});
    }
  }

  if (leaves.size() < 3) throw BuildFailure{};

  // Guarantee one bedroom, livingroom, and bathroom; the rest are typed at
  // random so every default category has a home.
  std::vector<int> order(leaves.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  const int n_types = static_cast<int>(room_type_names().size());
  for (size_t i = 0; i < order.size(); ++i) {
    leaves[static_cast<size_t>(order[i])].type =
        i < 3 ? static_cast<int>(i) : static_cast<int>(rng.uniform_int(0, n_types - 1));
  }

  const GridU8 door_block = morphology::dilate(door_mask, k_door_clearance);
  GridU8 object_mask_grid = GridU8::Zero(H, W);

  auto rect_ok = [&](int r, int c, int rows, int cols) {
    for (int rr = r - 1; rr <= r + rows; ++rr) {
      for (int cc = c - 1; cc <= c + cols; ++cc) {
        bool inside = rr >= r && rr < r + rows && cc >= c && cc < c + cols;
        if (inside) {
          if (!scene.traversable(rr, cc) || door_block(rr, cc)) return false;
        }
        if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
        if (object_mask_grid(rr, cc)) return false;
      }
    }
    return true;
  };

  int next_id = 1;
  for (int cat = 0; cat < categories.size(); ++cat) {
    const Footprint base = footprint_for(categories.name(cat));
    const auto& weights_row = params.placement[static_cast<size_t>(cat)];
    std::vector<double> leaf_w(leaves.size());
    double total = 0.0;
    for (size_t i = 0; i < leaves.size(); ++i) {
      leaf_w[i] = weights_row[static_cast<size_t>(leaves[i].type)];
      total += leaf_w[i];
    }
    if (total <= 0.0) throw BuildFailure{};

    const int n = static_cast<int>(rng.uniform_int(params.instances_min, params.instances_max));
    int placed = 0;
    for (int k = 0; k < n; ++k) {
      for (int attempt = 0; attempt < k_place_tries; ++attempt) {
        const Leaf& leaf = leaves[static_cast<size_t>(rng.weighted_index(leaf_w))];
        Footprint fp = base;
        if (rng.bernoulli(0.5)) std::swap(fp.rows, fp.cols);

        int r, c;
        if (fp.wall_snap) {
          int side = static_cast<int>(rng.uniform_int(0, 3));
          if (side == 0 || side == 1) {  // south or north wall
            r = side == 0 ? leaf.r0 : leaf.r1 - fp.rows + 1;
            int lo = leaf.c0 + 1, hi = leaf.c1 - fp.cols;
            if (lo > hi) continue;
            c = static_cast<int>(rng.uniform_int(lo, hi));
          } else {  // west or east wall
            c = side == 2 ? leaf.c0 : leaf.c1 - fp.cols + 1;
            int lo = leaf.r0 + 1, hi = leaf.r1 - fp.rows;
            if (lo > hi) continue;
            r = static_cast<int>(rng.uniform_int(lo, hi));
          }
          if (r < leaf.r0 || r + fp.rows - 1 > leaf.r1) continue;
        } else {
          int rlo = leaf.r0 + 1, rhi = leaf.r1 - fp.rows;
          int clo = leaf.c0 + 1, chi = leaf.c1 - fp.cols;
          if (rlo > rhi || clo > chi) continue;
          r = static_cast<int>(rng.uniform_int(rlo, rhi));
          c = static_cast<int>(rng.uniform_int(clo, chi));
        }
        if (!rect_ok(r, c, fp.rows, fp.cols)) continue;

        ObjectInstance obj;
        obj.instance_id = next_id++;
        obj.category = cat;
        for (int rr = r; rr < r + fp.rows; ++rr) {
          for (int cc = c; cc < c + fp.cols; ++cc) {
            obj.cells.push_back({rr, cc});
            scene.traversable(rr, cc) = 0;
            object_mask_grid(rr, cc) = 1;
          }
        }
        scene.objects.push_back(std::move(obj));
        ++placed;
        break;
      }
    }
    if (placed == 0) throw BuildFailure{};
  }

  // Mirrors on bedroom walls; runs that would cross a doorway are skipped.
  if (params.mirrors) {
    auto tv_cat = categories.index_of("tv");
    for (const Leaf& leaf : leaves) {
      if (leaf.type != room_type_index("bedroom")) continue;
      if (!rng.bernoulli(params.mirror_prob)) continue;
      int side = static_cast<int>(rng.uniform_int(0, 3));
      int len = static_cast<int>(rng.uniform_int(8, 16));
      ReflectiveSurface surf;
      surf.mode = ReflectiveMode::mirror;
      bool ok = true;
      if (side == 0 || side == 1) {
        int wall_row = side == 0 ? leaf.r0 - 1 : leaf.r1 + 1;
        len = std::min(len, leaf.cols() - 2);
        if (len < 4) continue;
        int start = static_cast<int>(rng.uniform_int(leaf.c0 + 1, leaf.c1 - len));
        for (int cc = start; cc < start + len && ok; ++cc) {
          if (scene.traversable(wall_row, cc)) ok = false;
        }
        if (!ok) continue;
        for (int cc = start; cc < start + len; ++cc) surf.cells.push_back({wall_row, cc});
        double y = (side == 0 ? leaf.r0 : leaf.r1 + 1) * params.cell_size;
        surf.mirror_axis = {start * params.cell_size, y, (start + len) * params.cell_size, y};
      } else {
        int wall_col = side == 2 ? leaf.c0 - 1 : leaf.c1 + 1;
        len = std::min(len, leaf.rows() - 2);
        if (len < 4) continue;
        int start = static_cast<int>(rng.uniform_int(leaf.r0 + 1, leaf.r1 - len));
        for (int rr = start; rr < start + len && ok; ++rr) {
          if (scene.traversable(rr, wall_col)) ok = false;
        }
        if (!ok) continue;
        for (int rr = start; rr < start + len; ++rr) surf.cells.push_back({rr, wall_col});
        double x = (side == 2 ? leaf.c0 : leaf.c1 + 1) * params.cell_size;
        surf.mirror_axis = {x, start * params.cell_size, x, (start + len) * params.cell_size};
      }
      scene.reflective.push_back(std::move(surf));
    }

    if (tv_cat) {
      for (const auto& obj : scene.objects) {
        if (obj.category != *tv_cat) continue;
        if (!rng.bernoulli(params.tv_reflective_prob)) continue;
        ReflectiveSurface surf;
        surf.mode = ReflectiveMode::beyond_range;
        surf.cells = obj.cells;
        scene.reflective.push_back(std::move(surf));
      }
    }
  }

  // Keep the largest 4-connected free component; fill stray pockets.
  GridU8 visited = GridU8::Zero(H, W);
  GridU8 main_comp;
  long main_size = 0;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!scene.traversable(r, c) || visited(r, c)) continue;
      GridU8 comp = flood_fill(scene.traversable, {r, c});
      long size = comp.cast<long>().sum();
      visited = visited.max(comp);
      if (size > main_size) {
        main_size = size;
        main_comp = comp;
      }
    }
  }
  if (main_size < static_cast<long>(0.3 * (H - 2) * (W - 2))) throw BuildFailure{};
  scene.traversable = main_comp;

  for (const auto& obj : scene.objects) {
    bool adjacent = false;
    for (const Cell& cell : obj.cells) {
      for (int k = 0; k < 4 && !adjacent; ++k) {
        Cell nb{cell.row + k_d4_row[k], cell.col + k_d4_col[k]};
        if (in_bounds(H, W, nb) && scene.traversable(nb.row, nb.col)) adjacent = true;
      }
      if (adjacent) break;
    }
    if (!adjacent) throw BuildFailure{};
  }

  validate_scene(scene, categories);
  return scene;
}

}  // namespace

GenParams default_gen_params(const CategorySet& categories) {
  GenParams p;
  const int n_types = static_cast<int>(room_type_names().size());
  p.placement.assign(static_cast<size_t>(categories.size()),
                     std::vector<double>(static_cast<size_t>(n_types), 0.0));
  auto set = [&](const char* cat, const char* room, double w) {
    auto ci = categories.index_of(cat);
    int ri = room_type_index(room);
    if (ci && ri >= 0) p.placement[static_cast<size_t>(*ci)][static_cast<size_t>(ri)] = w;
  };
  set("chair", "bedroom", 0.3);
  set("chair", "livingroom", 0.5);
  set("chair", "kitchen", 0.3);
  set("chair", "hall", 0.1);
  set("couch", "livingroom", 1.0);
  set("potted_plant", "livingroom", 0.5);
  set("potted_plant", "hall", 0.3);
  set("potted_plant", "bedroom", 0.2);
  set("toilet", "bathroom", 1.0);
  set("tv", "livingroom", 1.0);
  set("tv", "bedroom", 0.2);
  set("bed", "bedroom", 1.0);
  for (auto& row : p.placement) {
    if (std::accumulate(row.begin(), row.end(), 0.0) <= 0.0) row.assign(row.size(), 1.0);
  }
  return p;
}

Scene generate_home(std::uint64_t seed, const GenParams& params, const CategorySet& categories) {
  if (params.width_min < 80 || params.height_min < 80 || params.width_max < params.width_min ||
      params.height_max < params.height_min) {
    throw std::invalid_argument("generate_home: bad dimension range");
  }
  if (params.min_rooms < 1 || params.max_rooms < params.min_rooms) {
    throw std::invalid_argument("generate_home: bad room range");
  }
  if (params.door_width < 1) throw std::invalid_argument("generate_home: bad door width");
  if (params.instances_min < 1 || params.instances_max < params.instances_min) {
    throw std::invalid_argument("generate_home: bad instance range");
  }
  if (static_cast<int>(params.placement.size()) != categories.size()) {
    throw std::invalid_argument("generate_home: placement rows must match categories");
  }
  for (const auto& row : params.placement) {
    if (row.size() != room_type_names().size()) {
      throw std::invalid_argument("generate_home: placement row size");
    }
  }

  for (int attempt = 0; attempt < k_scene_attempts; ++attempt) {
    Rng rng(seed, 0x67656e00ULL + static_cast<std::uint64_t>(attempt));
    try {
      return build_home(rng, params, categories, seed);
    } catch (const BuildFailure&) {
      continue;
    } catch (const InvariantError&) {
      continue;
    }
  }
  throw GenerationError("could not generate a valid home for seed " + std::to_string(seed));
}

}  // namespace objnav
