#include "objnav/bench.hpp"

#include "objnav/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

namespace objnav {

namespace {

const Scene* find_scene(const std::vector<Scene>& scenes, const std::string& id) {
  for (const Scene& s : scenes)
    if (s.id == id) return &s;
  return nullptr;
}

std::vector<Cell> category_cells(const Scene& scene, int category) {
  std::vector<Cell> cells;
  for (const ObjectInstance& obj : scene.objects) {
    if (obj.category != category) continue;
    cells.insert(cells.end(), obj.cells.begin(), obj.cells.end());
  }
  return cells;
}

// Regularized incomplete beta, continued-fraction form (Lentz).
double betacf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 3e-14;
  const double fpmin = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
              b * std::log1p(-x);
  double bt = std::exp(ln);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

std::vector<DistanceBin> default_bins(int n) {
  std::vector<DistanceBin> bins = {{1.0, 5.0, 0}, {5.0, 10.0, 0}, {10.0, 15.0, 0}};
  int q = n / 3;
  int r = n % 3;
  for (int i = 0; i < 3; ++i) bins[static_cast<size_t>(i)].target = q + (i < r ? 1 : 0);
  return bins;
}

std::string episode_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ep-%06d", index);
  return buf;
}

EpisodeSet generate_episodes(const std::vector<Scene>& scenes, int n,
                             const std::vector<DistanceBin>& bins_in, std::uint64_t seed,
                             const CategorySet& categories, const GenerateParams& params) {
  if (scenes.empty()) throw std::invalid_argument("generate_episodes: no scenes");
  if (n <= 0) throw std::invalid_argument("generate_episodes: n must be positive");
  if (bins_in.empty()) throw std::invalid_argument("generate_episodes: no bins");
  const int C = categories.size();
  if (C <= 0) throw std::invalid_argument("generate_episodes: empty category set");

  std::vector<DistanceBin> bins = bins_in;
  int tsum = 0;
  for (const DistanceBin& b : bins) {
    if (!(b.hi_m > b.lo_m)) throw std::invalid_argument("generate_episodes: bad bin range");
    tsum += b.target;
  }
  if (tsum == 0) {
    int q = n / static_cast<int>(bins.size());
    int r = n % static_cast<int>(bins.size());
    for (size_t i = 0; i < bins.size(); ++i) bins[i].target = q + (static_cast<int>(i) < r ? 1 : 0);
  } else if (tsum != n) {
    throw std::invalid_argument("generate_episodes: bin targets do not sum to n");
  }

  Rng rng(seed, 0xbe);

  std::vector<int> cat_of(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) cat_of[static_cast<size_t>(i)] = i % C;
  for (int i = n - 1; i > 0; --i) {
    auto j = rng.uniform_int(0, i);
    std::swap(cat_of[static_cast<size_t>(i)], cat_of[static_cast<size_t>(j)]);
  }
  std::vector<int> bin_of;
  for (size_t b = 0; b < bins.size(); ++b)
    bin_of.insert(bin_of.end(), static_cast<size_t>(bins[b].target), static_cast<int>(b));
  for (int i = n - 1; i > 0; --i) {
    auto j = rng.uniform_int(0, i);
    std::swap(bin_of[static_cast<size_t>(i)], bin_of[static_cast<size_t>(j)]);
  }

  std::vector<std::vector<Cell>> free_cells(scenes.size());
  for (size_t s = 0; s < scenes.size(); ++s) {
    const Scene& sc = scenes[s];
    for (int r = 0; r < sc.height; ++r)
      for (int c = 0; c < sc.width; ++c)
        if (sc.traversable(r, c)) free_cells[s].push_back({r, c});
    if (free_cells[s].empty()) throw std::invalid_argument("generate_episodes: scene with no free cells");
  }

  // Union-source geodesic field per (scene, category), for cheap rejection
  // before the exact per-instance check.
  std::map<std::pair<size_t, int>, GridF> approx;
  auto approx_field = [&](size_t s, int cat) -> const GridF* {
    auto key = std::make_pair(s, cat);
    auto it = approx.find(key);
    if (it != approx.end()) return it->second.size() ? &it->second : nullptr;
    std::vector<Cell> cells = category_cells(scenes[s], cat);
    if (cells.empty()) {
      approx.emplace(key, GridF());
      return nullptr;
    }
    DistanceField f = distance_field(scenes[s].traversable, cells, scenes[s].cell_size);
    return &approx.emplace(key, std::move(f.values)).first->second;
  };

  EpisodeSet set;
  set.bins = bins;
  set.category_targets.assign(static_cast<size_t>(C), 0);
  for (int i = 0; i < n; ++i) ++set.category_targets[static_cast<size_t>(cat_of[static_cast<size_t>(i)])];

  for (int i = 0; i < n; ++i) {
    const int cat = cat_of[static_cast<size_t>(i)];
    const DistanceBin& bin = bins[static_cast<size_t>(bin_of[static_cast<size_t>(i)])];
    bool placed = false;
    for (int attempt = 0; attempt < params.tries_per_episode && !placed; ++attempt) {
      size_t s = static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(scenes.size()) - 1));
      const Scene& sc = scenes[s];
      const GridF* field = approx_field(s, cat);
      if (!field) continue;
      const std::vector<Cell>& pool = free_cells[s];
      Cell start = pool[static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
      double d0 = (*field)(start.row, start.col);
      if (!std::isfinite(d0) || d0 < bin.lo_m - 0.3 || d0 >= bin.hi_m + 0.3) continue;
      Pose pose{(start.col + 0.5) * sc.cell_size, (start.row + 0.5) * sc.cell_size,
                wrap_heading(static_cast<double>(rng.uniform_int(0, 11)) * k_turn_step_rad)};
      double d;
      try {
        d = nearest_goal_instance(sc, pose, cat).geodesic_distance;
      } catch (const std::exception&) {
        continue;
      }
      if (!std::isfinite(d) || d < bin.lo_m || d >= bin.hi_m || d <= params.success_radius) continue;
      EpisodeSpec spec;
      spec.scene_id = sc.id;
      spec.start = pose;
      spec.goal_category = cat;
      spec.max_steps = params.max_steps;
      spec.max_collisions = params.max_collisions;
      spec.success_radius = params.success_radius;
      spec.seed = Rng(seed, 0xe0000 + static_cast<std::uint64_t>(i)).next_u64();
      set.episodes.push_back(spec);
      set.shortest_m.push_back(d);
      placed = true;
    }
    if (!placed) {
      throw InfeasibleBinsError(
          "generate_episodes: no placement for category '" + categories.name(cat) + "' in bin [" +
          std::to_string(bin.lo_m) + ", " + std::to_string(bin.hi_m) + ") after " +
          std::to_string(params.tries_per_episode) + " tries");
    }
  }
  return set;
}

double success_rate(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("success_rate: empty results");
  int succ = 0;
  for (const ResultRow& r : rows) succ += r.result.success ? 1 : 0;
  return static_cast<double>(succ) / static_cast<double>(rows.size());
}

double spl(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("spl: empty results");
  double sum = 0.0;
  for (const ResultRow& r : rows) {
    if (!(r.result.shortest_path_length > 0.0))
      throw std::invalid_argument("spl: nonpositive shortest path for " + r.episode_id);
    if (!r.result.success) continue;
    double l = r.result.shortest_path_length;
    double p = r.result.agent_path_length;
    sum += l / std::max(p, l);
  }
  return sum / static_cast<double>(rows.size());
}

MetricsReport metrics_report(const std::vector<ResultRow>& rows) {
  MetricsReport rep;
  rep.n = static_cast<int>(rows.size());
  rep.sr = success_rate(rows);
  rep.spl = spl(rows);
  auto group = [&](auto key_fn) {
    std::map<std::string, std::vector<ResultRow>> groups;
    for (const ResultRow& r : rows) groups[key_fn(r)].push_back(r);
    std::vector<MetricsGroup> out;
    for (auto& [key, members] : groups) {
      MetricsGroup g;
      g.key = key;
      g.n = static_cast<int>(members.size());
      g.sr = success_rate(members);
      g.spl = spl(members);
      out.push_back(std::move(g));
    }
    return out;
  };
  rep.by_home = group([](const ResultRow& r) { return r.spec.scene_id; });
  rep.by_goal = group([](const ResultRow& r) { return r.goal; });
  return rep;
}

double srcc(const std::vector<int>& outcomes_a, const std::vector<int>& outcomes_b) {
  if (outcomes_a.size() != outcomes_b.size())
    throw std::invalid_argument("srcc: length mismatch");
  if (outcomes_a.empty()) throw std::invalid_argument("srcc: empty vectors");
  const size_t n = outcomes_a.size();
  bool const_a = true, const_b = true;
  for (size_t i = 1; i < n; ++i) {
    const_a = const_a && outcomes_a[i] == outcomes_a[0];
    const_b = const_b && outcomes_b[i] == outcomes_b[0];
  }
  if (const_a || const_b) return outcomes_a == outcomes_b ? 1.0 : 0.0;
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += outcomes_a[i];
    mb += outcomes_b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double da = outcomes_a[i] - ma;
    double db = outcomes_b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

double paired_t_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_pvalue: length mismatch");
  const size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired_t_pvalue: need at least 2 pairs");
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  if (var == 0.0) return mean > 0.0 ? 0.0 : 1.0;
  double t = mean / std::sqrt(var / static_cast<double>(n));
  double nu = static_cast<double>(n - 1);
  double x = nu / (nu + t * t);
  double tail = 0.5 * ibeta(nu / 2.0, 0.5, x);
  return t > 0.0 ? tail : 1.0 - tail;
}

ResultRow run_one(const Scene& scene, const SceneView& view, const EpisodeSpec& spec_in,
                  const BatchConfig& cfg, const CategorySet& categories,
                  const std::string& config_hash, bool with_trace) {
  ResultRow row;
  EpisodeSpec spec = spec_in;
  if (cfg.max_steps_override > 0) spec.max_steps = cfg.max_steps_override;
  row.spec = spec;
  row.config_hash = config_hash;
  if (spec.goal_category >= 0 && spec.goal_category < categories.size())
    row.goal = categories.name(spec.goal_category);
  try {
    row.result = run_episode(scene, view, spec, cfg.pipeline, cfg.noise, with_trace);
    row.klass = failure_class_name(row.result.failure_class);
  } catch (const std::exception& e) {
    row.result = EpisodeResult{};
    row.klass = "other";
    row.error = e.what();
  }
  return row;
}

std::vector<ResultRow> run_batch(const std::vector<Scene>& scenes, const EpisodeSet& set,
                                 const BatchConfig& cfg, const CategorySet& categories,
                                 const std::string& config_hash, int parallelism,
                                 bool with_trace) {
  const size_t n = set.episodes.size();
  std::vector<ResultRow> rows(n);
  if (n == 0) return rows;

  std::unordered_map<std::string, size_t> scene_idx;
  for (size_t s = 0; s < scenes.size(); ++s) scene_idx.emplace(scenes[s].id, s);
  std::vector<std::unique_ptr<SceneView>> views(scenes.size());
  for (const EpisodeSpec& spec : set.episodes) {
    auto it = scene_idx.find(spec.scene_id);
    if (it != scene_idx.end() && !views[it->second])
      views[it->second] = std::make_unique<SceneView>(make_scene_view(scenes[it->second]));
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      const EpisodeSpec& spec = set.episodes[i];
      auto it = scene_idx.find(spec.scene_id);
      if (it == scene_idx.end()) {
        ResultRow row;
        row.spec = spec;
        row.config_hash = config_hash;
        row.klass = "other";
        row.error = "scene not found: " + spec.scene_id;
        rows[i] = std::move(row);
      } else {
        rows[i] =
            run_one(scenes[it->second], *views[it->second], spec, cfg, categories, config_hash, with_trace);
      }
      rows[i].episode_id = episode_id(static_cast<int>(i));
    }
  };

  int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

DomainComparison compare_results(const std::vector<ResultRow>& rows_a,
                                 const std::vector<ResultRow>& rows_b) {
  std::map<std::string, const ResultRow*> by_id_a, by_id_b;
  for (const ResultRow& r : rows_a) by_id_a[r.episode_id] = &r;
  for (const ResultRow& r : rows_b) by_id_b[r.episode_id] = &r;
  std::string missing;
  int n_missing = 0;
  for (const auto& [id, row] : by_id_a)
    if (!by_id_b.count(id) && ++n_missing <= 8) missing += " " + id;
  for (const auto& [id, row] : by_id_b)
    if (!by_id_a.count(id) && ++n_missing <= 8) missing += " " + id;
  if (n_missing > 0)
    throw UnpairedEpisodesError("unpaired episode ids (" + std::to_string(n_missing) + "):" +
                                missing);

  std::vector<ResultRow> a, b;
  std::vector<int> oa, ob;
  for (const auto& [id, row] : by_id_a) {
    a.push_back(*row);
    b.push_back(*by_id_b.at(id));
    oa.push_back(row->result.success ? 1 : 0);
    ob.push_back(by_id_b.at(id)->result.success ? 1 : 0);
  }
  DomainComparison cmp;
  cmp.n = static_cast<int>(a.size());
  cmp.sr_a = success_rate(a);
  cmp.spl_a = spl(a);
  cmp.sr_b = success_rate(b);
  cmp.spl_b = spl(b);
  cmp.srcc = srcc(oa, ob);
  return cmp;
}

DomainComparison compare_domains(const std::vector<Scene>& scenes, const EpisodeSet& set,
                                 const BatchConfig& config_a, const BatchConfig& config_b,
                                 const CategorySet& categories, int parallelism) {
  std::vector<ResultRow> rows_a =
      run_batch(scenes, set, config_a, categories, "config-a", parallelism);
  std::vector<ResultRow> rows_b =
      run_batch(scenes, set, config_b, categories, "config-b", parallelism);
  return compare_results(rows_a, rows_b);
}

const char* attribution_class_name(AttributionClass ac) {
  switch (ac) {
    case AttributionClass::segmentation_error: return "segmentation_error";
    case AttributionClass::exploration_failure: return "exploration_failure";
    case AttributionClass::map_noise_error: return "map_noise_error";
    case AttributionClass::planning_error: return "planning_error";
    case AttributionClass::annotation_error: return "annotation_error";
    case AttributionClass::other: return "other";
  }
  return "other";
}

bool door_block_detected(const Scene& scene, const SemanticMap& map, const Pose& start,
                         int goal_category) {
  if (map.M <= 0) return false;
  NearestGoal ng;
  try {
    ng = nearest_goal_instance(scene, start, goal_category);
  } catch (const std::exception&) {
    return false;
  }

  Cell start_cell = scene_cell_of(scene, start.x, start.y);
  DistanceField gt = distance_field(scene.traversable, {start_cell}, scene.cell_size);
  Cell cur{};
  double best = std::numeric_limits<double>::infinity();
  for (const Cell& oc : ng.instance->cells) {
    for (int k = 0; k < 4; ++k) {
      Cell nb{oc.row + k_d4_row[k], oc.col + k_d4_col[k]};
      if (!in_bounds(scene.height, scene.width, nb)) continue;
      if (!scene.traversable(nb.row, nb.col)) continue;
      double v = gt.values(nb.row, nb.col);
      if (v < best) {
        best = v;
        cur = nb;
      }
    }
  }
  if (!std::isfinite(best)) return false;

  // Walk the optimal path back to the start by greedy descent.
  std::vector<Cell> path{cur};
  for (int guard = 0; guard < scene.width * scene.height; ++guard) {
    if (gt.values(cur.row, cur.col) <= 0.0) break;
    Cell next = cur;
    double next_v = gt.values(cur.row, cur.col);
    for (int k = 0; k < 8; ++k) {
      Cell nb{cur.row + k_d8_row[k], cur.col + k_d8_col[k]};
      if (!in_bounds(scene.height, scene.width, nb)) continue;
      if (!scene.traversable(nb.row, nb.col)) continue;
      double v = gt.values(nb.row, nb.col);
      if (v < next_v) {
        next_v = v;
        next = nb;
      }
    }
    if (next == cur) break;
    cur = next;
    path.push_back(cur);
  }

  bool blocked_on_path = false;
  for (const Cell& p : path) {
    double wx = (p.col + 0.5) * scene.cell_size;
    double wy = (p.row + 0.5) * scene.cell_size;
    Cell mc = map.cell_at(wx, wy);
    if (map.contains(mc) && map.obstacle(mc.row, mc.col)) {
      blocked_on_path = true;
      break;
    }
  }
  if (!blocked_on_path) return false;

  GridU8 free = (map.obstacle == 0).cast<std::uint8_t>();
  std::vector<Cell> sources;
  for (const Cell& oc : ng.instance->cells) {
    double wx = (oc.col + 0.5) * scene.cell_size;
    double wy = (oc.row + 0.5) * scene.cell_size;
    Cell mc = map.cell_at(wx, wy);
    if (map.contains(mc)) sources.push_back(mc);
  }
  Cell start_mc = map.cell_at(start.x, start.y);
  if (sources.empty() || !map.contains(start_mc)) return false;
  GridU8 targets = GridU8::Zero(map.M, map.M);
  targets(start_mc.row, start_mc.col) = 1;
  try {
    DistanceField f = distance_field_until(free, sources, map.cell_size, targets, 1);
    return !f.reachable(start_mc);
  } catch (const AllSourcesBlockedError&) {
    return true;
  }
}

AttributionReport attribute_failures(const std::vector<Scene>& scenes,
                                     const std::vector<ResultRow>& rows, const RerunFn& rerun) {
  AttributionReport rep;
  rep.total = static_cast<int>(rows.size());
  const AttributionClass all_classes[] = {
      AttributionClass::segmentation_error, AttributionClass::exploration_failure,
      AttributionClass::map_noise_error,    AttributionClass::planning_error,
      AttributionClass::annotation_error,   AttributionClass::other};
  for (AttributionClass ac : all_classes) rep.counts[attribution_class_name(ac)] = 0;

  int raw_successes = 0;
  auto bump = [&](AttributionClass ac) { ++rep.counts[attribution_class_name(ac)]; };

  for (const ResultRow& row : rows) {
    if (row.result.success) {
      ++raw_successes;
      continue;
    }
    if (row.klass == "annotation_error") {
      bump(AttributionClass::annotation_error);
      continue;
    }
    RerunOutcome base = rerun({row.spec, false});
    if (base.result.success != row.result.success) {
      throw RerunMismatchError("attribute_failures: rerun of " + row.episode_id +
                               " diverged on an unchanged configuration");
    }
    RerunOutcome oracle = rerun({row.spec, true});
    if (oracle.result.success) {
      bump(AttributionClass::segmentation_error);
      continue;
    }
    EpisodeSpec ext = row.spec;
    ext.max_steps = std::max(k_extended_budget, row.spec.max_steps);
    RerunOutcome extended = rerun({ext, true});
    if (extended.result.success) {
      bump(AttributionClass::exploration_failure);
      continue;
    }
    const Scene* sc = find_scene(scenes, row.spec.scene_id);
    if (sc && extended.map.M > 0 &&
        door_block_detected(*sc, extended.map, row.spec.start, row.spec.goal_category)) {
      bump(AttributionClass::map_noise_error);
      continue;
    }
    if (extended.result.stuck_events > 0) {
      bump(AttributionClass::planning_error);
      continue;
    }
    bump(AttributionClass::other);
  }

  rep.successes = raw_successes + rep.counts[attribution_class_name(AttributionClass::annotation_error)];
  for (const auto& [name, count] : rep.counts) {
    rep.proportions[name] =
        rep.total > 0 ? static_cast<double>(count) / static_cast<double>(rep.total) : 0.0;
  }
  rep.success_proportion =
      rep.total > 0 ? static_cast<double>(rep.successes) / static_cast<double>(rep.total) : 0.0;
  return rep;
}

RerunFn make_rerun_fn(const std::vector<Scene>& scenes, const BatchConfig& cfg) {
  auto shared_scenes = std::make_shared<std::vector<Scene>>(scenes);
  BatchConfig base = cfg;
  return [shared_scenes, base](const RerunRequest& req) -> RerunOutcome {
    const Scene* sc = find_scene(*shared_scenes, req.spec.scene_id);
    if (!sc) throw InvariantError("rerun: scene not found: " + req.spec.scene_id);
    PipelineConfig pc = base.pipeline;
    pc.oracle_segmentation = req.oracle_segmentation;
    SceneView view = make_scene_view(*sc);
    RerunOutcome out;
    out.result = run_episode(*sc, view, req.spec, pc, base.noise, false, &out.map);
    return out;
  };
}

}  // namespace objnav
