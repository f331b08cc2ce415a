#include "objnav/config.hpp"
#include "objnav/results_io.hpp"
#include "objnav/scene_gen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace objnav;

namespace {

// Exit codes: 0 ok, 1 config error, 2 data error.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::string hex_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  try {
    return load_run_config(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::vector<DistanceBin> parse_bins(const std::string& text) {
  if (text.empty()) return default_bins(0);
  std::vector<DistanceBin> bins;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    auto dash = token.find('-');
    if (dash == std::string::npos) throw ConfigError("bad bin (want lo-hi): " + token);
    try {
      double lo = std::stod(token.substr(0, dash));
      double hi = std::stod(token.substr(dash + 1));
      bins.push_back({lo, hi, 0});
    } catch (const std::exception&) {
      throw ConfigError("bad bin (want lo-hi): " + token);
    }
  }
  if (bins.empty()) throw ConfigError("no bins parsed from: " + text);
  return bins;
}

std::vector<Scene> load_scenes(const std::vector<std::string>& paths,
                               const CategorySet& categories) {
  std::vector<std::string> files;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> inside;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.path().extension() == ".scene") inside.push_back(entry.path().string());
      }
      std::sort(inside.begin(), inside.end());
      files.insert(files.end(), inside.begin(), inside.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw std::runtime_error("no scene files found");
  std::vector<Scene> scenes;
  for (const std::string& f : files) scenes.push_back(load_scene(f, categories));
  return scenes;
}

void apply_overrides(RunConfig& cfg, const std::string& policy, const std::string& noise,
                     std::int64_t seed, int parallel, int max_steps) {
  if (!policy.empty()) cfg.policy = policy;
  if (!noise.empty()) cfg.noise = noise;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (parallel > 0) cfg.parallelism = parallel;
  if (max_steps > 0) cfg.max_steps = max_steps;
  if (cfg.policy != "frontier" && cfg.policy != "prior" && cfg.policy != "random")
    throw ConfigError("unknown policy: " + cfg.policy);
  if (cfg.noise != "none" && cfg.noise != "simlike" && cfg.noise != "reallike")
    throw ConfigError("unknown noise profile: " + cfg.noise);
}

int cmd_gen(std::uint64_t seed, int homes, int episodes, const std::string& out,
            const std::string& bins_text, int tries) {
  CategorySet cats = CategorySet::defaults();
  std::vector<DistanceBin> bins = parse_bins(bins_text);

  fs::create_directories(fs::path(out) / "scenes");
  std::vector<Scene> scenes;
  GenParams params = default_gen_params(cats);
  for (int i = 0; i < homes; ++i) scenes.push_back(generate_home(seed + static_cast<std::uint64_t>(i), params, cats));

  GenerateParams gp;
  if (tries > 0) gp.tries_per_episode = tries;
  EpisodeSet set = generate_episodes(scenes, episodes, bins, seed, cats, gp);

  std::string stamp = "gen|seed=" + std::to_string(seed) + "|homes=" + std::to_string(homes) +
                      "|episodes=" + std::to_string(episodes) + "|bins=" + bins_text;
  std::string hash = hex_hash(fnv1a64(stamp));

  std::vector<std::string> files;
  for (const Scene& s : scenes) {
    std::string path = (fs::path(out) / "scenes" / (s.id + ".scene")).string();
    save_scene(path, s, cats);
    files.push_back(path);
  }
  save_episode_set((fs::path(out) / "episodes.json").string(), set, cats, hash);

  std::string manifest = "{\n  \"config_hash\": \"" + hash + "\",\n  \"scenes\": [";
  for (size_t i = 0; i < files.size(); ++i)
    manifest += (i ? ", " : "") + std::string("\"") + fs::path(files[i]).filename().string() + "\"";
  manifest += "],\n  \"episodes\": \"episodes.json\"\n}\n";
  std::ofstream mf((fs::path(out) / "MANIFEST.json").string(), std::ios::binary);
  mf << manifest;

  std::vector<int> bin_counts(set.bins.size(), 0);
  for (double d : set.shortest_m) {
    for (size_t b = 0; b < set.bins.size(); ++b)
      if (d >= set.bins[b].lo_m && d < set.bins[b].hi_m) ++bin_counts[b];
  }
  std::cout << "generated " << scenes.size() << " homes, " << set.episodes.size()
            << " episodes\n";
  for (size_t b = 0; b < set.bins.size(); ++b) {
    std::cout << "  bin [" << set.bins[b].lo_m << ", " << set.bins[b].hi_m
              << "): " << bin_counts[b] << "\n";
  }
  std::cout << "config_hash " << hash << "\n";
  return 0;
}

int cmd_run(const RunConfig& cfg, const std::vector<std::string>& scene_paths,
            const std::string& episodes_path, const std::string& out, bool trace) {
  CategorySet cats = CategorySet::defaults();
  std::vector<Scene> scenes = load_scenes(scene_paths, cats);
  EpisodeSet set = load_episode_set(episodes_path, cats);
  BatchConfig bc = to_batch_config(cfg, cats);
  std::string hash = config_hash(cfg);

  fs::create_directories(out);
  std::vector<ResultRow> rows = run_batch(scenes, set, bc, cats, hash, cfg.parallelism, trace);
  save_results((fs::path(out) / "results.jsonl").string(), rows, cats);

  if (trace) {
    fs::create_directories(fs::path(out) / "traces");
    for (const ResultRow& row : rows) {
      save_trace((fs::path(out) / "traces" / ("trace-" + row.episode_id + ".jsonl")).string(),
                 row.episode_id, row.result.trace);
    }
  }

  MetricsReport rep = metrics_report(rows);
  save_group_csv((fs::path(out) / "by_home.csv").string(), rep.by_home, "home", hash);
  save_group_csv((fs::path(out) / "by_goal.csv").string(), rep.by_goal, "goal", hash);
  save_summary_json((fs::path(out) / "summary.json").string(), rep, hash);

  std::printf("n %d  sr %.4f  spl %.4f  config_hash %s\n", rep.n, rep.sr, rep.spl, hash.c_str());
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const std::string& out) {
  CategorySet cats = CategorySet::defaults();
  std::vector<ResultRow> rows_a = load_results(path_a, cats);
  std::vector<ResultRow> rows_b = load_results(path_b, cats);
  DomainComparison cmp = compare_results(rows_a, rows_b);
  std::string hash_a = rows_a.empty() ? "" : rows_a.front().config_hash;
  std::string hash_b = rows_b.empty() ? "" : rows_b.front().config_hash;
  if (!out.empty()) save_comparison_json(out, cmp, hash_a, hash_b);
  std::printf("n %d  sr_a %.4f  spl_a %.4f  sr_b %.4f  spl_b %.4f  srcc %.4f\n", cmp.n, cmp.sr_a,
              cmp.spl_a, cmp.sr_b, cmp.spl_b, cmp.srcc);
  return 0;
}

int cmd_attribute(const RunConfig& cfg, const std::vector<std::string>& scene_paths,
                  const std::string& results_path, const std::string& out) {
  CategorySet cats = CategorySet::defaults();
  std::vector<Scene> scenes = load_scenes(scene_paths, cats);
  std::vector<ResultRow> rows = load_results(results_path, cats);
  BatchConfig bc = to_batch_config(cfg, cats);
  AttributionReport rep = attribute_failures(scenes, rows, make_rerun_fn(scenes, bc));
  std::string hash = config_hash(cfg);
  if (!out.empty()) save_attribution_json(out, rep, hash);
  std::printf("total %d  successes %d (%.1f%%)\n", rep.total, rep.successes,
              100.0 * rep.success_proportion);
  for (const auto& [name, count] : rep.counts) {
    std::printf("  %-20s %5d  %.1f%%\n", name.c_str(), count, 100.0 * rep.proportions.at(name));
  }
  return 0;
}

int cmd_replay(const RunConfig& cfg, const std::string& scene_path,
               const std::string& episodes_path, const std::string& id, const std::string& out,
               int every, bool pfm) {
  CategorySet cats = CategorySet::defaults();
  Scene scene = load_scene(scene_path, cats);
  EpisodeSet set = load_episode_set(episodes_path, cats);
  int index = -1;
  for (size_t i = 0; i < set.episodes.size(); ++i) {
    if (episode_id(static_cast<int>(i)) == id) {
      index = static_cast<int>(i);
      break;
    }
  }
  if (index < 0) throw std::runtime_error("episode id not in set: " + id);
  EpisodeSpec spec = set.episodes[static_cast<size_t>(index)];
  if (spec.scene_id != scene.id)
    throw std::runtime_error("episode " + id + " belongs to scene " + spec.scene_id);

  BatchConfig bc = to_batch_config(cfg, cats);
  if (bc.max_steps_override > 0) spec.max_steps = bc.max_steps_override;
  fs::create_directories(out);

  SceneView view = make_scene_view(scene);
  StepHook hook = [&](int step, const Pipeline& pipe) {
    if (every > 0 && step % every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "map-%04d.ppm", step);
      write_map_ppm((fs::path(out) / name).string(), pipe.map());
    }
  };
  SemanticMap final_map;
  EpisodeResult res =
      run_episode(scene, view, spec, bc.pipeline, bc.noise, true, &final_map, hook);

  save_trace((fs::path(out) / ("trace-" + id + ".jsonl")).string(), id, res.trace);
  write_map_ppm((fs::path(out) / "map-final.ppm").string(), final_map);
  write_pgm((fs::path(out) / "obstacle-final.pgm").string(), final_map.obstacle);
  if (pfm) {
    GridU8 free = (final_map.obstacle == 0).cast<std::uint8_t>();
    DistanceField field = distance_field(free, {final_map.current}, final_map.cell_size);
    write_pfm(field, (fs::path(out) / "distance-final.pfm").string());
  }

  std::printf("%s: %s in %d steps, %d collisions, path %.2f m\n", id.c_str(),
              res.success ? "success" : failure_class_name(res.failure_class), res.steps,
              res.collisions, res.agent_path_length);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D object-goal navigation benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate homes and an episode set");
  std::int64_t gen_seed = 7;
  int gen_homes = 3;
  int gen_episodes = 30;
  int gen_tries = 0;
  std::string gen_out = "out";
  std::string gen_bins;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--homes", gen_homes, "number of homes");
  gen->add_option("--episodes", gen_episodes, "number of episodes");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--bins", gen_bins, "distance bins lo-hi[,lo-hi...] in meters");
  gen->add_option("--tries", gen_tries, "rejection-sampling tries per episode");

  auto* run = app.add_subcommand("run", "run an episode batch and write reports");
  std::vector<std::string> run_scenes;
  std::string run_episodes, run_out = "out", run_config;
  std::string run_policy, run_noise;
  std::int64_t run_seed = -1;
  int run_parallel = 0, run_max_steps = 0;
  bool run_trace = false;
  run->add_option("--scenes", run_scenes, "scene files or directories")->required();
  run->add_option("--episodes", run_episodes, "episode-set file")->required();
  run->add_option("--config", run_config, "config JSON file");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--policy", run_policy, "frontier | prior | random");
  run->add_option("--noise", run_noise, "none | simlike | reallike");
  run->add_option("--seed", run_seed, "config seed override");
  run->add_option("--parallel", run_parallel, "worker count");
  run->add_option("--max-steps", run_max_steps, "step budget override");
  run->add_flag("--trace", run_trace, "write per-step traces");

  auto* cmp = app.add_subcommand("compare", "paired metrics for two results files");
  std::string cmp_a, cmp_b, cmp_out;
  cmp->add_option("--a", cmp_a, "first results file")->required();
  cmp->add_option("--b", cmp_b, "second results file")->required();
  cmp->add_option("--out", cmp_out, "report JSON path");

  auto* attr = app.add_subcommand("attribute", "counterfactual failure attribution");
  std::vector<std::string> attr_scenes;
  std::string attr_results, attr_config, attr_out;
  std::string attr_policy, attr_noise;
  attr->add_option("--scenes", attr_scenes, "scene files or directories")->required();
  attr->add_option("--results", attr_results, "results file to attribute")->required();
  attr->add_option("--config", attr_config, "config JSON file (must match the run)");
  attr->add_option("--out", attr_out, "report JSON path");
  attr->add_option("--policy", attr_policy, "frontier | prior | random");
  attr->add_option("--noise", attr_noise, "none | simlike | reallike");

  auto* replay = app.add_subcommand("replay", "re-run one episode, render map snapshots");
  std::string rp_scene, rp_episodes, rp_id, rp_out = "replay", rp_config;
  std::string rp_policy, rp_noise;
  int rp_every = 25;
  bool rp_pfm = false;
  replay->add_option("--scene", rp_scene, "scene file")->required();
  replay->add_option("--episodes", rp_episodes, "episode-set file")->required();
  replay->add_option("--id", rp_id, "episode id")->required();
  replay->add_option("--config", rp_config, "config JSON file");
  replay->add_option("--out", rp_out, "output directory");
  replay->add_option("--every", rp_every, "snapshot cadence in steps");
  replay->add_flag("--pfm", rp_pfm, "export final distance field as PFM");
  replay->add_option("--policy", rp_policy, "frontier | prior | random");
  replay->add_option("--noise", rp_noise, "none | simlike | reallike");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      if (gen_seed < 0 || gen_homes < 1 || gen_episodes < 1)
        throw ConfigError("gen: seed, homes, episodes must be positive");
      try {
        return cmd_gen(static_cast<std::uint64_t>(gen_seed), gen_homes, gen_episodes, gen_out,
                       gen_bins, gen_tries);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
    RunConfig cfg;
    if (run->parsed()) {
      cfg = load_config_or_default(run_config);
      apply_overrides(cfg, run_policy, run_noise, run_seed, run_parallel, run_max_steps);
    } else if (attr->parsed()) {
      cfg = load_config_or_default(attr_config);
      apply_overrides(cfg, attr_policy, attr_noise, -1, 0, 0);
    } else if (replay->parsed()) {
      cfg = load_config_or_default(rp_config);
      apply_overrides(cfg, rp_policy, rp_noise, -1, 0, 0);
    }
    try {
      if (run->parsed()) return cmd_run(cfg, run_scenes, run_episodes, run_out, run_trace);
      if (cmp->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_out);
      if (attr->parsed()) return cmd_attribute(cfg, attr_scenes, attr_results, attr_out);
      if (replay->parsed()) return cmd_replay(cfg, rp_scene, rp_episodes, rp_id, rp_out, rp_every, rp_pfm);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
