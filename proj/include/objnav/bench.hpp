#pragma once

#include "objnav/agentloop.hpp"
#include "objnav/scene.hpp"
#include "objnav/sensors.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace objnav {

struct InfeasibleBinsError : std::runtime_error {
  explicit InfeasibleBinsError(const std::string& what) : std::runtime_error(what) {}
};
struct RerunMismatchError : std::runtime_error {
  explicit RerunMismatchError(const std::string& what) : std::runtime_error(what) {}
};
struct UnpairedEpisodesError : std::runtime_error {
  explicit UnpairedEpisodesError(const std::string& what) : std::runtime_error(what) {}
};

struct DistanceBin {
  double lo_m = 0.0;  // inclusive
  double hi_m = 0.0;  // exclusive
  int target = 0;
};

// Three ranges covering the benchmark's span of shortest paths, n split as
// evenly as possible.
std::vector<DistanceBin> default_bins(int n);

struct EpisodeSet {
  std::vector<EpisodeSpec> episodes;   // episode i is named episode_id(i)
  std::vector<double> shortest_m;      // recorded geodesic start->goal
  std::vector<DistanceBin> bins;
  std::vector<int> category_targets;   // per category index
};

std::string episode_id(int index);

struct GenerateParams {
  int max_steps = 500;
  int max_collisions = 20;
  double success_radius = 1.0;
  int tries_per_episode = 4000;
};

// Rejection-samples (scene, start, goal) triples so goal categories are
// balanced and shortest paths match the bin targets. Deterministic in seed.
EpisodeSet generate_episodes(const std::vector<Scene>& scenes, int n,
                             const std::vector<DistanceBin>& bins, std::uint64_t seed,
                             const CategorySet& categories, const GenerateParams& params = {});

// One evaluated episode as it appears in a results file. The full spec
// rides along so failures can be rerun. `klass` mirrors
// result.failure_class for rows this runner produced; imported logs may
// carry labels the simulator never emits (annotation_error, other).
struct ResultRow {
  std::string episode_id;
  EpisodeSpec spec;
  std::string goal;
  std::string config_hash;
  EpisodeResult result;
  std::string klass = "none";
  std::string error;
};

double success_rate(const std::vector<ResultRow>& rows);
double spl(const std::vector<ResultRow>& rows);

struct MetricsGroup {
  std::string key;
  int n = 0;
  double sr = 0.0;
  double spl = 0.0;
};

struct MetricsReport {
  int n = 0;
  double sr = 0.0;
  double spl = 0.0;
  std::vector<MetricsGroup> by_home;  // sorted by key
  std::vector<MetricsGroup> by_goal;
};

MetricsReport metrics_report(const std::vector<ResultRow>& rows);

// Pearson correlation of paired binary outcome vectors. Degenerate case
// (either vector constant): 1.0 when the vectors are element-wise equal,
// else 0.0.
double srcc(const std::vector<int>& outcomes_a, const std::vector<int>& outcomes_b);

// One-sided paired t-test p-value for H1: mean(a) > mean(b). Zero-variance
// differences collapse to p = 0 (mean > 0) or p = 1.
double paired_t_pvalue(const std::vector<double>& a, const std::vector<double>& b);

struct BatchConfig {
  PipelineConfig pipeline;
  NoiseProfile noise;
  int max_steps_override = 0;  // 0 keeps each spec's own budget
};

ResultRow run_one(const Scene& scene, const SceneView& view, const EpisodeSpec& spec,
                  const BatchConfig& cfg, const CategorySet& categories,
                  const std::string& config_hash, bool with_trace = false);

// Runs every episode of the set; exceptions become `other` rows instead of
// aborting the batch. Output order is by episode index regardless of
// parallelism.
std::vector<ResultRow> run_batch(const std::vector<Scene>& scenes, const EpisodeSet& set,
                                 const BatchConfig& cfg, const CategorySet& categories,
                                 const std::string& config_hash, int parallelism = 1,
                                 bool with_trace = false);

struct DomainComparison {
  int n = 0;
  double sr_a = 0.0, spl_a = 0.0;
  double sr_b = 0.0, spl_b = 0.0;
  double srcc = 0.0;
};

// Pairs rows by episode id (sorted); throws UnpairedEpisodesError naming
// ids present on only one side.
DomainComparison compare_results(const std::vector<ResultRow>& rows_a,
                                 const std::vector<ResultRow>& rows_b);

DomainComparison compare_domains(const std::vector<Scene>& scenes, const EpisodeSet& set,
                                 const BatchConfig& config_a, const BatchConfig& config_b,
                                 const CategorySet& categories, int parallelism = 1);

enum class AttributionClass {
  segmentation_error,
  exploration_failure,
  map_noise_error,
  planning_error,
  annotation_error,
  other
};
const char* attribution_class_name(AttributionClass ac);

// Annotation errors stay in counts (they are recorded failures) but fold
// into successes, since the agent did reach a goal-category instance.
struct AttributionReport {
  int total = 0;
  int successes = 0;
  std::map<std::string, int> counts;
  std::map<std::string, double> proportions;  // of total episodes
  double success_proportion = 0.0;
};

// What a counterfactual rerun hands back: the episode outcome plus the
// final agent map so the door-blocking detector can compare it against
// ground truth. A default-constructed map (M == 0) skips that check.
struct RerunOutcome {
  EpisodeResult result;
  SemanticMap map;
};

struct RerunRequest {
  EpisodeSpec spec;
  bool oracle_segmentation = false;
};

using RerunFn = std::function<RerunOutcome(const RerunRequest&)>;

inline constexpr int k_extended_budget = 2000;

// Ground-truth-traversable cells on the optimal start->goal path that the
// agent map marks as obstacles, with the goal region unreachable over the
// mapped free space. The signature of a noise-sealed doorway.
bool door_block_detected(const Scene& scene, const SemanticMap& map, const Pose& start,
                         int goal_category);

// Counterfactual ladder over the failed rows: oracle segmentation at the
// original budget, then oracle segmentation at the extended budget, then
// automatic classification of what remains. Reruns of the unchanged
// configuration must reproduce the recorded outcome.
AttributionReport attribute_failures(const std::vector<Scene>& scenes,
                                     const std::vector<ResultRow>& rows, const RerunFn& rerun);

// Production rerun runner for attribute_failures.
RerunFn make_rerun_fn(const std::vector<Scene>& scenes, const BatchConfig& cfg);

}  // namespace objnav
