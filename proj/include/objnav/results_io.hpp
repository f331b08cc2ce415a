#pragma once

#include "objnav/bench.hpp"
#include "objnav/scene_io.hpp"

#include <string>
#include <vector>

namespace objnav {

// Results files are line-delimited JSON, one row per episode. The loader
// accepts externally transcribed logs: unknown failure-class labels are
// kept verbatim in `klass`, absent fields default.
std::string result_row_to_json(const ResultRow& row, const CategorySet& categories);
ResultRow result_row_from_json(const std::string& line, const CategorySet& categories);

void save_results(const std::string& path, const std::vector<ResultRow>& rows,
                  const CategorySet& categories);
std::vector<ResultRow> load_results(const std::string& path, const CategorySet& categories);

std::string episode_set_to_json(const EpisodeSet& set, const CategorySet& categories,
                                const std::string& config_hash);
EpisodeSet episode_set_from_json(const std::string& text, const CategorySet& categories);
void save_episode_set(const std::string& path, const EpisodeSet& set,
                      const CategorySet& categories, const std::string& config_hash);
EpisodeSet load_episode_set(const std::string& path, const CategorySet& categories);

// by_home.csv / by_goal.csv: key,n,sr,spl with a leading comment line
// carrying the config hash.
void save_group_csv(const std::string& path, const std::vector<MetricsGroup>& groups,
                    const std::string& key_name, const std::string& config_hash);

void save_summary_json(const std::string& path, const MetricsReport& report,
                       const std::string& config_hash);

void save_attribution_json(const std::string& path, const AttributionReport& report,
                           const std::string& config_hash);

void save_comparison_json(const std::string& path, const DomainComparison& cmp,
                          const std::string& hash_a, const std::string& hash_b);

void save_trace(const std::string& path, const std::string& episode_id,
                const std::vector<TraceStep>& trace);

}  // namespace objnav
