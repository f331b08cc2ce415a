#include "objnav/results_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace objnav {

using ordered_json = nlohmann::ordered_json;

namespace {

const ordered_json& require(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
  return *it;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const char* mode_name(GoalMode mode) {
  return mode == GoalMode::exploit ? "exploit" : "explore";
}

}  // namespace

std::string result_row_to_json(const ResultRow& row, const CategorySet& categories) {
  (void)categories;
  ordered_json j;
  j["episode_id"] = row.episode_id;
  j["scene_id"] = row.spec.scene_id;
  j["goal"] = row.goal;
  j["seed"] = row.spec.seed;
  j["config_hash"] = row.config_hash;
  j["start"] = ordered_json::array({row.spec.start.x, row.spec.start.y, row.spec.start.heading});
  j["max_steps"] = row.spec.max_steps;
  j["max_collisions"] = row.spec.max_collisions;
  j["success_radius"] = row.spec.success_radius;
  j["success"] = row.result.success;
  j["agent_path_length"] = row.result.agent_path_length;
  j["shortest_path_length"] = row.result.shortest_path_length;
  j["steps"] = row.result.steps;
  j["collisions"] = row.result.collisions;
  j["stop_called"] = row.result.stop_called;
  j["terminal_distance_to_goal"] = row.result.terminal_distance_to_goal;
  j["failure_class"] = row.klass;
  j["exploration_exhausted"] = row.result.exploration_exhausted;
  j["stuck_events"] = row.result.stuck_events;
  j["unreachable_events"] = row.result.unreachable_events;
  j["error"] = row.error;
  return j.dump();
}

ResultRow result_row_from_json(const std::string& line, const CategorySet& categories) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON result row: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("result row must be an object");

  ResultRow row;
  row.episode_id = require(j, "episode_id").get<std::string>();
  if (j.contains("scene_id")) row.spec.scene_id = j["scene_id"].get<std::string>();
  if (j.contains("goal")) row.goal = j["goal"].get<std::string>();
  if (!row.goal.empty()) {
    if (auto idx = categories.index_of(row.goal)) row.spec.goal_category = *idx;
  }
  if (j.contains("seed")) row.spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("config_hash")) row.config_hash = j["config_hash"].get<std::string>();
  if (j.contains("start")) {
    const auto& s = j["start"];
    if (!s.is_array() || s.size() != 3) throw ParseError("start must be [x, y, heading]");
    row.spec.start = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
  }
  if (j.contains("max_steps")) row.spec.max_steps = j["max_steps"].get<int>();
  if (j.contains("max_collisions")) row.spec.max_collisions = j["max_collisions"].get<int>();
  if (j.contains("success_radius")) row.spec.success_radius = j["success_radius"].get<double>();

  row.result.success = require(j, "success").get<bool>();
  if (j.contains("agent_path_length"))
    row.result.agent_path_length = j["agent_path_length"].get<double>();
  if (j.contains("shortest_path_length"))
    row.result.shortest_path_length = j["shortest_path_length"].get<double>();
  if (j.contains("steps")) row.result.steps = j["steps"].get<int>();
  if (j.contains("collisions")) row.result.collisions = j["collisions"].get<int>();
  if (j.contains("stop_called")) row.result.stop_called = j["stop_called"].get<bool>();
  if (j.contains("terminal_distance_to_goal"))
    row.result.terminal_distance_to_goal = j["terminal_distance_to_goal"].get<double>();
  if (j.contains("exploration_exhausted"))
    row.result.exploration_exhausted = j["exploration_exhausted"].get<bool>();
  if (j.contains("stuck_events")) row.result.stuck_events = j["stuck_events"].get<int>();
  if (j.contains("unreachable_events"))
    row.result.unreachable_events = j["unreachable_events"].get<int>();
  if (j.contains("error")) row.error = j["error"].get<std::string>();

  if (j.contains("failure_class")) {
    row.klass = j["failure_class"].get<std::string>();
  } else {
    row.klass = row.result.success ? "none" : "other";
  }
  try {
    row.result.failure_class = failure_class_from_name(row.klass);
  } catch (const std::invalid_argument&) {
    row.result.failure_class = row.result.success ? FailureClass::none : FailureClass::timeout;
  }
  return row;
}

void save_results(const std::string& path, const std::vector<ResultRow>& rows,
                  const CategorySet& categories) {
  std::string text;
  for (const ResultRow& row : rows) text += result_row_to_json(row, categories) + "\n";
  write_file(path, text);
}

std::vector<ResultRow> load_results(const std::string& path, const CategorySet& categories) {
  std::istringstream in(read_file(path));
  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(result_row_from_json(line, categories));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::string episode_set_to_json(const EpisodeSet& set, const CategorySet& categories,
                                const std::string& config_hash) {
  ordered_json j;
  j["format"] = 1;
  j["config_hash"] = config_hash;
  ordered_json bins = ordered_json::array();
  for (const DistanceBin& b : set.bins) {
    ordered_json jb;
    jb["lo_m"] = b.lo_m;
    jb["hi_m"] = b.hi_m;
    jb["target"] = b.target;
    bins.push_back(jb);
  }
  j["bins"] = bins;
  j["category_targets"] = set.category_targets;
  ordered_json eps = ordered_json::array();
  for (size_t i = 0; i < set.episodes.size(); ++i) {
    const EpisodeSpec& spec = set.episodes[i];
    ordered_json e;
    e["id"] = episode_id(static_cast<int>(i));
    e["scene_id"] = spec.scene_id;
    e["start"] = ordered_json::array({spec.start.x, spec.start.y, spec.start.heading});
    e["goal"] = categories.name(spec.goal_category);
    e["max_steps"] = spec.max_steps;
    e["max_collisions"] = spec.max_collisions;
    e["success_radius"] = spec.success_radius;
    e["seed"] = spec.seed;
    e["shortest_m"] = i < set.shortest_m.size() ? set.shortest_m[i] : 0.0;
    eps.push_back(e);
  }
  j["episodes"] = eps;
  return j.dump(2) + "\n";
}

EpisodeSet episode_set_from_json(const std::string& text, const CategorySet& categories) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid episode-set JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("episode set must be an object");
  const auto& fmt = require(j, "format");
  if (!fmt.is_number_integer() || fmt.get<int>() != 1) {
    throw ParseError("unsupported episode-set format (expected 1)");
  }
  EpisodeSet set;
  if (j.contains("bins")) {
    for (const auto& jb : j["bins"]) {
      set.bins.push_back({require(jb, "lo_m").get<double>(), require(jb, "hi_m").get<double>(),
                          require(jb, "target").get<int>()});
    }
  }
  if (j.contains("category_targets"))
    set.category_targets = j["category_targets"].get<std::vector<int>>();
  for (const auto& e : require(j, "episodes")) {
    EpisodeSpec spec;
    spec.scene_id = require(e, "scene_id").get<std::string>();
    const auto& s = require(e, "start");
    if (!s.is_array() || s.size() != 3) throw ParseError("start must be [x, y, heading]");
    spec.start = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    std::string goal = require(e, "goal").get<std::string>();
    auto idx = categories.index_of(goal);
    if (!idx) throw ParseError("unknown goal category: " + goal);
    spec.goal_category = *idx;
    spec.max_steps = require(e, "max_steps").get<int>();
    spec.max_collisions = require(e, "max_collisions").get<int>();
    spec.success_radius = require(e, "success_radius").get<double>();
    spec.seed = require(e, "seed").get<std::uint64_t>();
    set.episodes.push_back(spec);
    set.shortest_m.push_back(e.contains("shortest_m") ? e["shortest_m"].get<double>() : 0.0);
  }
  return set;
}

void save_episode_set(const std::string& path, const EpisodeSet& set,
                      const CategorySet& categories, const std::string& config_hash) {
  write_file(path, episode_set_to_json(set, categories, config_hash));
}

EpisodeSet load_episode_set(const std::string& path, const CategorySet& categories) {
  try {
    return episode_set_from_json(read_file(path), categories);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_group_csv(const std::string& path, const std::vector<MetricsGroup>& groups,
                    const std::string& key_name, const std::string& config_hash) {
  std::string text = "# config_hash=" + config_hash + "\n";
  text += key_name + ",n,sr,spl\n";
  for (const MetricsGroup& g : groups) {
    text += g.key + "," + std::to_string(g.n) + "," + csv_num(g.sr) + "," + csv_num(g.spl) + "\n";
  }
  write_file(path, text);
}

void save_summary_json(const std::string& path, const MetricsReport& report,
                       const std::string& config_hash) {
  ordered_json j;
  j["config_hash"] = config_hash;
  j["n"] = report.n;
  j["sr"] = report.sr;
  j["spl"] = report.spl;
  auto dump_groups = [](const std::vector<MetricsGroup>& groups) {
    ordered_json arr = ordered_json::array();
    for (const MetricsGroup& g : groups) {
      ordered_json jg;
      jg["key"] = g.key;
      jg["n"] = g.n;
      jg["sr"] = g.sr;
      jg["spl"] = g.spl;
      arr.push_back(jg);
    }
    return arr;
  };
  j["by_home"] = dump_groups(report.by_home);
  j["by_goal"] = dump_groups(report.by_goal);
  write_file(path, j.dump(2) + "\n");
}

void save_attribution_json(const std::string& path, const AttributionReport& report,
                           const std::string& config_hash) {
  ordered_json j;
  j["config_hash"] = config_hash;
  j["total"] = report.total;
  j["successes"] = report.successes;
  j["success_proportion"] = report.success_proportion;
  ordered_json counts, props;
  for (const auto& [name, count] : report.counts) counts[name] = count;
  for (const auto& [name, p] : report.proportions) props[name] = p;
  j["counts"] = counts;
  j["proportions"] = props;
  write_file(path, j.dump(2) + "\n");
}

void save_comparison_json(const std::string& path, const DomainComparison& cmp,
                          const std::string& hash_a, const std::string& hash_b) {
  ordered_json j;
  j["config_hash_a"] = hash_a;
  j["config_hash_b"] = hash_b;
  j["n"] = cmp.n;
  j["sr_a"] = cmp.sr_a;
  j["spl_a"] = cmp.spl_a;
  j["sr_b"] = cmp.sr_b;
  j["spl_b"] = cmp.spl_b;
  j["srcc"] = cmp.srcc;
  write_file(path, j.dump(2) + "\n");
}

void save_trace(const std::string& path, const std::string& episode_id,
                const std::vector<TraceStep>& trace) {
  std::string text;
  for (const TraceStep& t : trace) {
    ordered_json j;
    j["episode_id"] = episode_id;
    j["step"] = t.step;
    j["x"] = t.pose.x;
    j["y"] = t.pose.y;
    j["heading"] = t.pose.heading;
    j["action"] = action_name(t.action);
    j["mode"] = mode_name(t.mode);
    j["goal"] = ordered_json::array({t.goal.row, t.goal.col});
    j["collisions"] = t.collisions;
    j["stuck"] = t.stuck;
    text += j.dump() + "\n";
  }
  write_file(path, text);
}

}  // namespace objnav
