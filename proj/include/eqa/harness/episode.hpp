#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eqa/common.hpp"
#include "eqa/mapper/semantic_map.hpp"
#include "eqa/oracles/oracle.hpp"
#include "eqa/oracles/remote.hpp"
#include "eqa/oracles/snapshot.hpp"
#include "eqa/planner/planner.hpp"
#include "eqa/world/episode_start.hpp"
#include "eqa/world/geodesic.hpp"
#include "eqa/world/kinematics.hpp"
#include "eqa/world/scene.hpp"
#include "eqa/world/sensor.hpp"

namespace eqa::harness {

using planner::Mode;
using planner::StopReason;
using world::StartOffset;

inline constexpr int kTraceVersion = 1;

struct EpisodeConfig {
  double alpha = 0.1;
  double beta = 0.2;
  StartOffset start_offset = StartOffset::t10;
  std::uint64_t seed = 0;
  int max_steps = 100;
  int replan_interval = 25;
  oracles::OracleMode oracle_mode = oracles::OracleMode::mock;
  bool vqa_only = false;                    // answer from the start observation, no navigation
  std::optional<AgentPose> start_override;  // replaces the generated start pose
};

struct EpisodeResult {
  std::string scene_id;
  int qa_index = 0;
  std::string predicted_answer;
  std::string gt_answer;
  bool correct = false;
  double d_T = 0.0;
  double start_distance = 0.0;
  int steps = 0;
  int collisions = 0;
  std::optional<StopReason> stop_reason;
  AgentPose answer_pose;
  std::optional<std::string> error;

  // Correct answer with zero collisions; the stricter real-house criterion.
  bool strict_success() const { return correct && collisions == 0; }
};

struct StepRecord {
  int step = 0;
  AgentPose pose;  // pose the action was taken from
  Action action = Action::stop;
  bool collided = false;
  std::optional<Cell> goal;
  Mode mode = Mode::explore;
  int frontier_count = 0;
  int memory_size = 0;
  std::optional<double> best_itm;
  std::optional<StopReason> stop_reason;  // final record only
};

struct TraceHeader {
  EpisodeConfig config;
  std::string scene_id;
  int qa_index = 0;
  std::string question;
  std::string target_category;
  std::string declarative;
  AgentPose start;
};

struct Trace {
  TraceHeader header;
  std::vector<StepRecord> steps;
  std::string answer;
  std::optional<std::string> error;
};

struct EpisodeOutcome {
  EpisodeResult result;
  Trace trace;
  mapper::SemanticMap final_map;
  std::vector<planner::MemoryEntry> memory;
  std::optional<oracles::StructuredSnapshot> answer_snapshot;
  std::vector<std::pair<int, mapper::SemanticMap>> map_snapshots;  // (step, map) when requested
};

struct RunOptions {
  SensorConfig sensor;
  planner::PlannerConfig planner;
  int snapshot_every = 0;  // > 0: keep a copy of the map every N steps
};

// Lowercase, trim, drop articles and terminal punctuation.
inline std::string normalize_answer(std::string_view s) {
  std::string lowered;
  for (char ch : s) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  while (!lowered.empty() && (std::isspace(static_cast<unsigned char>(lowered.back())) || lowered.back() == '.' ||
                              lowered.back() == '!' || lowered.back() == '?' || lowered.back() == ',')) {
    lowered.pop_back();
  }
  std::string out;
  std::string word;
  auto flush = [&] {
    if (word.empty() || word == "a" || word == "an" || word == "the") {
      word.clear();
      return;
    }
    if (!out.empty()) out.push_back(' ');
    out += word;
    word.clear();
  };
  for (char ch : lowered) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      word.push_back(ch);
    }
  }
  flush();
  return out;
}

inline bool answers_match(std::string_view predicted, std::string_view truth) {
  return normalize_answer(predicted) == normalize_answer(truth);
}

// Geodesic distance, +inf when the poses lie in different components.
inline double reach_distance(const world::GridScene& scene, const AgentPose& a, const AgentPose& b) {
  try {
    return world::geodesic_distance(scene, a, b);
  } catch (const NoPathError&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline AgentPose episode_start(const world::GridScene& scene, const world::QAItem& qa, const EpisodeConfig& cfg,
                               const Kinematics& kin = {}) {
  if (cfg.start_override) return *cfg.start_override;
  return world::make_start(scene, qa, cfg.start_offset, cfg.seed, kin);
}

// Runs one episode: parse -> {observe, map, memorize, stop check, act} ->
// answer on the highest-scoring memorized snapshot (or the last observation
// when memory is empty). Oracle failures end the episode with an error
// result instead of propagating.
inline EpisodeOutcome run_episode(const world::GridScene& scene, int qa_index, const EpisodeConfig& cfg,
                                  oracles::Oracle& oracle, const RunOptions& opts = {}) {
  const auto& qa = scene.qa_items.at(static_cast<std::size_t>(qa_index));
  const auto& kin = opts.planner.kin;

  EpisodeOutcome out;
  out.final_map = mapper::SemanticMap(scene.frame);
  auto& result = out.result;
  auto& trace = out.trace;
  result.scene_id = scene.id;
  result.qa_index = qa_index;
  result.gt_answer = qa.answer;

  AgentPose pose = episode_start(scene, qa, cfg, kin);
  trace.header = {cfg, scene.id, qa_index, qa.question, {}, {}, pose};
  result.start_distance = reach_distance(scene, pose, qa.end_pose);

  planner::PlannerState state(cfg.seed);
  const planner::StopPolicy policy{cfg.max_steps, cfg.replan_interval, cfg.beta};
  const mapper::DetectionModel det{cfg.alpha};
  auto& map = out.final_map;
  std::map<int, oracles::StructuredSnapshot> snapshots;
  oracles::StructuredSnapshot last_snapshot;
  std::optional<StopReason> stop;

  try {
    const auto parse = oracle.parse_question(qa.question);
    trace.header.target_category = parse.target_category;
    trace.header.declarative = parse.declarative;

    if (cfg.vqa_only) {
      const auto obs = world::observe(scene, pose, opts.sensor, 0);
      last_snapshot = oracles::make_snapshot(scene, pose, obs);
      stop = StopReason::no_navigation;
      StepRecord rec;
      rec.step = 0;
      rec.pose = pose;
      rec.action = Action::stop;
      rec.mode = Mode::done;
      rec.stop_reason = stop;
      trace.steps.push_back(rec);
    } else {
      for (;;) {
        const auto obs = world::observe(scene, pose, opts.sensor, state.total_steps);
        mapper::update_map(map, pose, obs, det);
        last_snapshot = oracles::make_snapshot(scene, pose, obs);
        const auto before = state.memory.size();
        planner::maybe_memorize(pose, obs, last_snapshot, parse.target_category, oracle, parse.declarative,
                                state.memory, opts.planner);
        if (state.memory.size() != before) snapshots.emplace(state.total_steps, last_snapshot);
        if (opts.snapshot_every > 0 && state.total_steps % opts.snapshot_every == 0) {
          out.map_snapshots.emplace_back(state.total_steps, map);
        }

        StepRecord rec;
        rec.step = state.total_steps;
        rec.pose = pose;
        stop = planner::check_stop(state, policy);
        Action action = Action::stop;
        if (!stop) {
          action = planner::next_action(map, pose, state, policy, parse.target_category, opts.planner);
          if (action == Action::stop) stop = state.stop_reason;
        }
        rec.goal = state.long_term_goal;
        rec.frontier_count = static_cast<int>(mapper::detect_frontiers(map).size());
        rec.best_itm = state.best_itm();
        rec.memory_size = static_cast<int>(state.memory.size());
        if (stop) {
          state.mode = Mode::done;
          state.stop_reason = stop;
          rec.action = Action::stop;
          rec.mode = Mode::done;
          rec.stop_reason = stop;
          trace.steps.push_back(rec);
          break;
        }
        const auto moved = world::step(scene, pose, action, kin);
        rec.action = action;
        rec.collided = moved.collided;
        rec.mode = state.mode;
        trace.steps.push_back(rec);
        pose = moved.pose;
        ++state.total_steps;
        ++state.steps_since_replan;
        state.last_collided = moved.collided;
        if (moved.collided) ++result.collisions;
      }
      if (opts.snapshot_every > 0) out.map_snapshots.emplace_back(state.total_steps, map);
    }

    // answer image: highest ITM score, earliest on ties
    const planner::MemoryEntry* best = nullptr;
    for (const auto& m : state.memory) {
      if (!best || m.itm_score > best->itm_score) best = &m;
    }
    const oracles::StructuredSnapshot& answer_snap = best ? snapshots.at(best->snapshot_ref) : last_snapshot;
    result.answer_pose = best ? best->pose : pose;
    result.predicted_answer = oracle.vqa_answer(oracles::Snapshot{answer_snap}, qa.question);
    out.answer_snapshot = answer_snap;
  } catch (const oracles::OracleError& e) {
    result.error = e.what();
    trace.error = e.what();
    result.answer_pose = pose;
  }

  result.steps = state.total_steps;
  result.stop_reason = stop;
  result.correct = !result.error && answers_match(result.predicted_answer, result.gt_answer);
  result.d_T = reach_distance(scene, result.answer_pose, qa.end_pose);
  trace.answer = result.predicted_answer;
  out.memory = state.memory;
  return out;
}

// ---------------------------------------------------------------------------
// Trace serialization (JSONL: header object, then one object per step)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json config_to_json(const EpisodeConfig& c) {
  nlohmann::ordered_json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["offset"] = std::string(world::to_string(c.start_offset));
  j["seed"] = c.seed;
  j["max_steps"] = c.max_steps;
  j["replan_interval"] = c.replan_interval;
  j["oracle"] = c.oracle_mode == oracles::OracleMode::mock ? "mock" : "remote";
  j["vqa_only"] = c.vqa_only;
  if (c.start_override) {
    j["start_override"] = {c.start_override->x, c.start_override->y, rad_to_deg(c.start_override->theta)};
  }
  return j;
}

inline std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  nlohmann::ordered_json h;
  h["v"] = kTraceVersion;
  h["kind"] = "header";
  h["scene"] = t.header.scene_id;
  h["qa"] = t.header.qa_index;
  h["question"] = t.header.question;
  h["category"] = t.header.target_category;
  h["declarative"] = t.header.declarative;
  h["config"] = config_to_json(t.header.config);
  h["start"] = {t.header.start.x, t.header.start.y, t.header.start.theta};
  out += h.dump();
  out += '\n';
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    nlohmann::ordered_json j;
    j["v"] = kTraceVersion;
    j["step"] = s.step;
    j["pose"] = {s.pose.x, s.pose.y, s.pose.theta};
    j["action"] = std::string(to_string(s.action));
    j["collided"] = s.collided;
    j["goal"] = s.goal ? nlohmann::ordered_json{s.goal->row, s.goal->col} : nlohmann::ordered_json(nullptr);
    j["mode"] = std::string(planner::to_string(s.mode));
    j["frontier_count"] = s.frontier_count;
    j["memory_size"] = s.memory_size;
    j["best_itm"] = s.best_itm ? nlohmann::ordered_json(*s.best_itm) : nlohmann::ordered_json(nullptr);
    if (i + 1 == t.steps.size()) {
      j["stop_reason"] =
          s.stop_reason ? nlohmann::ordered_json(std::string(planner::to_string(*s.stop_reason))) : nullptr;
      j["answer"] = t.answer;
      if (t.error) j["error"] = *t.error;
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace eqa::harness
