#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "eqa/harness/episode.hpp"
#include "eqa/harness/metrics.hpp"
#include "eqa/harness/table.hpp"

namespace eqa::harness {

struct GridPoint {
  double alpha = 0.0;
  double beta = 0.0;

  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

inline const std::vector<GridPoint>& default_grid() {
  static const std::vector<GridPoint> g{{0.3, 0.0}, {0.2, 0.1}, {0.1, 0.2}};
  return g;
}

// Parses "0.3:0.0,0.2:0.1".
inline std::vector<GridPoint> parse_grid(std::string_view s) {
  std::vector<GridPoint> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    const std::string item(s.substr(pos, comma - pos));
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("grid item \"" + item + "\" is not alpha:beta");
    try {
      out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw ParseError("grid item \"" + item + "\" is not numeric");
    }
    pos = comma + 1;
  }
  return out;
}

inline std::vector<StartOffset> parse_offsets(std::string_view s) {
  std::vector<StartOffset> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    const auto item = s.substr(pos, comma - pos);
    const auto o = world::start_offset_from(item);
    if (!o) throw ParseError("unknown offset \"" + std::string(item) + "\"");
    out.push_back(*o);
    pos = comma + 1;
  }
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-episode seed; the same for every grid point so rows share start poses.
inline std::uint64_t episode_seed(std::uint64_t base, std::string_view scene_id, int qa_index, StartOffset o) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ fnv1a(scene_id));
  h = splitmix64(h ^ static_cast<std::uint64_t>(qa_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(o));
}

struct SweepSpec {
  std::vector<GridPoint> grid = default_grid();
  std::vector<StartOffset> offsets{StartOffset::t10, StartOffset::t30, StartOffset::t50, StartOffset::random};
  std::uint64_t seed = 0;
  bool baseline = false;
  int max_steps = 100;
  int replan_interval = 25;
  unsigned workers = 0;  // 0: hardware concurrency
  bool keep_traces = false;
  RunOptions run;
};

struct SweepEntry {
  std::string row;  // table row label
  std::optional<GridPoint> point;
  StartOffset offset = StartOffset::t10;
  std::string scene_id;
  int qa_index = 0;
  std::uint64_t seed = 0;
  EpisodeResult result;
  std::optional<Trace> trace;                // with keep_traces
  std::vector<planner::MemoryEntry> memory;  // with keep_traces
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // sorted by (row order, offset, scene, qa)
  ResultsTable table;
};

using OracleFactory = std::function<std::unique_ptr<oracles::Oracle>()>;

// Episodes are independent; workers write into preassigned slots, so the
// output order never depends on scheduling.
inline SweepResult run_sweep(const std::vector<world::GridScene>& scenes, const SweepSpec& spec,
                             const OracleFactory& make = [] { return std::make_unique<oracles::MockOracle>(); }) {
  struct Job {
    int row;
    std::optional<GridPoint> point;
    StartOffset offset;
    const world::GridScene* scene;
    int qa;
  };
  std::vector<std::string> labels;
  std::vector<std::optional<GridPoint>> points;
  if (spec.baseline) {
    labels.emplace_back(kBaselineLabel);
    points.emplace_back(std::nullopt);
  }
  for (const auto& g : spec.grid) {
    labels.push_back(ours_label(g.alpha, g.beta));
    points.emplace_back(g);
  }

  std::vector<const world::GridScene*> ordered;
  for (const auto& s : scenes) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<Job> jobs;
  for (int r = 0; r < static_cast<int>(labels.size()); ++r) {
    for (auto o : spec.offsets) {
      for (const auto* s : ordered) {
        for (int q = 0; q < static_cast<int>(s->qa_items.size()); ++q) jobs.push_back({r, points[r], o, s, q});
      }
    }
  }

  SweepResult out;
  out.entries.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    auto oracle = make();
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      EpisodeConfig cfg;
      cfg.start_offset = job.offset;
      cfg.seed = episode_seed(spec.seed, job.scene->id, job.qa, job.offset);
      cfg.max_steps = spec.max_steps;
      cfg.replan_interval = spec.replan_interval;
      if (job.point) {
        cfg.alpha = job.point->alpha;
        cfg.beta = job.point->beta;
      } else {
        cfg.vqa_only = true;
      }
      auto& e = out.entries[i];
      e.row = labels[job.row];
      e.point = job.point;
      e.offset = job.offset;
      e.scene_id = job.scene->id;
      e.qa_index = job.qa;
      e.seed = cfg.seed;
      try {
        auto outcome = run_episode(*job.scene, job.qa, cfg, *oracle, spec.run);
        e.result = std::move(outcome.result);
        if (spec.keep_traces) {
          e.trace = std::move(outcome.trace);
          e.memory = std::move(outcome.memory);
        }
      } catch (const std::exception& ex) {
        e.result.scene_id = job.scene->id;
        e.result.qa_index = job.qa;
        e.result.gt_answer = job.scene->qa_items[job.qa].answer;
        e.result.error = ex.what();
      }
    }
  };
  unsigned n = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  out.table.offsets = spec.offsets;
  for (int r = 0; r < static_cast<int>(labels.size()); ++r) {
    TableRow row{labels[r], {}};
    for (auto o : spec.offsets) {
      std::vector<EpisodeResult> cell;
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].row == r && jobs[i].offset == o) cell.push_back(out.entries[i].result);
      }
      if (cell.empty()) continue;
      const auto m = compute_metrics(cell);
      row.cells[o] = {m.mean_d_T, m.top1, m.episodes, m.errors};
    }
    out.table.rows.push_back(std::move(row));
  }
  return out;
}

inline nlohmann::ordered_json result_to_json(const EpisodeResult& r) {
  nlohmann::ordered_json j;
  j["scene"] = r.scene_id;
  j["qa"] = r.qa_index;
  j["predicted"] = r.predicted_answer;
  j["gt"] = r.gt_answer;
  j["correct"] = r.correct;
  auto metres = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  j["d_T"] = metres(r.d_T);
  j["start_distance"] = metres(r.start_distance);
  j["steps"] = r.steps;
  j["collisions"] = r.collisions;
  j["stop_reason"] = r.stop_reason ? nlohmann::ordered_json(std::string(planner::to_string(*r.stop_reason))) : nullptr;
  j["answer_pose"] = {r.answer_pose.x, r.answer_pose.y, r.answer_pose.theta};
  j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nullptr;
  return j;
}

inline nlohmann::ordered_json sweep_to_json(const SweepResult& s, const SweepSpec& spec) {
  nlohmann::ordered_json j;
  j["v"] = kTraceVersion;
  j["seed"] = spec.seed;
  j["grid"] = nlohmann::ordered_json::array();
  for (const auto& g : spec.grid) j["grid"].push_back({g.alpha, g.beta});
  j["baseline"] = spec.baseline;
  j["table"] = table_to_json(s.table);
  j["episodes"] = nlohmann::ordered_json::array();
  for (const auto& e : s.entries) {
    auto r = result_to_json(e.result);
    r["row"] = e.row;
    r["offset"] = std::string(world::to_string(e.offset));
    r["seed"] = e.seed;
    j["episodes"].push_back(std::move(r));
  }
  return j;
}

}  // namespace eqa::harness
