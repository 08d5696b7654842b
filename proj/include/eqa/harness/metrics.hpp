#pragma once

#include <span>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/harness/episode.hpp"

namespace eqa::harness {

struct Metrics {
  double top1 = 0.0;
  double mean_d_T = 0.0;
  double collision_rate = 0.0;  // episodes with at least one collision / total
  double strict_success = 0.0;  // correct and collision-free / total
  int episodes = 0;
  int errors = 0;
};

inline Metrics compute_metrics(std::span<const EpisodeResult> results) {
  if (results.empty()) throw ValidationError("compute_metrics: empty result list");
  Metrics m;
  m.episodes = static_cast<int>(results.size());
  int correct = 0;
  int collided = 0;
  int strict = 0;
  double d_sum = 0.0;
  for (const auto& r : results) {
    correct += r.correct ? 1 : 0;
    collided += r.collisions > 0 ? 1 : 0;
    strict += r.strict_success() ? 1 : 0;
    m.errors += r.error ? 1 : 0;
    d_sum += r.d_T;
  }
  const double n = static_cast<double>(results.size());
  m.top1 = correct / n;
  m.mean_d_T = d_sum / n;
  m.collision_rate = collided / n;
  m.strict_success = strict / n;
  return m;
}

inline Metrics compute_metrics(const std::vector<EpisodeResult>& results) {
  return compute_metrics(std::span<const EpisodeResult>(results));
}

}  // namespace eqa::harness
