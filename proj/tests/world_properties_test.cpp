// Randomized checks of the world invariants against brute-force references.
#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace eqa {
namespace {

AgentPose random_free_pose(const world::GridScene& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const Point p{u(rng) * s.frame.width * s.frame.cell_size, u(rng) * s.frame.height * s.frame.cell_size};
    if (s.is_free(s.frame.cell_of(p))) return {p.x, p.y, u(rng) * kTwoPi};
  }
}

TEST(RaySoundness, MatchesExactIntersection) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  int rays = 0;
  for (int k = 0; k < 40; ++k) {
    const auto s = test::random_scene(rng, 32, 32, 0.08, 4);
    for (int i = 0; i < 10; ++i) {
      const auto pose = random_free_pose(s, rng);
      for (double b : world::ray_bearings(SensorConfig{})) {
        const double a = pose.theta + b;
        const double got = world::cast_ray(s, pose.position(), a, 5.0);
        ASSERT_NEAR(got, test::brute_ray_hit(s, pose.position(), a, 5.0), 1e-9);
        // every cell strictly before the hit is free
        traverse_ray(s.frame, pose.position(), a, got, [&](Cell c, double t) {
          if (t < got - 1e-9) {
            EXPECT_FALSE(s.solid(c));
          }
          return true;
        });
        ++rays;
      }
    }
  }
  EXPECT_EQ(rays, 40 * 10 * 90);
}

TEST(ContactCompleteness, MatchesPerCellVisibility) {
  std::mt19937_64 rng(12);
  int contacts = 0;
  for (int k = 0; k < 60; ++k) {
    const auto s = test::random_scene(rng, 32, 32, 0.06, 6);
    for (int i = 0; i < 5; ++i) {
      const auto pose = random_free_pose(s, rng);
      const SensorConfig cfg;
      const auto obs = world::observe(s, pose, cfg);
      std::set<std::string> got;
      for (const auto& c : obs.contacts) {
        got.insert(c.instance_id);
        for (const auto& cell : c.visible_cells) {
          EXPECT_TRUE(test::brute_line_of_sight(s, pose.position(), cell));
        }
        const auto* obj = s.find_object(c.instance_id);
        ASSERT_NE(obj, nullptr);
        EXPECT_DOUBLE_EQ(c.visibility_fraction,
                         static_cast<double>(c.visible_cells.size()) / static_cast<double>(obj->footprint.size()));
      }
      EXPECT_EQ(got, test::brute_contacts(s, pose, cfg));
      contacts += static_cast<int>(got.size());
    }
  }
  EXPECT_GT(contacts, 100);  // the check is not vacuous
}

TEST(PoseValidity, RandomWalksStayOnTraversableCells) {
  const auto s = test::load_fixture("two_room");
  std::mt19937_64 rng(5);
  int collisions = 0;
  for (int walk = 0; walk < 50; ++walk) {
    AgentPose p = world::random_start(s, s.qa_items[0], rng());
    for (int i = 0; i < 200; ++i) {
      const auto a = static_cast<Action>(rng() % 3);
      const auto r = world::step(s, p, a);
      collisions += r.collided;
      p = r.pose;
      ASSERT_TRUE(s.traversable(p.position()));
      ASSERT_GE(p.theta, 0.0);
      ASSERT_LT(p.theta, kTwoPi);
    }
  }
  EXPECT_GT(collisions, 0);
}

TEST(PathOptimality, AstarMatchesBellmanFord) {
  std::mt19937_64 rng(13);
  int solved = 0;
  while (solved < 200) {
    const auto s = test::random_scene(rng, 16, 16, 0.2, 0);
    // mix of unit and doubled costs exercises the octile bound
    std::vector<double> mult(s.frame.size());
    for (auto& m : mult) m = rng() % 4 == 0 ? 2.0 : 1.0;
    auto cost = [&](Cell c) { return s.is_free(c) ? mult[s.frame.index(c)] : -1.0; };
    const Cell a{static_cast<int>(rng() % 16), static_cast<int>(rng() % 16)};
    const Cell b{static_cast<int>(rng() % 16), static_cast<int>(rng() % 16)};
    if (!s.is_free(a) || !s.is_free(b)) continue;
    const auto ref = test::bellman_ford(16, 16, 0.05, a, cost);
    const double want = ref[s.frame.index(b)];
    const auto got = astar(s.frame, a, b, cost);
    if (!std::isfinite(want)) {
      EXPECT_FALSE(got.has_value());
      continue;
    }
    ASSERT_TRUE(got.has_value());
    EXPECT_NEAR(got->length_m, want, 1e-9);
    const auto walked = test::path_cost(got->cells, 0.05, cost);
    ASSERT_TRUE(walked.has_value());
    EXPECT_NEAR(*walked, got->length_m, 1e-9);
    EXPECT_EQ(got->cells.front(), a);
    EXPECT_EQ(got->cells.back(), b);
    ++solved;
  }
}

TEST(PathOptimality, SceneGeodesicMatchesBellmanFord) {
  std::mt19937_64 rng(14);
  int solved = 0;
  while (solved < 100) {
    const auto s = test::random_scene(rng, 16, 16, 0.08, 2);
    const Cell a{static_cast<int>(rng() % 16), static_cast<int>(rng() % 16)};
    const Cell b{static_cast<int>(rng() % 16), static_cast<int>(rng() % 16)};
    if (!s.traversable(a) || !s.traversable(b)) continue;
    const auto ref = test::bellman_ford(16, 16, 0.05, a, [&](Cell c) { return s.traversable(c) ? 1.0 : -1.0; });
    const double want = ref[s.frame.index(b)];
    if (!std::isfinite(want)) {
      EXPECT_THROW(world::shortest_path(s, a, b), NoPathError);
      continue;
    }
    EXPECT_NEAR(world::shortest_path(s, a, b).length_m, want, 1e-9);
    ++solved;
  }
}

TEST(Determinism, ObservationStreamsRepeat) {
  const auto s = test::load_fixture("two_room");
  auto stream = [&] {
    std::string out;
    AgentPose p = world::make_start(s, s.qa_items[1], world::StartOffset::random, 9);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 60; ++i) {
      const auto obs = world::observe(s, p, {}, i);
      out += oracles::to_json(oracles::make_snapshot(s, p, obs)).dump();
      p = world::step(s, p, static_cast<Action>(rng() % 3)).pose;
    }
    return out;
  };
  EXPECT_EQ(stream(), stream());
}

}  // namespace
}  // namespace eqa
