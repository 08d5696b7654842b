#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace eqa {
namespace {

using mapper::CellState;
using mapper::SemanticMap;

int count_state(const SemanticMap& m, CellState st) {
  int n = 0;
  for (int r = 0; r < m.frame().height; ++r) {
    for (int c = 0; c < m.frame().width; ++c) n += m.state({r, c}) == st;
  }
  return n;
}

world::Observation synthetic_contact(const GridFrame& f, double visibility, std::vector<Cell> cells) {
  world::Observation obs;
  obs.frame = f;
  world::Contact c;
  c.instance_id = "chair1";
  c.category = "chair";
  c.visibility_fraction = visibility;
  c.visible_cells = std::move(cells);
  obs.contacts.push_back(c);
  return obs;
}

TEST(UpdateMap, SingleRayCarvesTwentyCells) {
  const auto s = test::load_fixture("corridor");
  // just inside col 142, wall face at col 162: 1.00 m of free space
  const AgentPose pose{142 * 0.05 + 1e-6, 0.175, 0.0};
  const SensorConfig one_ray{1, 1.0, 5.0};
  const auto obs = world::observe(s, pose, one_ray);
  ASSERT_EQ(obs.rays.size(), 1u);
  EXPECT_NEAR(obs.rays[0], 1.00, 1e-5);

  SemanticMap m(s.frame);
  mapper::update_map(m, pose, obs, {0.2});
  EXPECT_EQ(count_state(m, CellState::free), 20);
  EXPECT_EQ(count_state(m, CellState::obstacle), 1);
  EXPECT_EQ(m.state({3, 162}), CellState::obstacle);
  for (int c = 142; c < 162; ++c) EXPECT_EQ(m.state({3, c}), CellState::free) << c;
  EXPECT_EQ(m.known_count(), 21u);
}

TEST(UpdateMap, MaxRangeRayMarksNoObstacle) {
  const auto s = test::load_fixture("corridor");
  const AgentPose pose{1.0, 0.175, 0.0};
  const auto obs = world::observe(s, pose, SensorConfig{1, 1.0, 5.0});
  ASSERT_DOUBLE_EQ(obs.rays[0], 5.0);
  SemanticMap m(s.frame);
  mapper::update_map(m, pose, obs, {0.2});
  EXPECT_EQ(count_state(m, CellState::obstacle), 0);
  EXPECT_EQ(count_state(m, CellState::free), 100);  // cols 20..119 of row 3
}

TEST(UpdateMap, AlphaGatesSemanticProjection) {
  const GridFrame f{10, 10, 0.05};
  const auto obs = synthetic_contact(f, 0.25, {{2, 2}, {2, 3}});
  for (double alpha : {0.3, 0.26}) {
    SemanticMap m(f);
    mapper::update_map(m, {0.0, 0.0, 0.0}, obs, {alpha});
    EXPECT_TRUE(m.channels().empty()) << alpha;
  }
  for (double alpha : {0.25, 0.2, 0.0}) {
    SemanticMap m(f);
    mapper::update_map(m, {0.0, 0.0, 0.0}, obs, {alpha});
    ASSERT_EQ(m.channels().count("chair"), 1u) << alpha;
    EXPECT_EQ(m.channels().at("chair").size(), 2u);
    EXPECT_DOUBLE_EQ(m.channels().at("chair").at({2, 2}), 0.25);
    EXPECT_EQ(m.state({2, 2}), CellState::obstacle);
  }
}

TEST(UpdateMap, ConfidenceKeepsTheMaximum) {
  const GridFrame f{10, 10, 0.05};
  SemanticMap m(f);
  mapper::update_map(m, {}, synthetic_contact(f, 0.6, {{1, 1}}), {0.1});
  mapper::update_map(m, {}, synthetic_contact(f, 0.3, {{1, 1}, {1, 2}}), {0.1});
  EXPECT_DOUBLE_EQ(m.channels().at("chair").at({1, 1}), 0.6);
  EXPECT_DOUBLE_EQ(m.channels().at("chair").at({1, 2}), 0.3);
}

TEST(UpdateMap, FrameMismatchThrows) {
  const auto s = test::load_fixture("corridor");
  SemanticMap m(GridFrame{10, 10, 0.05});
  EXPECT_THROW(mapper::update_map(m, {1.0, 0.5, 0.0}, world::observe(s, {1.0, 0.5, 0.0}), {0.1}),
               FrameMismatchError);
}

TEST(SemanticMap, StatesOnlyRefine) {
  SemanticMap m(GridFrame{4, 4, 0.05});
  m.mark_obstacle({1, 1});
  m.mark_free({1, 1});
  EXPECT_EQ(m.state({1, 1}), CellState::obstacle);
  m.mark_free({2, 2});
  m.mark_obstacle({2, 2});
  EXPECT_EQ(m.state({2, 2}), CellState::obstacle);
  EXPECT_EQ(m.known_count(), 2u);
  EXPECT_EQ(m.state({-1, 0}), CellState::obstacle);
}

// ---------------------------------------------------------------------------
// Frontiers and targets
// ---------------------------------------------------------------------------

TEST(Frontiers, SingleFreeCellIsTheOnlyFrontier) {
  SemanticMap m(GridFrame{7, 7, 0.05});
  m.mark_free({3, 3});
  const auto f = mapper::detect_frontiers(m);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0], (Cell{3, 3}));
}

TEST(Frontiers, FullyExploredMapHasNone) {
  SemanticMap m(GridFrame{6, 5, 0.05});
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 6; ++c) (r + c) % 3 ? m.mark_free({r, c}) : m.mark_obstacle({r, c});
  }
  EXPECT_TRUE(mapper::detect_frontiers(m).empty());
}

TEST(Frontiers, DiagonalUnknownDoesNotCount) {
  SemanticMap m(GridFrame{3, 3, 0.05});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!(r == 0 && c == 0)) m.mark_free({r, c});
    }
  }
  // (0,0) is unknown: (0,1) and (1,0) are frontiers, (1,1) is not
  const auto f = mapper::detect_frontiers(m);
  EXPECT_EQ(f, (std::vector<Cell>{{0, 1}, {1, 0}}));
}

TEST(Frontiers, MatchesExhaustiveScan) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    const auto rm = test::random_partial_map(rng, 16, 16);
    const auto got = mapper::detect_frontiers(rm.map);
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    EXPECT_EQ(std::set<Cell>(got.begin(), got.end()).size(), got.size());
    EXPECT_EQ(std::set<Cell>(got.begin(), got.end()), test::brute_frontiers(rm.glyphs));
  }
}

TEST(TargetCells, UnknownCategoryIsEmpty) {
  SemanticMap m(GridFrame{8, 8, 0.05});
  const auto t = mapper::target_cells(m, "sofa");
  EXPECT_TRUE(t.cells.empty());
  EXPECT_FALSE(t.centroid.has_value());
  EXPECT_FALSE(t.mean.has_value());
}

TEST(TargetCells, CentroidTieGoesToFirstCell) {
  SemanticMap m(GridFrame{8, 8, 0.05});
  m.add_semantic("sofa", {3, 4}, 0.5);
  m.add_semantic("sofa", {3, 3}, 0.5);
  const auto t = mapper::target_cells(m, "sofa");
  ASSERT_TRUE(t.centroid.has_value());
  EXPECT_EQ(*t.centroid, (Cell{3, 3}));
  EXPECT_NEAR(t.mean->x, 3.5 * 0.05 + 0.025, 1e-12);
  EXPECT_NEAR(t.mean->y, 3 * 0.05 + 0.025, 1e-12);
}

TEST(TargetCells, CentroidIsAChannelCellNearestTheMean) {
  SemanticMap m(GridFrame{10, 10, 0.05});
  // mean (13/6, 13/6); (1,2) and (2,1) tie, row-major order wins
  for (Cell c : std::vector<Cell>{{1, 1}, {2, 1}, {3, 1}, {1, 2}, {1, 3}, {5, 5}}) m.add_semantic("desk", c, 1.0);
  const auto t = mapper::target_cells(m, "desk");
  EXPECT_EQ(*t.centroid, (Cell{1, 2}));
}

// ---------------------------------------------------------------------------
// Properties along observation streams
// ---------------------------------------------------------------------------

struct Stream {
  std::vector<AgentPose> poses;
  std::vector<world::Observation> obs;
};

Stream random_stream(const world::GridScene& s, std::uint64_t seed, int n) {
  Stream out;
  std::mt19937_64 rng(seed);
  AgentPose p = world::random_start(s, s.qa_items[0], seed);
  for (int i = 0; i < n; ++i) {
    out.poses.push_back(p);
    out.obs.push_back(world::observe(s, p, {}, i));
    // bias towards forward so the walk covers ground
    const auto a = rng() % 4 == 0 ? (rng() % 2 ? Action::turn_left : Action::turn_right) : Action::forward;
    p = world::step(s, p, a).pose;
  }
  return out;
}

TEST(MapProperties, MonotoneAndSoundOnFixtures) {
  for (const char* name : {"two_room", "corridor"}) {
    const auto s = test::load_fixture(name);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto st = random_stream(s, seed, 80);
      SemanticMap m(s.frame);
      std::size_t known = 0;
      for (std::size_t i = 0; i < st.obs.size(); ++i) {
        mapper::update_map(m, st.poses[i], st.obs[i], {0.1});
        EXPECT_GE(m.known_count(), known);
        known = m.known_count();
        ASSERT_EQ(test::map_violations(m, s), 0) << name << " seed " << seed << " step " << i;
      }
      EXPECT_GT(known, 200u);
    }
  }
}

TEST(MapProperties, AlphaMonotone) {
  const auto s = test::load_fixture("two_room");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto st = random_stream(s, seed + 100, 80);
    std::vector<SemanticMap> maps;
    for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.6}) {
      SemanticMap m(s.frame);
      for (std::size_t i = 0; i < st.obs.size(); ++i) mapper::update_map(m, st.poses[i], st.obs[i], {alpha});
      maps.push_back(std::move(m));
    }
    for (std::size_t k = 1; k < maps.size(); ++k) {
      for (const auto& [cat, ch] : maps[k].channels()) {
        ASSERT_TRUE(maps[k - 1].channels().count(cat));
        for (const auto& [cell, conf] : ch) EXPECT_TRUE(maps[k - 1].channels().at(cat).count(cell));
      }
    }
  }
}

TEST(MapProperties, ZeroAlphaChannelsCoverVisibleFootprints) {
  const auto s = test::load_fixture("two_room");
  SemanticMap m(s.frame);
  std::map<std::string, std::set<Cell>> seen;
  // spin in place at a grid of poses across both rooms
  for (int r = 15; r < 60; r += 10) {
    for (int c = 8; c < 100; c += 12) {
      if (!s.traversable(Cell{r, c})) continue;
      for (int h = 0; h < 12; ++h) {
        const auto pose = test::cell_pose({r, c}, 30.0 * h);
        const auto obs = world::observe(s, pose);
        mapper::update_map(m, pose, obs, {0.0});
        for (const auto& ct : obs.contacts) seen[ct.category].insert(ct.visible_cells.begin(), ct.visible_cells.end());
      }
    }
  }
  ASSERT_FALSE(seen.empty());
  for (const auto& [cat, cells] : seen) {
    ASSERT_TRUE(m.channels().count(cat)) << cat;
    for (const auto& c : cells) EXPECT_TRUE(m.channels().at(cat).count(c));
  }
  // and every channel cell is a true footprint cell of that category
  for (const auto& [cat, ch] : m.channels()) {
    for (const auto& [cell, conf] : ch) {
      const int k = s.owner(cell);
      ASSERT_GE(k, 0);
      EXPECT_EQ(s.objects[static_cast<std::size_t>(k)].category, cat);
    }
  }
}

TEST(MapExport, TextAndChannelsJson) {
  SemanticMap m(GridFrame{4, 3, 0.05});
  m.mark_free({0, 0});
  m.mark_obstacle({0, 1});
  m.add_semantic("sofa", {2, 3}, 0.4);
  m.add_semantic("chair", {1, 2}, 0.7);
  const auto lines = mapper::map_to_text(m);
  EXPECT_EQ(lines, (std::vector<std::string>{".#??", "??A?", "???B"}));
  const auto j = mapper::map_channels_json(m);
  EXPECT_EQ(j["legend"]["A"], "chair");
  EXPECT_EQ(j["channels"]["sofa"][0], nlohmann::ordered_json({2, 3, 0.4}));
}

}  // namespace
}  // namespace eqa
