#include <gtest/gtest.h>

#include "support.hpp"

namespace eqa {
namespace {

using oracles::InstanceView;
using oracles::MockOracle;
using oracles::StructuredSnapshot;

InstanceView view_of(const world::GridScene& s, const std::string& id) {
  const auto* o = s.find_object(id);
  EXPECT_NE(o, nullptr) << id;
  return {o->id, o->category, o->attributes, s.room_at(o->center).value_or(""), 1.0, 0.0, 0.5};
}

StructuredSnapshot showing(const world::GridScene& s, std::initializer_list<const char*> ids) {
  StructuredSnapshot snap;
  for (const char* id : ids) snap.instances.push_back(view_of(s, id));
  return snap;
}

TEST(ParseQuestion, Templates) {
  MockOracle o;
  const auto p1 = o.parse_question("What color are the cabinets in the kitchen?");
  EXPECT_EQ(p1.target_category, "cabinet");
  EXPECT_EQ(p1.declarative, "the cabinets in the kitchen");

  const auto p2 = o.parse_question("Where is the plant?");
  EXPECT_EQ(p2.target_category, "plant");
  EXPECT_EQ(p2.declarative, "the plant");

  const auto p3 = o.parse_question("What room is the blue sofa located in?");
  EXPECT_EQ(p3.target_category, "sofa");
  EXPECT_EQ(p3.declarative, "the blue sofa");

  const auto p4 = o.parse_question("What is on the cabinet in the kitchen?");
  EXPECT_EQ(p4.target_category, "cabinet");
  EXPECT_EQ(p4.declarative, "the cabinet in the kitchen");

  const auto p5 = o.parse_question("How many chairs are in the living room?");
  EXPECT_EQ(p5.target_category, "chair");
  EXPECT_EQ(p5.declarative, "the chairs in the living room");
}

TEST(ParseQuestion, CaseAndPunctuationInsensitive) {
  MockOracle o;
  EXPECT_EQ(o.parse_question("  WHAT COLOUR is the Lamp ?"), o.parse_question("what color is the lamp"));
}

TEST(ParseQuestion, UnparseableInMockMode) {
  MockOracle o;
  EXPECT_THROW(o.parse_question("Flibber the wug?"), oracles::UnparseableQuestion);
  EXPECT_THROW(o.parse_question(""), oracles::UnparseableQuestion);
}

TEST(ParseQuestion, QuestionTypes) {
  using world::QuestionType;
  const std::pair<const char*, QuestionType> cases[] = {
      {"What color is the sofa?", QuestionType::color},
      {"Which room is the desk in?", QuestionType::room},
      {"In what room is the bench?", QuestionType::room},
      {"Where are the chairs located?", QuestionType::location},
      {"What is under the table?", QuestionType::what_is},
      {"What is next to the bed?", QuestionType::what_is},
      {"How many lamps are there?", QuestionType::count},
  };
  for (const auto& [q, t] : cases) {
    const auto p = oracles::parse_question_rules(q);
    ASSERT_TRUE(p.has_value()) << q;
    EXPECT_EQ(p->type, t) << q;
  }
}

TEST(Singularize, SuffixRulesAndIrregulars) {
  const std::pair<const char*, const char*> cases[] = {
      {"cabinets", "cabinet"}, {"boxes", "box"},     {"benches", "bench"}, {"shelves", "shelf"},
      {"libraries", "library"}, {"glass", "glass"}, {"sofa", "sofa"},     {"dresses", "dress"},
  };
  for (const auto& [in, out] : cases) EXPECT_EQ(oracles::singularize(in), out) << in;
}

TEST(Itm, ScoringTable) {
  const auto s = test::load_fixture("two_room");
  MockOracle o;
  const std::string decl = o.parse_question(s.qa_items[0].question).declarative;
  EXPECT_EQ(o.itm_score(showing(s, {"cab1"}), decl), 0.9);
  EXPECT_EQ(o.itm_score(showing(s, {"cab2", "sofa1"}), decl), 0.5);  // cabinet in the wrong room
  EXPECT_EQ(o.itm_score(showing(s, {"sofa1", "table1"}), decl), 0.05);
  EXPECT_EQ(o.itm_score(showing(s, {}), decl), 0.05);
  EXPECT_EQ(o.itm_score(showing(s, {"cab2", "cab1"}), decl), 0.9);
}

TEST(Itm, SeparationOnEveryFixtureQuestion) {
  MockOracle o;
  for (const char* name : {"corridor", "two_room"}) {
    const auto s = test::load_fixture(name);
    for (const auto& qa : s.qa_items) {
      const auto decl = o.parse_question(qa.question).declarative;
      const auto* target = s.find_object(qa.target_instance_id);
      StructuredSnapshot with_target;
      with_target.instances.push_back(view_of(s, target->id));
      // a same-category instance with no qualifier in common
      auto decoy = view_of(s, target->id);
      decoy.id = "decoy";
      decoy.attributes = {{"color", "mauve"}};
      decoy.room = "attic";
      StructuredSnapshot distractor;
      distractor.instances.push_back(decoy);
      const double a = o.itm_score(with_target, decl), b = o.itm_score(distractor, decl),
                   c = o.itm_score(StructuredSnapshot{}, decl);
      EXPECT_GT(a, b) << qa.question;
      EXPECT_GT(b, c) << qa.question;
      EXPECT_EQ(a, 0.9);
      // questions with no qualifier cannot tell the decoy apart
      if (b != 0.9) {
        EXPECT_EQ(b, 0.5) << qa.question;
      }
    }
  }
}

TEST(Vqa, AnswersFromGroundTruthAttributes) {
  const auto s = test::load_fixture("two_room");
  MockOracle o;
  EXPECT_EQ(o.vqa_answer(showing(s, {"cab1", "vase1"}), s.qa_items[0].question), "brown");
  EXPECT_EQ(o.vqa_answer(showing(s, {"sofa1"}), s.qa_items[1].question), "living room");
  EXPECT_EQ(o.vqa_answer(showing(s, {"table1"}), s.qa_items[2].question), "room kitchen");
  EXPECT_EQ(o.vqa_answer(showing(s, {"cab1", "vase1"}), s.qa_items[3].question), "vase");
  EXPECT_EQ(o.vqa_answer(showing(s, {"chair1", "chair2"}), s.qa_items[4].question), "2");
  EXPECT_EQ(o.vqa_answer(showing(s, {"chair1"}), s.qa_items[4].question), "1");
}

TEST(Vqa, UnknownWhenTargetNotVisible) {
  const auto s = test::load_fixture("two_room");
  MockOracle o;
  EXPECT_EQ(o.vqa_answer(showing(s, {"sofa1"}), s.qa_items[0].question), "unknown");
  EXPECT_EQ(o.vqa_answer(showing(s, {"cab2"}), s.qa_items[0].question), "unknown");
  EXPECT_EQ(o.vqa_answer(showing(s, {"cab1"}), s.qa_items[3].question), "unknown");  // vase not in view
  EXPECT_EQ(o.vqa_answer(showing(s, {"cab1"}), "Flibber the wug?"), "unknown");
}

TEST(Vqa, RoomQuestionUsesCenterContainment) {
  const auto s = test::load_fixture("two_room");
  MockOracle o;
  auto snap = showing(s, {"table1"});
  EXPECT_EQ(o.vqa_answer(snap, "What room is the black table in?"), "kitchen");
}

TEST(MockOracle, PureAndRejectsImages) {
  const auto s = test::load_fixture("two_room");
  MockOracle a, b;
  const auto snap = showing(s, {"cab1", "cab2"});
  EXPECT_EQ(a.itm_score(snap, "the cabinets in the kitchen"), b.itm_score(snap, "the cabinets in the kitchen"));
  EXPECT_EQ(a.vqa_answer(snap, s.qa_items[0].question), a.vqa_answer(snap, s.qa_items[0].question));
  EXPECT_THROW(a.itm_score(oracles::EncodedImage{}, "the cabinet"), oracles::OracleError);
}

TEST(Snapshot, JsonRoundTrip) {
  const auto s = test::load_fixture("two_room");
  const auto pose = s.qa_items[0].end_pose;
  const auto snap = oracles::make_snapshot(s, pose, world::observe(s, pose, {}, 3));
  ASSERT_FALSE(snap.instances.empty());
  EXPECT_EQ(snap.step, 3);
  const auto back = oracles::snapshot_from_json(nlohmann::json::parse(oracles::to_json(snap).dump()));
  EXPECT_EQ(back, snap);
}

TEST(Base64, KnownVectors) {
  auto enc = [](std::string_view s) { return oracles::base64_encode(std::vector<std::uint8_t>(s.begin(), s.end())); };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
  EXPECT_EQ(oracles::base64_encode({0xff, 0x00, 0xfe}), "/wD+");
}

}  // namespace
}  // namespace eqa
