#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eqa/common.hpp"
#include "eqa/oracles/language.hpp"
#include "eqa/oracles/snapshot.hpp"

namespace eqa::oracles {

struct OracleError : Error {
  using Error::Error;
};

// Mock parser found no template, or a remote parse reply was unusable.
struct UnparseableQuestion : OracleError {
  using OracleError::OracleError;
};

struct QuestionParse {
  std::string target_category;
  std::string declarative;

  friend bool operator==(const QuestionParse&, const QuestionParse&) = default;
};

// The three language/vision contracts the pipeline depends on.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual QuestionParse parse_question(std::string_view question) = 0;
  virtual double itm_score(const Snapshot& snapshot, std::string_view declarative) = 0;
  virtual std::string vqa_answer(const Snapshot& snapshot, std::string_view question) = 0;
};

inline constexpr double kItmMatch = 0.9;
inline constexpr double kItmDistractor = 0.5;
inline constexpr double kItmNone = 0.05;

// True when `v` is of `category` and every qualifier word appears among its
// attribute values or room label.
inline bool instance_matches(const InstanceView& v, std::string_view category,
                             const std::vector<std::string>& qualifiers) {
  if (v.category != category) return false;
  std::set<std::string> words;
  for (const auto& [k, val] : v.attributes) {
    for (auto& t : tokenize(val)) words.insert(std::move(t));
  }
  for (auto& t : tokenize(v.room)) words.insert(std::move(t));
  return std::all_of(qualifiers.begin(), qualifiers.end(), [&](const std::string& q) { return words.count(q) != 0; });
}

// Ground-truth oracles over structured snapshots. Deterministic and stateless.
class MockOracle final : public Oracle {
 public:
  QuestionParse parse_question(std::string_view question) override {
    auto parsed = parse_question_rules(question);
    if (!parsed) throw UnparseableQuestion("unparseable question: \"" + std::string(question) + "\"");
    return {parsed->category, parsed->declarative};
  }

  double itm_score(const Snapshot& snapshot, std::string_view declarative) override {
    const auto& s = structured(snapshot);
    const auto category = head_noun(declarative);
    if (!category) return kItmNone;
    const auto quals = qualifier_tokens(declarative, *category);
    bool same_category = false;
    for (const auto& v : s.instances) {
      if (instance_matches(v, *category, quals)) return kItmMatch;
      same_category = same_category || v.category == *category;
    }
    return same_category ? kItmDistractor : kItmNone;
  }

  std::string vqa_answer(const Snapshot& snapshot, std::string_view question) override {
    using world::QuestionType;
    const auto& s = structured(snapshot);
    const auto parsed = parse_question_rules(question);
    if (!parsed) return "unknown";
    const auto quals = qualifier_tokens(parsed->declarative, parsed->category);
    std::vector<const InstanceView*> matching;
    for (const auto& v : s.instances) {
      if (instance_matches(v, parsed->category, quals)) matching.push_back(&v);
    }
    if (matching.empty()) return "unknown";
    std::stable_sort(matching.begin(), matching.end(), [](const InstanceView* a, const InstanceView* b) {
      if (a->visibility != b->visibility) return a->visibility > b->visibility;
      return a->id < b->id;
    });
    const InstanceView& ref = *matching.front();
    switch (parsed->type) {
      case QuestionType::color: {
        const auto it = ref.attributes.find("color");
        return it == ref.attributes.end() ? "unknown" : it->second;
      }
      case QuestionType::room: return ref.room.empty() ? "unknown" : ref.room;
      case QuestionType::location: return ref.room.empty() ? "unknown" : "room " + ref.room;
      case QuestionType::what_is: {
        std::string key = parsed->relation;
        std::replace(key.begin(), key.end(), ' ', '_');
        for (const auto& v : s.instances) {
          const auto it = v.attributes.find(key);
          if (it != v.attributes.end() && it->second == ref.id) return v.category;
        }
        return "unknown";
      }
      case QuestionType::count: return std::to_string(matching.size());
    }
    return "unknown";
  }

 private:
  static const StructuredSnapshot& structured(const Snapshot& s) {
    if (const auto* p = std::get_if<StructuredSnapshot>(&s)) return *p;
    throw OracleError("mock oracle cannot read encoded images");
  }
};

}  // namespace eqa::oracles
