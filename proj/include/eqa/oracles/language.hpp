#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqa/world/scene.hpp"

namespace eqa::oracles {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string singularize(std::string_view word) {
  static const std::array<std::pair<std::string_view, std::string_view>, 10> irregular{{
      {"people", "person"},
      {"children", "child"},
      {"men", "man"},
      {"women", "woman"},
      {"feet", "foot"},
      {"teeth", "tooth"},
      {"mice", "mouse"},
      {"knives", "knife"},
      {"shelves", "shelf"},
      {"leaves", "leaf"},
  }};
  const std::string w = to_lower(word);
  for (const auto& [pl, sg] : irregular) {
    if (w == pl) return std::string(sg);
  }
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  for (std::string_view suf : {"sses", "shes", "ches", "xes", "zes"}) {
    if (ends_with(w, suf)) return w.substr(0, w.size() - 2);
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (w.size() > 1 && ends_with(w, "s")) return w.substr(0, w.size() - 1);
  return w;
}

inline std::string pluralize(std::string_view word) {
  const std::string w = to_lower(word);
  if (w == "shelf") return "shelves";
  if (w == "knife") return "knives";
  for (std::string_view suf : {"s", "sh", "ch", "x", "z"}) {
    if (ends_with(w, suf)) return w + "es";
  }
  if (w.size() > 2 && ends_with(w, "y") && std::string_view("aeiou").find(w[w.size() - 2]) == std::string_view::npos) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  return w + "s";
}

inline bool is_determiner(std::string_view t) {
  static const std::set<std::string_view> dets{"the", "a", "an", "my", "this", "that", "these",
                                               "those", "some", "any", "your", "our", "their"};
  return dets.count(t) != 0;
}

inline bool is_preposition(std::string_view t) {
  static const std::set<std::string_view> preps{"in", "on", "at", "near", "under", "of", "next", "beside", "by",
                                                "behind", "inside", "above", "below", "from", "with", "to", "front"};
  return preps.count(t) != 0;
}

// Singular head noun of a noun phrase: last word before the first
// preposition, after leading determiners.
inline std::optional<std::string> head_noun(std::string_view noun_phrase) {
  auto toks = tokenize(noun_phrase);
  std::size_t b = 0;
  while (b < toks.size() && is_determiner(toks[b])) ++b;
  std::size_t e = b;
  while (e < toks.size() && !is_preposition(toks[e])) ++e;
  if (e == b) return std::nullopt;
  return singularize(toks[e - 1]);
}

// Words of the declarative other than determiners, prepositions and the head
// noun; each must be matched by an instance attribute for that instance to
// be the referenced one.
inline std::vector<std::string> qualifier_tokens(std::string_view declarative, std::string_view category) {
  std::vector<std::string> out;
  for (auto& t : tokenize(declarative)) {
    if (is_determiner(t) || is_preposition(t) || t == "and") continue;
    if (singularize(t) == category) continue;
    out.push_back(std::move(t));
  }
  return out;
}

struct ParsedQuestion {
  world::QuestionType type = world::QuestionType::color;
  std::string category;
  std::string declarative;
  std::string relation;  // what_is only: "on", "under", "next to", ...
};

// Template-driven question parsing (the mock language oracle).
inline std::optional<ParsedQuestion> parse_question_rules(std::string_view question) {
  using world::QuestionType;
  std::string q = to_lower(question);
  // collapse whitespace and drop terminal punctuation
  {
    std::istringstream in(q);
    std::string w, joined;
    while (in >> w) {
      if (!joined.empty()) joined.push_back(' ');
      joined += w;
    }
    q = std::move(joined);
    while (!q.empty() && (q.back() == '?' || q.back() == '.' || q.back() == '!' || q.back() == ' ')) q.pop_back();
  }

  static const std::regex color_re(R"(^what colou?r (?:is|are) (.+)$)");
  static const std::regex room_re(R"(^(?:what|which) room (?:is|are) (.+?) (?:located )?in$)");
  static const std::regex room_in_re(R"(^in (?:what|which) room (?:is|are) (.+)$)");
  static const std::regex where_re(R"(^where (?:is|are) (.+?)(?: located)?$)");
  static const std::regex what_is_re(R"(^what (?:is|are) (on|under|next to|beside|behind|in front of) (.+)$)");
  static const std::regex count_loc_re(R"(^how many (.+?) (?:are|is) (?:there )?((?:in|on|at|near|under) .+)$)");
  static const std::regex count_re(R"(^how many (.+?)(?: are there| is there)?$)");

  ParsedQuestion out;
  std::smatch m;
  if (std::regex_match(q, m, color_re)) {
    out.type = QuestionType::color;
    out.declarative = m[1];
  } else if (std::regex_match(q, m, room_re) || std::regex_match(q, m, room_in_re)) {
    out.type = QuestionType::room;
    out.declarative = m[1];
  } else if (std::regex_match(q, m, what_is_re)) {
    out.type = QuestionType::what_is;
    out.relation = m[1];
    out.declarative = m[2];
  } else if (std::regex_match(q, m, where_re)) {
    out.type = QuestionType::location;
    out.declarative = m[1];
  } else if (std::regex_match(q, m, count_loc_re)) {
    out.type = QuestionType::count;
    out.declarative = "the " + m[1].str() + " " + m[2].str();
  } else if (std::regex_match(q, m, count_re)) {
    out.type = QuestionType::count;
    out.declarative = "the " + m[1].str();
  } else {
    return std::nullopt;
  }
  auto head = head_noun(out.declarative);
  if (!head || head->empty()) return std::nullopt;
  out.category = *head;
  return out;
}

}  // namespace eqa::oracles
