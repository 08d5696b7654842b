#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqa/harness/metrics.hpp"
#include "eqa/world/episode_start.hpp"

namespace eqa::harness {

struct TableCell {
  double d_T = 0.0;
  double top1 = 0.0;
  int episodes = 0;
  int errors = 0;
};

struct TableRow {
  std::string label;  // "VQA only (w/o navigation)" or "Ours (alpha=0.1, beta=0.2)"
  std::map<StartOffset, TableCell> cells;
};

struct ResultsTable {
  std::vector<StartOffset> offsets;
  std::vector<TableRow> rows;
};

inline std::string ours_label(double alpha, double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "Ours (alpha=%.1f, beta=%.1f)", alpha, beta);
  return buf;
}

inline constexpr const char* kBaselineLabel = "VQA only (w/o navigation)";

inline std::string offset_header(StartOffset o) {
  switch (o) {
    case StartOffset::t10: return "T_-10";
    case StartOffset::t30: return "T_-30";
    case StartOffset::t50: return "T_-50";
    case StartOffset::random: return "random";
  }
  return "?";
}

inline std::string fmt_fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// Two column groups: d_T (2 dp) then Top-1 (3 dp), one column per offset,
// followed by a per-row error count.
inline std::string render_table(const ResultsTable& t) {
  std::size_t label_w = std::string("Method").size();
  for (const auto& r : t.rows) label_w = std::max(label_w, r.label.size());
  constexpr std::size_t col_w = 8;
  const std::size_t group_w = t.offsets.size() * (col_w + 1) - 1;

  auto pad = [](std::string s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };
  auto center = [](const std::string& s, std::size_t w) {
    if (s.size() >= w) return s;
    const std::size_t left = (w - s.size()) / 2;
    return std::string(left, ' ') + s + std::string(w - s.size() - left, ' ');
  };
  std::string rule = "+" + std::string(label_w + 2, '-') + "+" + std::string(group_w + 2, '-') + "+" +
                     std::string(group_w + 2, '-') + "+--------+\n";

  std::string out = rule;
  out += "| " + pad("Method", label_w, false) + " | " + center("Navigation", group_w) + " | " +
         center("QA", group_w) + " |        |\n";
  out += "| " + pad("", label_w, false) + " | " + center("d_T (lower is better)", group_w) + " | " +
         center("Top-1 (higher is better)", group_w) + " | errors |\n";
  std::string hdr;
  for (std::size_t i = 0; i < t.offsets.size(); ++i) {
    if (i) hdr += ' ';
    hdr += pad(offset_header(t.offsets[i]), col_w, true);
  }
  out += "| " + pad("", label_w, false) + " | " + hdr + " | " + hdr + " |        |\n";
  out += rule;
  for (const auto& r : t.rows) {
    std::string d, q;
    int errors = 0;
    for (std::size_t i = 0; i < t.offsets.size(); ++i) {
      const auto it = r.cells.find(t.offsets[i]);
      if (i) {
        d += ' ';
        q += ' ';
      }
      if (it == r.cells.end()) {
        d += pad("-", col_w, true);
        q += pad("-", col_w, true);
        continue;
      }
      d += pad(fmt_fixed(it->second.d_T, 2), col_w, true);
      q += pad(fmt_fixed(it->second.top1, 3), col_w, true);
      errors += it->second.errors;
    }
    out += "| " + pad(r.label, label_w, false) + " | " + d + " | " + q + " | " + pad(std::to_string(errors), 6, true) +
           " |\n";
  }
  out += rule;
  return out;
}

inline nlohmann::ordered_json table_to_json(const ResultsTable& t) {
  nlohmann::ordered_json j;
  j["offsets"] = nlohmann::ordered_json::array();
  for (auto o : t.offsets) j["offsets"].push_back(std::string(world::to_string(o)));
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row;
    row["label"] = r.label;
    row["cells"] = nlohmann::ordered_json::object();
    for (auto o : t.offsets) {
      const auto it = r.cells.find(o);
      if (it == r.cells.end()) continue;
      row["cells"][std::string(world::to_string(o))] = {{"d_T", it->second.d_T},
                                                        {"top1", it->second.top1},
                                                        {"episodes", it->second.episodes},
                                                        {"errors", it->second.errors}};
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

}  // namespace eqa::harness
