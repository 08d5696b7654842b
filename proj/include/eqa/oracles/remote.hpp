#pragma once

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "eqa/oracles/oracle.hpp"
#include "eqa/oracles/snapshot.hpp"

namespace eqa::oracles {

enum class OracleMode : std::uint8_t { mock, remote };

struct OracleConfig {
  OracleMode mode = OracleMode::mock;
  std::string endpoint;
  int timeout_ms = 10000;
  int retries = 2;

  // Reads EQA_ORACLE_URL and EQA_ORACLE_TIMEOUT_MS.
  static OracleConfig from_env(OracleMode mode) {
    OracleConfig cfg;
    cfg.mode = mode;
    if (const char* url = std::getenv("EQA_ORACLE_URL")) cfg.endpoint = url;
    if (const char* t = std::getenv("EQA_ORACLE_TIMEOUT_MS")) cfg.timeout_ms = std::atoi(t);
    if (cfg.timeout_ms <= 0) cfg.timeout_ms = 10000;
    return cfg;
  }
};

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += table[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wire protocol (JSON over HTTP POST)
// ---------------------------------------------------------------------------

namespace protocol {

inline constexpr std::string_view kParsePath = "/v1/parse_question";
inline constexpr std::string_view kItmPath = "/v1/itm";
inline constexpr std::string_view kVqaPath = "/v1/vqa";

inline void put_snapshot(nlohmann::ordered_json& req, const Snapshot& s) {
  if (const auto* st = std::get_if<StructuredSnapshot>(&s)) {
    req["snapshot"] = to_json(*st);
  } else {
    req["image_b64"] = base64_encode(std::get<EncodedImage>(s).bytes);
  }
}

inline nlohmann::ordered_json parse_request(std::string_view question) {
  nlohmann::ordered_json req;
  req["question"] = question;
  return req;
}

inline nlohmann::ordered_json itm_request(const Snapshot& s, std::string_view declarative) {
  nlohmann::ordered_json req;
  req["declarative"] = declarative;
  put_snapshot(req, s);
  return req;
}

inline nlohmann::ordered_json vqa_request(const Snapshot& s, std::string_view question) {
  nlohmann::ordered_json req;
  req["question"] = question;
  put_snapshot(req, s);
  return req;
}

inline QuestionParse parse_response(const nlohmann::json& resp) {
  if (!resp.is_object() || !resp.contains("category") || !resp.contains("declarative") ||
      !resp["category"].is_string() || !resp["declarative"].is_string()) {
    throw UnparseableQuestion("parse_question: malformed response " + resp.dump());
  }
  QuestionParse out{resp["category"].get<std::string>(), resp["declarative"].get<std::string>()};
  if (out.target_category.empty() || out.declarative.empty()) {
    throw UnparseableQuestion("parse_question: empty category or declarative");
  }
  return out;
}

inline double itm_response(const nlohmann::json& resp) {
  if (!resp.is_object() || !resp.contains("score") || !resp["score"].is_number()) {
    throw OracleError("itm: malformed response " + resp.dump());
  }
  const double s = resp["score"].get<double>();
  if (!(s >= 0.0 && s <= 1.0)) throw OracleError("itm: score out of [0, 1]: " + std::to_string(s));
  return s;
}

inline std::string vqa_response(const nlohmann::json& resp) {
  if (!resp.is_object() || !resp.contains("answer") || !resp["answer"].is_string()) {
    throw OracleError("vqa: malformed response " + resp.dump());
  }
  return resp["answer"].get<std::string>();
}

}  // namespace protocol

// HTTP client for the oracle protocol. One request in flight at a time.
class RemoteOracle final : public Oracle {
 public:
  explicit RemoteOracle(OracleConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty()) throw OracleError("remote oracle requires an endpoint (EQA_ORACLE_URL)");
  }

  QuestionParse parse_question(std::string_view question) override {
    return protocol::parse_response(post(protocol::kParsePath, protocol::parse_request(question)));
  }

  double itm_score(const Snapshot& snapshot, std::string_view declarative) override {
    return protocol::itm_response(post(protocol::kItmPath, protocol::itm_request(snapshot, declarative)));
  }

  std::string vqa_answer(const Snapshot& snapshot, std::string_view question) override {
    return protocol::vqa_response(post(protocol::kVqaPath, protocol::vqa_request(snapshot, question)));
  }

 private:
  nlohmann::json post(std::string_view path, const nlohmann::ordered_json& body) {
    const std::string request_id = "eqa-" + std::to_string(++request_counter_);
    httplib::Client client(cfg_.endpoint);
    const auto sec = cfg_.timeout_ms / 1000;
    const auto usec = (cfg_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    const std::string payload = body.dump();
    const httplib::Headers headers{{"X-Request-Id", request_id}};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      auto res = client.Post(std::string(path), headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        last_error = "non-JSON body (status " + std::to_string(res->status) + ")";
        if (res->status >= 500) continue;
        break;
      }
      if (res->status == 200) return parsed;
      last_error = "status " + std::to_string(res->status) + ": " +
                   (parsed.is_object() && parsed.contains("error") ? parsed["error"].dump() : res->body);
      if (res->status < 500) break;
    }
    throw OracleError(std::string(path) + " request " + request_id + " failed: " + last_error);
  }

  OracleConfig cfg_;
  std::uint64_t request_counter_ = 0;
};

inline std::unique_ptr<Oracle> make_oracle(const OracleConfig& cfg) {
  if (cfg.mode == OracleMode::remote) return std::make_unique<RemoteOracle>(cfg);
  return std::make_unique<MockOracle>();
}

}  // namespace eqa::oracles
