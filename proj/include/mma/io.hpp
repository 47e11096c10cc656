#pragma once

// JSON bindings for the domain types plus small file helpers. Object keys
// serialize in sorted order, so dumps are byte-stable.

#include <string>
#include <vector>

#include <json.hpp>

#include "mma/agent.hpp"
#include "mma/bench.hpp"
#include "mma/confidence.hpp"
#include "mma/probe.hpp"
#include "mma/selective.hpp"

namespace mma {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

void to_json(json& j, const VisualDescriptor& v);
void from_json(const json& j, VisualDescriptor& v);
void to_json(json& j, const EvidenceRecord& e);
void from_json(const json& j, EvidenceRecord& e);
void to_json(json& j, const Utterance& u);
void from_json(const json& j, Utterance& u);
void to_json(json& j, const Session& s);
void from_json(const json& j, Session& s);
void to_json(json& j, const FactSpec& f);
void from_json(const json& j, FactSpec& f);
void to_json(json& j, const BenchCase& c);
void from_json(const json& j, BenchCase& c);
void to_json(json& j, const BenchConfig& c);
void from_json(const json& j, BenchConfig& c);
void to_json(json& j, const QaItem& q);
void from_json(const json& j, QaItem& q);

void to_json(json& j, const Wagers& w);
void from_json(const json& j, Wagers& w);
void to_json(json& j, const ProbeTranscript& t);
void from_json(const json& j, ProbeTranscript& t);
void to_json(json& j, const CoreParams& p);
void to_json(json& j, const ProbeReport& r);

void to_json(json& j, const ConfidenceConfig& c);
void from_json(const json& j, ConfidenceConfig& c);
void to_json(json& j, const ConfidenceReport& r);

void to_json(json& j, const AgentConfig& c);
void to_json(json& j, const AuditEntry& a);
void to_json(json& j, const QaAnswer& a);
void from_json(const json& j, QaAnswer& a);

void to_json(json& j, const EvalRecord& r);
// Missing "regime" falls back to the record's default; a "prediction" of
// null means abstain.
void from_json(const json& j, EvalRecord& r);
void to_json(json& j, const SelectiveSummary& s);

CaseTruth truth_of(const BenchCase& c);

// Writes to "<path>.tmp" and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Parses one JSON value per nonblank line. Errors carry the 1-based line
// number; parsing continues past bad lines.
template <typename T>
struct JsonlResult {
  std::vector<T> values;
  std::vector<int> lines;  // source line of each value
  std::vector<std::pair<int, std::string>> errors;
};

template <typename T>
JsonlResult<T> parse_jsonl(const std::string& text) {
  JsonlResult<T> out;
  std::size_t pos = 0;
  int line = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    const std::string_view row(text.data() + pos, end - pos);
    pos = end + 1;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      out.values.push_back(json::parse(row).get<T>());
      out.lines.push_back(line);
    } catch (const std::exception& e) {
      out.errors.emplace_back(line, e.what());
    }
    if (end == text.size()) break;
  }
  return out;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    out += json(v).dump();
    out += '\n';
  }
  return out;
}

}  // namespace mma
