// records_io.hpp -- JSONL for response and verdict records

#pragma once

#include "counterfax/classifier.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace counterfax {

nlohmann::ordered_json rule_to_json(const Rule& rule);

/// Response fields only: problem_id, agent_id, agent_class, raw_text,
/// transcript, retries, plus error and any extra fields when present.
nlohmann::ordered_json response_to_json(const ResponseRecord& r);

/// Response fields followed by parsed, verdict, matched_rules,
/// matched_kinds and reviewed.
nlohmann::ordered_json verdict_to_json(const ResponseRecord& r);

/// Reads either form. Unknown keys land in `extra`.
ResponseRecord record_from_json(const nlohmann::json& j);

/// Records sorted by (problem_id, agent_id), one per line.
std::string records_to_jsonl(std::vector<ResponseRecord> records, bool with_verdicts);

void write_responses(const std::filesystem::path& path, const std::vector<ResponseRecord>& records);
void write_verdicts(const std::filesystem::path& path, const std::vector<ResponseRecord>& records);

/// Throws ParseError naming the bad line.
std::vector<ResponseRecord> read_records(const std::filesystem::path& path);

} // namespace counterfax
