#include "counterfax/records_io.hpp"

#include "counterfax/errors.hpp"
#include "counterfax/io_util.hpp"
#include "counterfax/problem_io.hpp"

#include <algorithm>
#include <set>

namespace counterfax {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "problem_id", "agent_id", "agent_class", "raw_text", "transcript", "retries", "error",
        "parsed", "verdict", "matched_rules", "matched_kinds", "reviewed"};
    return keys;
}

} // namespace

ordered_json rule_to_json(const Rule& rule)
{
    return rule.to_string();
}

ordered_json response_to_json(const ResponseRecord& r)
{
    ordered_json j;
    j["problem_id"] = r.problem_id;
    j["agent_id"] = r.agent_id;
    j["agent_class"] = r.agent_class;
    j["raw_text"] = r.raw_text;
    ordered_json transcript = ordered_json::array();
    for (const auto& m : r.transcript)
        transcript.push_back({{"role", m.role}, {"content", m.content}});
    j["transcript"] = std::move(transcript);
    j["retries"] = r.retries;
    if (r.error)
        j["error"] = *r.error;
    for (const auto& [key, value] : r.extra.items())
        j[key] = value;
    return j;
}

ordered_json verdict_to_json(const ResponseRecord& r)
{
    ordered_json j = response_to_json(r);
    j["parsed"] = r.parsed ? letters_to_json(*r.parsed) : ordered_json(nullptr);
    if (r.verdict) {
        j["verdict"] = std::string(to_string(r.verdict->kind));
        ordered_json rules = ordered_json::array();
        std::set<std::string> kinds;
        for (const auto& m : r.verdict->matches) {
            rules.push_back(rule_to_json(m));
            kinds.insert(m.kind_name());
        }
        j["matched_rules"] = std::move(rules);
        j["matched_kinds"] = kinds;
    }
    j["reviewed"] = r.reviewed;
    return j;
}

ResponseRecord record_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("expected a JSON object");
    ResponseRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.agent_id = j.at("agent_id").get<std::string>();
    r.agent_class = j.value("agent_class", std::string("model"));
    if (r.agent_class != "model" && r.agent_class != "human")
        throw std::invalid_argument("agent_class must be 'human' or 'model'");
    r.raw_text = j.at("raw_text").get<std::string>();
    if (j.contains("transcript"))
        for (const auto& m : j.at("transcript"))
            r.transcript.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    r.retries = j.value("retries", 0);
    if (j.contains("error") && !j.at("error").is_null())
        r.error = j.at("error").get<std::string>();
    if (j.contains("parsed") && !j.at("parsed").is_null())
        r.parsed = letters_from_json(j.at("parsed"));
    if (j.contains("verdict")) {
        auto name = j.at("verdict").get<std::string>();
        auto kind = parse_verdict_kind(name);
        if (!kind)
            throw std::invalid_argument("unknown verdict '" + name + "'");
        Verdict v;
        v.kind = *kind;
        if (j.contains("matched_rules"))
            for (const auto& m : j.at("matched_rules"))
                v.matches.push_back(parse_rule(m.get<std::string>()));
        r.verdict = std::move(v);
    }
    r.reviewed = j.value("reviewed", false);
    for (const auto& [key, value] : j.items())
        if (!known_keys().contains(key))
            r.extra[key] = value;
    return r;
}

std::string records_to_jsonl(std::vector<ResponseRecord> records, bool with_verdicts)
{
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.problem_id, a.agent_id) < std::tie(b.problem_id, b.agent_id);
    });
    std::string out;
    for (const auto& r : records) {
        out += (with_verdicts ? verdict_to_json(r) : response_to_json(r)).dump();
        out += '\n';
    }
    return out;
}

void write_responses(const std::filesystem::path& path, const std::vector<ResponseRecord>& records)
{
    write_file_atomic(path, records_to_jsonl(records, false));
}

void write_verdicts(const std::filesystem::path& path, const std::vector<ResponseRecord>& records)
{
    write_file_atomic(path, records_to_jsonl(records, true));
}

std::vector<ResponseRecord> read_records(const std::filesystem::path& path)
{
    std::vector<ResponseRecord> out;
    auto lines = read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].find_first_not_of(" \t") == std::string::npos)
            continue;
        try {
            out.push_back(record_from_json(json::parse(lines[n])));
        } catch (const std::exception& e) {
            throw ParseError(path.string(), n + 1, e.what());
        }
    }
    return out;
}

} // namespace counterfax
