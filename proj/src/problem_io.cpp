#include "counterfax/problem_io.hpp"

#include "counterfax/errors.hpp"
#include "counterfax/io_util.hpp"

#include <stdexcept>

namespace counterfax {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json side_to_json(const SideParams& s)
{
    ordered_json j = ordered_json::object();
    if (s.modified_position)
        j["modified_position"] = *s.modified_position;
    if (s.distractor_letter)
        j["distractor_letter"] = std::string(1, *s.distractor_letter);
    if (s.swap_pair)
        j["swap_pair"] = {s.swap_pair->first, s.swap_pair->second};
    return j;
}

SideParams side_from_json(const json& j)
{
    SideParams s;
    if (j.contains("modified_position"))
        s.modified_position = j.at("modified_position").get<int>();
    if (j.contains("distractor_letter")) {
        auto d = j.at("distractor_letter").get<std::string>();
        if (d.size() != 1)
            throw std::invalid_argument("distractor_letter must be one letter");
        s.distractor_letter = d[0];
    }
    if (j.contains("swap_pair")) {
        const auto& pair = j.at("swap_pair");
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("swap_pair must hold two positions");
        s.swap_pair = std::pair{pair[0].get<int>(), pair[1].get<int>()};
    }
    return s;
}

ordered_json meta_to_json(const GenerationMeta& m)
{
    ordered_json j;
    j["source_start"] = m.source_start;
    j["target_start"] = m.target_start;
    j["base_step"] = m.base_step;
    if (m.transform_delta)
        j["transform_delta"] = *m.transform_delta;
    j["source"] = side_to_json(m.source);
    j["target"] = side_to_json(m.target);
    return j;
}

GenerationMeta meta_from_json(const json& j)
{
    GenerationMeta m;
    m.source_start = j.at("source_start").get<int>();
    m.target_start = j.at("target_start").get<int>();
    m.base_step = j.at("base_step").get<int>();
    if (j.contains("transform_delta"))
        m.transform_delta = j.at("transform_delta").get<int>();
    if (j.contains("source"))
        m.source = side_from_json(j.at("source"));
    if (j.contains("target"))
        m.target = side_from_json(j.at("target"));
    return m;
}

} // namespace

ordered_json letters_to_json(const LetterString& s)
{
    ordered_json j = ordered_json::array();
    for (char c : s)
        j.push_back(std::string(1, c));
    return j;
}

LetterString letters_from_json(const json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("letter string must be an array");
    LetterString s;
    for (const auto& e : j) {
        if (!e.is_string() || e.get_ref<const std::string&>().size() != 1)
            throw std::invalid_argument("letter string entries must be single letters");
        char c = e.get_ref<const std::string&>()[0];
        if (c < 'a' || c > 'z')
            throw std::invalid_argument(std::string("'") + c + "' is not a lowercase letter");
        s.push_back(c);
    }
    return s;
}

ordered_json problem_to_json(const AnalogyProblem& p, ExportMode mode)
{
    ordered_json j;
    j["id"] = p.id;
    j["alphabet_id"] = p.alphabet_id;
    j["transformation"] = std::string(to_string(p.transformation));
    j["interval"] = p.interval.value();
    j["source_a"] = letters_to_json(p.source_a);
    j["source_b"] = letters_to_json(p.source_b);
    j["target_a"] = letters_to_json(p.target_a);
    if (mode == ExportMode::Full) {
        if (p.answer)
            j["answer"] = letters_to_json(*p.answer);
        if (p.meta)
            j["meta"] = meta_to_json(*p.meta);
    }
    j["seed"] = p.seed;
    return j;
}

AnalogyProblem problem_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("expected a JSON object");
    AnalogyProblem p;
    p.id = j.at("id").get<std::string>();
    p.alphabet_id = j.at("alphabet_id").get<std::string>();
    auto name = j.at("transformation").get<std::string>();
    auto type = parse_transformation(name);
    if (!type)
        throw std::invalid_argument("unknown transformation '" + name + "'");
    p.transformation = *type;
    p.interval = IntervalSize(j.at("interval").get<int>());
    p.source_a = letters_from_json(j.at("source_a"));
    p.source_b = letters_from_json(j.at("source_b"));
    p.target_a = letters_from_json(j.at("target_a"));
    if (j.contains("answer"))
        p.answer = letters_from_json(j.at("answer"));
    if (j.contains("meta"))
        p.meta = meta_from_json(j.at("meta"));
    p.seed = j.value("seed", std::uint64_t{0});
    return p;
}

std::string problems_to_jsonl(const std::vector<AnalogyProblem>& problems, ExportMode mode)
{
    std::string out;
    for (const auto& p : problems) {
        out += problem_to_json(p, mode).dump();
        out += '\n';
    }
    return out;
}

void write_problems(const std::filesystem::path& path, const std::vector<AnalogyProblem>& problems,
                    ExportMode mode)
{
    write_file_atomic(path, problems_to_jsonl(problems, mode));
}

std::vector<AnalogyProblem> read_problems(const std::filesystem::path& path)
{
    std::vector<AnalogyProblem> out;
    auto lines = read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].find_first_not_of(" \t") == std::string::npos)
            continue;
        try {
            out.push_back(problem_from_json(json::parse(lines[n])));
        } catch (const std::exception& e) {
            throw ParseError(path.string(), n + 1, e.what());
        }
    }
    return out;
}

} // namespace counterfax
