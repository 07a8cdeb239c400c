// problem_io.hpp -- JSONL serialization of problem sets

#pragma once

#include "counterfax/problem.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace counterfax {

enum class ExportMode {
    /// Everything, including answer and generation metadata.
    Full,
    /// No answer and no metadata; safe to hand to the agent under test.
    Public,
};

nlohmann::ordered_json letters_to_json(const LetterString& s);
/// Throws std::invalid_argument unless `j` is an array of single a-z letters.
LetterString letters_from_json(const nlohmann::json& j);

nlohmann::ordered_json problem_to_json(const AnalogyProblem& p, ExportMode mode = ExportMode::Full);
/// Throws std::invalid_argument on schema violations.
AnalogyProblem problem_from_json(const nlohmann::json& j);

/// One JSON object per line, each line newline-terminated.
std::string problems_to_jsonl(const std::vector<AnalogyProblem>& problems,
                              ExportMode mode = ExportMode::Full);

void write_problems(const std::filesystem::path& path, const std::vector<AnalogyProblem>& problems,
                    ExportMode mode = ExportMode::Full);

/// Blank lines are skipped. Throws ParseError naming the bad line.
std::vector<AnalogyProblem> read_problems(const std::filesystem::path& path);

} // namespace counterfax
