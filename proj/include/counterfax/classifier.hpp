// classifier.hpp -- answer extraction, verdicts and valid-error tabulation

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/problem.hpp"
#include "counterfax/rules.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace counterfax {

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

enum class VerdictKind { Correct, ValidAlternative, Invalid, Unparseable };

std::string_view to_string(VerdictKind kind);
std::optional<VerdictKind> parse_verdict_kind(std::string_view name);

struct Verdict {
    VerdictKind kind = VerdictKind::Unparseable;
    /// Every alternative rule reproducing the parsed answer (ValidAlternative only).
    std::vector<Rule> matches;

    /// The only explanation is that the response copied source B verbatim.
    bool literal_copy_only() const
    {
        return kind == VerdictKind::ValidAlternative && matches.size() == 1 &&
               matches.front().kind == RuleKind::LiteralCopy;
    }

    bool operator==(const Verdict&) const = default;
};

/// One agent's answer to one problem.
struct ResponseRecord {
    std::string problem_id;
    /// Participant code or model engine.
    std::string agent_id;
    /// "human" or "model".
    std::string agent_class = "model";
    std::string raw_text;
    std::optional<LetterString> parsed;
    std::optional<Verdict> verdict;
    std::vector<ChatMessage> transcript;
    int retries = 0;
    /// Transport failure text; the record still counts toward the run.
    std::optional<std::string> error;
    /// Verdict set or confirmed by a human reviewer.
    bool reviewed = false;
    /// Fields not interpreted here (timestamps, response times), kept verbatim.
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool operator==(const ResponseRecord&) const = default;
};

/// Extracts the answer from free text: the last bracketed group made only of
/// single letters ("[k w b t]", commas and quotes ignored); failing that, the
/// last run of at least three whitespace-separated single letters; failing
/// that, a response consisting of one unspaced word ("jrqh"). Result is
/// lowercased. nullopt when none applies.
std::optional<LetterString> parse_answer(std::string_view raw_text);

struct ClassifyOptions {
    /// Report parse failures as Invalid instead of Unparseable.
    bool unparseable_as_error = false;
};

/// Verdict for a parsed answer (nullopt = parse failure). The problem must
/// carry its answer; throws std::invalid_argument otherwise.
Verdict classify(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                 const std::optional<LetterString>& parsed, ClassifyOptions options = {});

/// Parses record.raw_text, then classifies; fills record.parsed and
/// record.verdict and returns the verdict.
Verdict classify(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                 ResponseRecord& record, ClassifyOptions options = {});

struct ValidErrorCell {
    int valid = 0;
    int errors = 0;
    /// ValidAlternative verdicts explained only by copying source B; counted
    /// as errors but not as valid.
    int literal_copies = 0;
    /// How often each rule kind appeared among the matches of valid errors.
    std::map<std::string, int> kinds;

    /// "3\7"
    std::string cell() const;
};

struct ValidErrorTable {
    std::map<std::pair<TransformationType, int>, ValidErrorCell> cells;
    int valid = 0;
    int errors = 0;

    /// valid / errors; nullopt when there are no errors.
    std::optional<double> overall_fraction() const;
    /// "46%" or "–" when undefined.
    std::string overall_text() const;
    /// Two-column text table: type name, then the "valid\errors" cell.
    std::string render(int interval) const;
};

/// Counts errors and valid-alternative errors per (transformation,
/// interval). Unparseable records are left out of the denominators; every
/// record must already carry a verdict and join a problem, else throws
/// std::invalid_argument.
ValidErrorTable tabulate_valid_errors(const std::vector<ResponseRecord>& records,
                                      const std::vector<AnalogyProblem>& problems);

} // namespace counterfax
