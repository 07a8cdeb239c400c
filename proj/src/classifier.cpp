#include "counterfax/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace counterfax {

namespace {

char lower(char c)
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_single_letter(std::string_view token)
{
    return token.size() == 1 && std::isalpha(static_cast<unsigned char>(token[0]));
}

std::vector<std::string> split_ws(std::string_view text)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token)
        out.push_back(token);
    return out;
}

std::optional<LetterString> letters_of_group(std::string_view inner)
{
    std::string cleaned;
    for (char c : inner)
        cleaned += (c == ',' || c == '\'' || c == '"' || c == '`') ? ' ' : c;
    auto tokens = split_ws(cleaned);
    if (tokens.empty())
        return std::nullopt;
    LetterString out;
    for (const auto& t : tokens) {
        if (!is_single_letter(t))
            return std::nullopt;
        out.push_back(lower(t[0]));
    }
    return out;
}

std::string strip_punct(const std::string& token)
{
    auto is_punct = [](char c) { return std::string_view(".,;:!?()\"'`").find(c) != std::string_view::npos; };
    std::size_t b = 0, e = token.size();
    while (b < e && is_punct(token[b]))
        ++b;
    while (e > b && is_punct(token[e - 1]))
        --e;
    return token.substr(b, e - b);
}

} // namespace

std::string_view to_string(VerdictKind kind)
{
    switch (kind) {
    case VerdictKind::Correct: return "correct";
    case VerdictKind::ValidAlternative: return "valid_alternative";
    case VerdictKind::Invalid: return "invalid";
    case VerdictKind::Unparseable: return "unparseable";
    }
    return "?";
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view name)
{
    for (auto k : {VerdictKind::Correct, VerdictKind::ValidAlternative, VerdictKind::Invalid,
                   VerdictKind::Unparseable})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

std::optional<LetterString> parse_answer(std::string_view text)
{
    // last bracketed group first
    std::size_t close = text.size();
    while (close > 0) {
        close = text.rfind(']', close - 1);
        if (close == std::string_view::npos)
            break;
        auto open = text.rfind('[', close);
        if (open == std::string_view::npos)
            break;
        if (auto letters = letters_of_group(text.substr(open + 1, close - open - 1)))
            return letters;
        close = open;
    }

    std::string spaced(text);
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::optional<LetterString> last;
    LetterString run;
    auto flush = [&] {
        if (run.size() >= 3)
            last = run;
        run = LetterString();
    };
    for (const auto& raw : split_ws(spaced)) {
        auto token = strip_punct(raw);
        if (is_single_letter(token)) {
            run.push_back(lower(token[0]));
            // "h." ends the sentence and the run with it
            if (std::string_view(".!?;:").find(raw.back()) != std::string_view::npos)
                flush();
        } else {
            flush();
        }
    }
    flush();
    if (last)
        return last;

    // a bare run such as "jrqh" is the whole response
    auto words = split_ws(spaced);
    if (words.size() == 1) {
        auto token = strip_punct(words[0]);
        if (token.size() >= 2 && std::all_of(token.begin(), token.end(), [](char c) {
                return std::isalpha(static_cast<unsigned char>(c));
            })) {
            LetterString s;
            for (char c : token)
                s.push_back(lower(c));
            return s;
        }
    }
    return std::nullopt;
}

Verdict classify(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                 const std::optional<LetterString>& parsed, ClassifyOptions options)
{
    if (!problem.answer)
        throw std::invalid_argument("problem " + problem.id + " has no answer key");
    Verdict v;
    if (!parsed) {
        v.kind = options.unparseable_as_error ? VerdictKind::Invalid : VerdictKind::Unparseable;
        return v;
    }
    if (*parsed == *problem.answer) {
        v.kind = VerdictKind::Correct;
        return v;
    }

    const Rule intended = Rule::intended(problem.transformation, problem.interval.value());
    for (const auto& rule : induce_rules(alphabet, problem.source_a, problem.source_b)) {
        if (rule == intended || rule.kind == RuleKind::LiteralCopy)
            continue;
        if (apply_rule(rule, alphabet, problem.target_a) == parsed)
            v.matches.push_back(rule);
    }
    if (v.matches.empty() && *parsed == problem.source_b)
        v.matches.push_back(Rule::literal_copy(problem.source_b));
    v.kind = v.matches.empty() ? VerdictKind::Invalid : VerdictKind::ValidAlternative;
    return v;
}

Verdict classify(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                 ResponseRecord& record, ClassifyOptions options)
{
    record.parsed = parse_answer(record.raw_text);
    record.verdict = classify(problem, alphabet, record.parsed, options);
    return *record.verdict;
}

std::string ValidErrorCell::cell() const
{
    return std::to_string(valid) + "\\" + std::to_string(errors);
}

std::optional<double> ValidErrorTable::overall_fraction() const
{
    if (errors == 0)
        return std::nullopt;
    return static_cast<double>(valid) / errors;
}

std::string ValidErrorTable::overall_text() const
{
    auto f = overall_fraction();
    if (!f)
        return "–";
    return std::to_string(static_cast<int>(std::lround(*f * 100))) + "%";
}

std::string ValidErrorTable::render(int interval) const
{
    std::ostringstream out;
    out << "Fraction of errors involving valid alternative rules, interval size = " << interval << "\n";
    std::size_t width = 0;
    for (auto t : kAllTransformations)
        width = std::max(width, display_name(t).size());
    out << std::string("Transformation type").append(width - 19 + 2, ' ') << "Valid errors\n";
    for (auto t : kAllTransformations) {
        auto it = cells.find({t, interval});
        std::string cell = it == cells.end() ? ValidErrorCell{}.cell() : it->second.cell();
        std::string name(display_name(t));
        out << name << std::string(width - name.size() + 2, ' ') << cell << "\n";
    }
    return out.str();
}

ValidErrorTable tabulate_valid_errors(const std::vector<ResponseRecord>& records,
                                      const std::vector<AnalogyProblem>& problems)
{
    std::unordered_map<std::string, const AnalogyProblem*> by_id;
    for (const auto& p : problems)
        by_id[p.id] = &p;

    ValidErrorTable table;
    for (auto t : kAllTransformations)
        for (const auto& p : problems)
            if (p.transformation == t)
                table.cells[{t, p.interval.value()}];

    for (const auto& r : records) {
        auto it = by_id.find(r.problem_id);
        if (it == by_id.end())
            throw std::invalid_argument("record for unknown problem " + r.problem_id);
        if (!r.verdict)
            throw std::invalid_argument("record for " + r.problem_id + " is not classified");
        const auto& v = *r.verdict;
        if (v.kind == VerdictKind::Correct || v.kind == VerdictKind::Unparseable)
            continue;
        auto& cell = table.cells[{it->second->transformation, it->second->interval.value()}];
        ++cell.errors;
        ++table.errors;
        if (v.kind != VerdictKind::ValidAlternative)
            continue;
        std::vector<std::string> kinds;
        for (const auto& m : v.matches)
            kinds.push_back(m.kind_name());
        std::sort(kinds.begin(), kinds.end());
        kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
        for (const auto& k : kinds)
            ++cell.kinds[k];
        if (v.literal_copy_only()) {
            ++cell.literal_copies;
            continue;
        }
        ++cell.valid;
        ++table.valid;
    }
    return table;
}

} // namespace counterfax
