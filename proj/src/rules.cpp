#include "counterfax/rules.hpp"

#include "counterfax/errors.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace counterfax {

namespace {

constexpr int kShiftDeltas[] = {-2, -1, 1, 2};
constexpr int kIntervals[] = {1, 2};

bool all_letters(const LetterString& s)
{
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string signed_int(int v)
{
    return (v > 0 ? "+" : "") + std::to_string(v);
}

std::optional<LetterString> shift_at(const PermutedAlphabet& alphabet, LetterString s,
                                     std::size_t pos, int delta)
{
    int target = alphabet.index_of(s[pos]) + delta;
    if (target < 0 || target >= kAlphabetSize)
        return std::nullopt;
    s[pos] = alphabet.letter_at(target);
    return s;
}

std::optional<LetterString> remove_redundant(const PermutedAlphabet& alphabet,
                                             const LetterString& s, int step)
{
    std::array<int, kAlphabetSize> count{};
    for (char c : s)
        ++count[c - 'a'];
    int repeated = -1;
    for (int c = 0; c < kAlphabetSize; ++c) {
        if (count[c] > 2 || (count[c] == 2 && repeated != -1))
            return std::nullopt;
        if (count[c] == 2)
            repeated = c;
    }
    if (repeated == -1)
        return std::nullopt;
    LetterString out = s;
    auto first = std::find(s.begin(), s.end(), 'a' + repeated) - s.begin();
    auto second = std::find(s.begin() + first + 1, s.end(), 'a' + repeated) - s.begin();
    out.erase(static_cast<std::size_t>(second));
    if (!is_run(out, step, alphabet))
        return std::nullopt;
    return out;
}

std::optional<LetterString> fix_sequence(const PermutedAlphabet& alphabet,
                                         const LetterString& s, int step)
{
    const int n = static_cast<int>(s.size());
    if (n < 3)
        return std::nullopt;
    std::optional<LetterString> found;
    for (int start = 0; start + (n - 1) * step < kAlphabetSize; ++start) {
        int mismatches = 0;
        for (int k = 0; k < n && mismatches <= 1; ++k)
            mismatches += alphabet.letter_at(start + k * step) != s[k];
        if (mismatches > 1)
            continue;
        LetterString run;
        for (int k = 0; k < n; ++k)
            run.push_back(alphabet.letter_at(start + k * step));
        if (found && *found != run)
            return std::nullopt;
        found = std::move(run);
    }
    return found;
}

std::optional<LetterString> sort_sequence(const PermutedAlphabet& alphabet,
                                          const LetterString& s, int step)
{
    LetterString out = s;
    std::sort(out.begin(), out.end(),
              [&](char a, char b) { return alphabet.index_of(a) < alphabet.index_of(b); });
    if (!is_run(out, step, alphabet))
        return std::nullopt;
    return out;
}

std::optional<LetterString> apply_intended(TransformationType type, int d,
                                           const PermutedAlphabet& alphabet,
                                           const LetterString& s)
{
    if (s.empty())
        return std::nullopt;
    switch (type) {
    case TransformationType::ExtendSequence: {
        int target = alphabet.index_of(s.back()) + d;
        if (target >= kAlphabetSize)
            return std::nullopt;
        LetterString out = s;
        out.push_back(alphabet.letter_at(target));
        return out;
    }
    case TransformationType::Successor:
        return shift_at(alphabet, s, s.size() - 1, d);
    case TransformationType::Predecessor:
        return shift_at(alphabet, s, 0, -d);
    case TransformationType::RemoveRedundant:
        return remove_redundant(alphabet, s, d);
    case TransformationType::FixSequence:
        return fix_sequence(alphabet, s, d);
    case TransformationType::Sort:
        return sort_sequence(alphabet, s, d);
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(RuleKind kind)
{
    switch (kind) {
    case RuleKind::IntendedTransform: return "IntendedTransform";
    case RuleKind::PositionalSwap: return "PositionalSwap";
    case RuleKind::PositionalReplaceShift: return "PositionalReplaceShift";
    case RuleKind::PositionalDelete: return "PositionalDelete";
    case RuleKind::AppendShift: return "AppendShift";
    case RuleKind::LiteralCopy: return "LiteralCopy";
    }
    return "?";
}

Rule Rule::intended(TransformationType type, int delta)
{
    Rule r;
    r.kind = RuleKind::IntendedTransform;
    r.transformation = type;
    r.delta = delta;
    return r;
}

Rule Rule::swap(int i, int j)
{
    Rule r;
    r.kind = RuleKind::PositionalSwap;
    r.first = std::min(i, j);
    r.second = std::max(i, j);
    return r;
}

Rule Rule::replace_shift(int position, int delta)
{
    Rule r;
    r.kind = RuleKind::PositionalReplaceShift;
    r.first = position;
    r.delta = delta;
    return r;
}

Rule Rule::remove_at(int position)
{
    Rule r;
    r.kind = RuleKind::PositionalDelete;
    r.first = position;
    return r;
}

Rule Rule::append_shift(int delta)
{
    Rule r;
    r.kind = RuleKind::AppendShift;
    r.delta = delta;
    return r;
}

Rule Rule::literal_copy(LetterString b)
{
    Rule r;
    r.kind = RuleKind::LiteralCopy;
    r.literal = std::move(b);
    return r;
}

Rule Rule::standard_variant(Rule inner)
{
    if (!inner.alphabet_dependent() || inner.standard_alphabet)
        throw std::invalid_argument(inner.to_string() + " has no standard-alphabet variant");
    inner.standard_alphabet = true;
    return inner;
}

bool Rule::alphabet_dependent() const
{
    return kind == RuleKind::IntendedTransform || kind == RuleKind::PositionalReplaceShift ||
           kind == RuleKind::AppendShift;
}

std::string Rule::kind_name() const
{
    return standard_alphabet ? "StandardAlphabetVariant" : std::string(counterfax::to_string(kind));
}

std::string Rule::to_string() const
{
    std::string body(counterfax::to_string(kind));
    switch (kind) {
    case RuleKind::IntendedTransform:
        body += "(" + std::string(counterfax::to_string(transformation)) + "," +
                std::to_string(delta) + ")";
        break;
    case RuleKind::PositionalSwap:
        body += "(" + std::to_string(first) + "," + std::to_string(second) + ")";
        break;
    case RuleKind::PositionalReplaceShift:
        body += "(" + std::to_string(first) + "," + signed_int(delta) + ")";
        break;
    case RuleKind::PositionalDelete:
        body += "(" + std::to_string(first) + ")";
        break;
    case RuleKind::AppendShift:
        body += "(" + signed_int(delta) + ")";
        break;
    case RuleKind::LiteralCopy:
        body += "(" + literal.bracketed() + ")";
        break;
    }
    return standard_alphabet ? "StandardAlphabetVariant(" + body + ")" : body;
}

Rule parse_rule(std::string_view text)
{
    auto fail = [&] { return std::invalid_argument("malformed rule '" + std::string(text) + "'"); };
    auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')')
        throw fail();
    std::string_view name = text.substr(0, open);
    std::string_view args = text.substr(open + 1, text.size() - open - 2);

    if (name == "StandardAlphabetVariant")
        return Rule::standard_variant(parse_rule(args));
    if (name == "LiteralCopy") {
        if (args.size() < 2 || args.front() != '[' || args.back() != ']')
            throw fail();
        std::string letters;
        for (char c : args.substr(1, args.size() - 2))
            if (c != ' ')
                letters += c;
        return Rule::literal_copy(LetterString(letters));
    }

    std::vector<std::string_view> parts;
    while (true) {
        auto comma = args.find(',');
        parts.push_back(args.substr(0, comma));
        if (comma == std::string_view::npos)
            break;
        args.remove_prefix(comma + 1);
    }
    auto num = [&](std::string_view s) {
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw fail();
        return v;
    };

    if (name == "IntendedTransform" && parts.size() == 2) {
        auto type = parse_transformation(parts[0]);
        if (!type)
            throw fail();
        return Rule::intended(*type, num(parts[1]));
    }
    if (name == "PositionalSwap" && parts.size() == 2)
        return Rule::swap(num(parts[0]), num(parts[1]));
    if (name == "PositionalReplaceShift" && parts.size() == 2)
        return Rule::replace_shift(num(parts[0]), num(parts[1]));
    if (name == "PositionalDelete" && parts.size() == 1)
        return Rule::remove_at(num(parts[0]));
    if (name == "AppendShift" && parts.size() == 1)
        return Rule::append_shift(num(parts[0]));
    throw fail();
}

bool is_run(const LetterString& s, int step, const PermutedAlphabet& alphabet)
{
    if (s.empty() || !all_letters(s))
        return false;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (alphabet.index_of(s[k]) - alphabet.index_of(s[k - 1]) != step)
            return false;
    return true;
}

std::optional<LetterString> apply_rule(const Rule& rule, const PermutedAlphabet& alphabet,
                                       const LetterString& input)
{
    if (rule.kind == RuleKind::LiteralCopy)
        return rule.literal;
    if (!all_letters(input))
        return std::nullopt;
    const PermutedAlphabet& order = rule.standard_alphabet ? standard_alphabet() : alphabet;
    const auto n = static_cast<int>(input.size());

    switch (rule.kind) {
    case RuleKind::IntendedTransform:
        return apply_intended(rule.transformation, rule.delta, order, input);
    case RuleKind::PositionalSwap: {
        if (rule.first < 0 || rule.second >= n || rule.first >= rule.second)
            return std::nullopt;
        LetterString out = input;
        std::swap(out[rule.first], out[rule.second]);
        return out;
    }
    case RuleKind::PositionalReplaceShift:
        if (rule.first < 0 || rule.first >= n)
            return std::nullopt;
        return shift_at(order, input, static_cast<std::size_t>(rule.first), rule.delta);
    case RuleKind::PositionalDelete: {
        if (rule.first < 0 || rule.first >= n)
            return std::nullopt;
        LetterString out = input;
        out.erase(static_cast<std::size_t>(rule.first));
        return out;
    }
    case RuleKind::AppendShift:
        return apply_intended(TransformationType::ExtendSequence, rule.delta, order, input);
    case RuleKind::LiteralCopy:
        break;
    }
    return std::nullopt;
}

std::vector<Rule> rule_catalog(const LetterString& b, int max_length)
{
    std::vector<Rule> dependent;
    for (auto type : kAllTransformations)
        for (int d : kIntervals)
            dependent.push_back(Rule::intended(type, d));
    for (int p = 0; p < max_length; ++p)
        for (int d : kShiftDeltas)
            dependent.push_back(Rule::replace_shift(p, d));
    for (int d : kIntervals)
        dependent.push_back(Rule::append_shift(d));

    std::vector<Rule> out = dependent;
    for (const auto& r : dependent)
        out.push_back(Rule::standard_variant(r));
    for (int i = 0; i < max_length; ++i)
        for (int j = i + 1; j < max_length; ++j)
            out.push_back(Rule::swap(i, j));
    for (int p = 0; p < max_length; ++p)
        out.push_back(Rule::remove_at(p));
    out.push_back(Rule::literal_copy(b));
    return out;
}

std::vector<Rule> induce_rules(const PermutedAlphabet& alphabet,
                               const LetterString& a,
                               const LetterString& b)
{
    std::vector<Rule> out{Rule::literal_copy(b)};
    if (!all_letters(a) || !all_letters(b) || a.empty())
        return out;

    const auto na = static_cast<int>(a.size());
    const auto nb = static_cast<int>(b.size());
    std::vector<int> diffs;
    if (na == nb)
        for (int k = 0; k < na; ++k)
            if (a[k] != b[k])
                diffs.push_back(k);

    // order-independent rules
    if (na == nb && na <= kMaxRuleLength) {
        if (diffs.size() == 2 && a[diffs[0]] == b[diffs[1]] && a[diffs[1]] == b[diffs[0]])
            out.push_back(Rule::swap(diffs[0], diffs[1]));
        if (diffs.empty())
            for (int i = 0; i < na; ++i)
                for (int j = i + 1; j < na; ++j)
                    if (a[i] == a[j])
                        out.push_back(Rule::swap(i, j));
    }
    if (na == nb + 1)
        for (int p = 0; p < std::min(na, kMaxRuleLength); ++p)
            if (std::equal(b.begin(), b.begin() + p, a.begin()) &&
                std::equal(b.begin() + p, b.end(), a.begin() + p + 1))
                out.push_back(Rule::remove_at(p));

    for (bool standard : {false, true}) {
        const PermutedAlphabet& order = standard ? standard_alphabet() : alphabet;
        auto add = [&](Rule r) { out.push_back(standard ? Rule::standard_variant(r) : r); };
        auto idx = [&](char c) { return order.index_of(c); };

        if (nb == na + 1 && std::equal(a.begin(), a.end(), b.begin())) {
            int d = idx(b.back()) - idx(a.back());
            if (d == 1 || d == 2) {
                add(Rule::intended(TransformationType::ExtendSequence, d));
                add(Rule::append_shift(d));
            }
        }

        if (na == nb) {
            if (diffs.size() == 1) {
                int p = diffs[0];
                int d = idx(b[p]) - idx(a[p]);
                if (p < kMaxRuleLength && (d == 1 || d == 2 || d == -1 || d == -2))
                    add(Rule::replace_shift(p, d));
                if (p == na - 1 && (d == 1 || d == 2))
                    add(Rule::intended(TransformationType::Successor, d));
                if (p == 0 && (d == -1 || d == -2))
                    add(Rule::intended(TransformationType::Predecessor, -d));
            }
            for (int step : kIntervals) {
                if (!is_run(b, step, order))
                    continue;
                if (diffs.size() <= 1 && nb >= 3)
                    add(Rule::intended(TransformationType::FixSequence, step));
                // b is a strictly increasing run, so it is the sorted form of a
                // exactly when both hold the same letters
                LetterString sa = a, sb = b;
                std::sort(sa.begin(), sa.end());
                std::sort(sb.begin(), sb.end());
                if (sa == sb)
                    add(Rule::intended(TransformationType::Sort, step));
            }
        }

        if (na == nb + 1) {
            for (int step : kIntervals) {
                if (!is_run(b, step, order))
                    continue;
                // a must be b plus one extra copy of a letter of b, inserted
                // after its first occurrence
                LetterString sa = a, sb = b;
                std::sort(sa.begin(), sa.end());
                std::sort(sb.begin(), sb.end());
                auto extra = std::mismatch(sb.begin(), sb.end(), sa.begin()).second;
                char dup = *extra;
                if (std::find(b.begin(), b.end(), dup) == b.end())
                    continue;
                auto first = std::find(a.begin(), a.end(), dup);
                if (first == a.end())
                    continue;
                auto second = std::find(first + 1, a.end(), dup);
                if (second == a.end())
                    continue;
                auto p = static_cast<std::size_t>(second - a.begin());
                LetterString reduced = a;
                reduced.erase(p);
                if (reduced == b)
                    add(Rule::intended(TransformationType::RemoveRedundant, step));
            }
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

LetterString solve(const AnalogyProblem& problem, const PermutedAlphabet& alphabet)
{
    auto out = apply_rule(Rule::intended(problem.transformation, problem.interval.value()),
                          alphabet, problem.target_a);
    if (!out)
        throw OutOfRange("intended " + std::string(to_string(problem.transformation)) +
                         " rule does not apply to target " + problem.target_a.bracketed());
    return *out;
}

} // namespace counterfax
