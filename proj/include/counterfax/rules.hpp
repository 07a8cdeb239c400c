// rules.hpp -- symbolic rule engine: intended transformations, the
// alternative-rule catalog, rule induction from a source pair, and solving.

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/problem.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace counterfax {

enum class RuleKind {
    IntendedTransform,
    PositionalSwap,
    PositionalReplaceShift,
    PositionalDelete,
    AppendShift,
    LiteralCopy,
};

std::string_view to_string(RuleKind kind);

/// A structural transformation of a letter string.
///
/// Parameters that do not apply to `kind` stay zero. `standard_alphabet`
/// marks the standard-alphabet variant of an alphabet-dependent rule: the
/// same rule read against a-z instead of the problem's permuted ordering.
struct Rule {
    RuleKind kind = RuleKind::LiteralCopy;
    TransformationType transformation = TransformationType::ExtendSequence;
    int delta = 0;
    int first = 0;
    int second = 0;
    bool standard_alphabet = false;
    LetterString literal;

    static Rule intended(TransformationType type, int delta);
    static Rule swap(int i, int j);
    static Rule replace_shift(int position, int delta);
    static Rule remove_at(int position);
    static Rule append_shift(int delta);
    static Rule literal_copy(LetterString b);
    /// Throws std::invalid_argument for rules whose meaning does not
    /// depend on the alphabet.
    static Rule standard_variant(Rule inner);

    /// Rule reads letter order from the alphabet (swaps, deletes and
    /// literal copies do not).
    bool alphabet_dependent() const;

    /// Name of the outermost kind, e.g. "StandardAlphabetVariant".
    std::string kind_name() const;

    /// e.g. "PositionalSwap(1,3)", "StandardAlphabetVariant(AppendShift(+1))"
    std::string to_string() const;

    auto operator<=>(const Rule&) const = default;
};

/// Inverse of Rule::to_string. Throws std::invalid_argument.
Rule parse_rule(std::string_view text);

/// Longest string the positional rules are enumerated for.
inline constexpr int kMaxRuleLength = 6;

/// Applies `rule` to `input`. nullopt means the rule is inapplicable: a
/// position is out of bounds, a shift leaves the alphabet, or the input
/// lacks the structure the rule transforms.
///
/// Intended transforms with interval d:
///   ExtendSequence   append the letter d after the last
///   Successor        last letter moves forward d
///   Predecessor      first letter moves back d
///   RemoveRedundant  drop the second copy of the only repeated letter
///   FixSequence      the unique step-d run differing in at most one place
///   Sort             sort by alphabet order
/// The last three require the result to be a run at step d.
std::optional<LetterString> apply_rule(const Rule& rule, const PermutedAlphabet& alphabet,
                                       const LetterString& input);

/// Every rule of the catalog, with LiteralCopy carrying `b`.
std::vector<Rule> rule_catalog(const LetterString& b, int max_length = kMaxRuleLength);

/// All catalog rules mapping source_a to source_b exactly, sorted. Derived
/// from the differences between the two strings rather than by trying the
/// catalog; always contains LiteralCopy(source_b).
std::vector<Rule> induce_rules(const PermutedAlphabet& alphabet,
                               const LetterString& source_a,
                               const LetterString& source_b);

/// Intended answer: IntendedTransform(transformation, interval) applied to
/// target_a. Throws OutOfRange if the rule is inapplicable.
LetterString solve(const AnalogyProblem& problem, const PermutedAlphabet& alphabet);

/// True if every consecutive pair is `step` apart in `alphabet`.
bool is_run(const LetterString& s, int step, const PermutedAlphabet& alphabet);

} // namespace counterfax
