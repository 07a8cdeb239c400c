#include "counterfax/errors.hpp"
#include "counterfax/generator.hpp"
#include "counterfax/rules.hpp"

#include <gtest/gtest.h>

#include <random>

namespace counterfax {
namespace {

using T = TransformationType;

LetterString ls(const char* s) { return LetterString(s); }

std::vector<Rule> without_literal(std::vector<Rule> rules)
{
    std::erase_if(rules, [](const Rule& r) { return r.kind == RuleKind::LiteralCopy; });
    return rules;
}

// Oracle: try every catalog rule against the pair.
std::vector<Rule> brute_force_rules(const PermutedAlphabet& alphabet, const LetterString& a,
                                    const LetterString& b)
{
    std::vector<Rule> out;
    for (const auto& r : rule_catalog(b))
        if (apply_rule(r, alphabet, a) == b)
            out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
}

AnalogyProblem sort_problem()
{
    AnalogyProblem p;
    p.id = "sort-example";
    p.alphabet_id = "hw";
    p.transformation = T::Sort;
    p.interval = IntervalSize(1);
    p.source_a = ls("xklyw");
    p.source_b = ls("xylkw");
    p.target_a = ls("hrqaj");
    return p;
}

TEST(RulesTest, SolveExamples)
{
    const auto& hw = hw_alphabet();
    AnalogyProblem p;
    p.transformation = T::Successor;
    p.interval = IntervalSize(1);
    p.target_a = ls("jrqa");
    EXPECT_EQ(solve(p, hw), ls("jrqh"));

    p.interval = IntervalSize(2);
    p.target_a = ls("kwbf");
    EXPECT_EQ(solve(p, hw), ls("kwbt"));

    EXPECT_EQ(solve(sort_problem(), hw), ls("jrqah"));

    p.target_a = ls("icse");
    EXPECT_THROW(solve(p, hw), OutOfRange);
}

TEST(RulesTest, InduceSortExample)
{
    auto rules = without_literal(induce_rules(hw_alphabet(), ls("xklyw"), ls("xylkw")));
    std::vector<Rule> expected{Rule::intended(T::Sort, 1), Rule::swap(1, 3)};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(rules, expected);
}

TEST(RulesTest, InduceIdentityPair)
{
    const auto& hw = hw_alphabet();
    auto a = ls("xylk");
    auto rules = induce_rules(hw, a, a);
    EXPECT_TRUE(std::binary_search(rules.begin(), rules.end(), Rule::literal_copy(a)));
    // a consecutive run is already sorted and already fixed
    EXPECT_TRUE(std::binary_search(rules.begin(), rules.end(), Rule::intended(T::Sort, 1)));
    EXPECT_TRUE(std::binary_search(rules.begin(), rules.end(), Rule::intended(T::FixSequence, 1)));
    for (const auto& r : rules)
        EXPECT_EQ(apply_rule(r, hw, a), a) << r.to_string();
    EXPECT_EQ(rules, brute_force_rules(hw, a, a));
}

TEST(RulesTest, InduceSuccessorTwo)
{
    auto rules = without_literal(induce_rules(hw_alphabet(), ls("xylk"), ls("xylb")));
    std::vector<Rule> expected{Rule::intended(T::Successor, 2), Rule::replace_shift(3, 2)};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(rules, expected);
    for (const auto& r : rules)
        EXPECT_NE(r.kind, RuleKind::AppendShift);
}

TEST(RulesTest, ApplyExamples)
{
    const auto& hw = hw_alphabet();
    EXPECT_EQ(apply_rule(Rule::swap(1, 3), hw, ls("hrqaj")), ls("haqrj"));
    EXPECT_EQ(apply_rule(Rule::literal_copy(ls("xylkw")), hw, ls("jrqa")), ls("xylkw"));
    EXPECT_EQ(apply_rule(Rule::replace_shift(5, 1), hw, ls("jrqa")), std::nullopt);
    EXPECT_EQ(apply_rule(Rule::remove_at(4), hw, ls("jrqa")), std::nullopt);
    EXPECT_EQ(apply_rule(Rule::append_shift(2), hw, ls("cse")), std::nullopt);
    EXPECT_EQ(apply_rule(Rule::intended(T::Predecessor, 1), hw, ls("xylk")), std::nullopt);
    EXPECT_EQ(apply_rule(Rule::intended(T::RemoveRedundant, 2), hw, ls("xllwft")), ls("xlwft"));
    EXPECT_EQ(apply_rule(Rule::intended(T::RemoveRedundant, 1), hw, ls("xllwft")), std::nullopt);
    EXPECT_EQ(apply_rule(Rule::intended(T::FixSequence, 1), hw, ls("xylgw")), ls("xylkw"));
    EXPECT_EQ(apply_rule(Rule::intended(T::FixSequence, 2), hw, ls("xlwgt")), ls("xlwft"));
    EXPECT_EQ(apply_rule(Rule::intended(T::FixSequence, 1), hw, ls("gylkw")), ls("xylkw"));
    EXPECT_EQ(apply_rule(Rule::intended(T::Sort, 2), hw, ls("xfwlt")), ls("xlwft"));
    EXPECT_EQ(apply_rule(Rule::intended(T::Sort, 2), hw, ls("xklyw")), std::nullopt);
    // standard ordering: b c d e -> b c d f
    EXPECT_EQ(apply_rule(Rule::standard_variant(Rule::intended(T::Successor, 1)), hw, ls("bcde")),
              ls("bcdf"));
    EXPECT_EQ(apply_rule(Rule::swap(0, 1), hw, ls("ab3")), std::nullopt);
}

TEST(RulesTest, StandardVariantOnlyForOrderDependentRules)
{
    EXPECT_THROW(Rule::standard_variant(Rule::swap(0, 1)), std::invalid_argument);
    EXPECT_THROW(Rule::standard_variant(Rule::remove_at(0)), std::invalid_argument);
    EXPECT_NO_THROW(Rule::standard_variant(Rule::append_shift(1)));
    EXPECT_EQ(Rule::standard_variant(Rule::append_shift(1)).kind_name(), "StandardAlphabetVariant");
}

TEST(RulesTest, RuleStringsRoundTrip)
{
    for (const auto& r : rule_catalog(ls("xylkw"))) {
        EXPECT_EQ(parse_rule(r.to_string()), r) << r.to_string();
    }
    EXPECT_EQ(Rule::swap(1, 3).to_string(), "PositionalSwap(1,3)");
    EXPECT_EQ(Rule::replace_shift(3, 2).to_string(), "PositionalReplaceShift(3,+2)");
    EXPECT_EQ(Rule::standard_variant(Rule::intended(T::Sort, 1)).to_string(),
              "StandardAlphabetVariant(IntendedTransform(sort,1))");
    EXPECT_THROW(parse_rule("PositionalSwap(1)"), std::invalid_argument);
    EXPECT_THROW(parse_rule("Nonsense"), std::invalid_argument);
    EXPECT_THROW(parse_rule("IntendedTransform(spin,1)"), std::invalid_argument);
}

TEST(RulesTest, CatalogSize)
{
    // 12 intended + 24 replace-shift + 2 append, doubled for the standard
    // variants, plus 15 swaps, 6 deletes and the literal copy
    EXPECT_EQ(rule_catalog(ls("ab")).size(), 38u * 2 + 15 + 6 + 1);
}

TEST(RulesTest, InduceMatchesBruteForceOnGeneratedPairs)
{
    for (const auto* alphabet : {&hw_alphabet(), &alternate_alphabet()}) {
        for (const auto& p : generate_problem_set(*alphabet, 40, {1, 2}, 11)) {
            for (auto [a, b] : {std::pair{p.source_a, p.source_b}, std::pair{p.target_a, *p.answer}}) {
                auto induced = induce_rules(*alphabet, a, b);
                ASSERT_EQ(induced, brute_force_rules(*alphabet, a, b)) << p.id;
                for (const auto& r : induced)
                    ASSERT_EQ(apply_rule(r, *alphabet, a), b) << r.to_string();
            }
        }
    }
}

// Random pairs built by perturbing a random string with one catalog rule, plus
// fully random pairs. Exercises the standard-alphabet and edge branches.
TEST(RulesTest, InduceMatchesBruteForceOnRandomPairs)
{
    std::mt19937 rng(2024);
    const auto& hw = hw_alphabet();
    auto random_string = [&](int n, int letters) {
        LetterString s;
        for (int k = 0; k < n; ++k)
            s.push_back(static_cast<char>('a' + std::uniform_int_distribution<int>(0, letters - 1)(rng)));
        return s;
    };
    auto catalog = rule_catalog(ls("abc"));
    int nonempty = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        LetterString a;
        if (trial % 3 == 0) {
            // runs in either ordering, so order-dependent rules fire
            const auto& order = trial % 2 ? hw : standard_alphabet();
            int step = 1 + trial % 2;
            int start = std::uniform_int_distribution<int>(0, 25 - (n - 1) * step)(rng);
            for (int k = 0; k < n; ++k)
                a.push_back(order.letter_at(start + k * step));
        } else {
            a = random_string(n, trial % 5 == 0 ? 4 : 26);
        }
        LetterString b;
        if (trial % 4 == 3) {
            b = random_string(std::uniform_int_distribution<int>(1, 6)(rng), 26);
        } else {
            const auto& r = catalog[std::uniform_int_distribution<std::size_t>(0, catalog.size() - 2)(rng)];
            auto applied = apply_rule(r, hw, a);
            if (!applied)
                continue;
            b = *applied;
            // the perturbed input is sometimes a broken run
            if (trial % 7 == 0 && !a.empty())
                a[std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng)] = 'q';
        }
        auto induced = induce_rules(hw, a, b);
        ASSERT_EQ(induced, brute_force_rules(hw, a, b)) << a << " -> " << b;
        nonempty += induced.size() > 1;
    }
    EXPECT_GT(nonempty, 5000);
}

} // namespace
} // namespace counterfax
