#include "counterfax/generator.hpp"

#include "counterfax/errors.hpp"
#include "counterfax/rules.hpp"

#include <algorithm>

namespace counterfax {

namespace {

constexpr int kShortLength = 4;
constexpr int kBaseLength = 5;

bool uses_spaced_base(TransformationType type)
{
    return type == TransformationType::RemoveRedundant ||
           type == TransformationType::FixSequence || type == TransformationType::Sort;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int uniform(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

SideParams sample_side(const PermutedAlphabet& alphabet, TransformationType type,
                       IntervalSize interval, int start, std::mt19937_64& rng)
{
    SideParams side;
    switch (type) {
    case TransformationType::RemoveRedundant:
        side.modified_position = uniform(rng, 0, kBaseLength - 1);
        break;
    case TransformationType::FixSequence: {
        auto base = build_base_sequence(alphabet, start, kBaseLength, interval.value());
        side.modified_position = uniform(rng, 0, kBaseLength - 1);
        std::string pool;
        for (char c : alphabet.letters())
            if (std::find(base.begin(), base.end(), c) == base.end())
                pool += c;
        side.distractor_letter = pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)];
        break;
    }
    case TransformationType::Sort: {
        // C(5,2) = 10 unordered pairs
        int k = uniform(rng, 0, 9);
        for (int i = 0; i < kBaseLength; ++i)
            for (int j = i + 1; j < kBaseLength; ++j)
                if (k-- == 0)
                    side.swap_pair = std::pair{i, j};
        break;
    }
    default:
        break;
    }
    return side;
}

} // namespace

LetterString build_base_sequence(const PermutedAlphabet& alphabet, int start, int length, int step)
{
    if (step < 1 || length < 1)
        throw InvalidParams("base sequence needs step >= 1 and length >= 1");
    if (start < 0 || start + (length - 1) * step >= kAlphabetSize)
        throw OutOfRange("base sequence from " + std::to_string(start) + " with length " +
                         std::to_string(length) + " and step " + std::to_string(step) +
                         " exceeds the alphabet");
    LetterString out;
    for (int k = 0; k < length; ++k)
        out.push_back(alphabet.letter_at(start + k * step));
    return out;
}

std::pair<int, int> valid_start_range(TransformationType type, IntervalSize interval)
{
    const int i = interval.value();
    switch (type) {
    case TransformationType::ExtendSequence:
    case TransformationType::Successor:
        return {0, kAlphabetSize - kShortLength - i};
    case TransformationType::Predecessor:
        return {i, kAlphabetSize - kShortLength};
    default:
        return {0, kAlphabetSize - 1 - (kBaseLength - 1) * i};
    }
}

std::pair<LetterString, LetterString> build_pair(const PermutedAlphabet& alphabet,
                                                 TransformationType type,
                                                 IntervalSize interval,
                                                 int start,
                                                 const SideParams& params)
{
    const int i = interval.value();
    if (!uses_spaced_base(type)) {
        LetterString a = build_base_sequence(alphabet, start, kShortLength, 1);
        LetterString b = a;
        switch (type) {
        case TransformationType::ExtendSequence:
            b.push_back(alphabet.shift(a.back(), i));
            break;
        case TransformationType::Successor:
            b[b.size() - 1] = alphabet.shift(a.back(), i);
            break;
        default:
            b[0] = alphabet.shift(a.front(), -i);
            break;
        }
        return {a, b};
    }

    LetterString base = build_base_sequence(alphabet, start, kBaseLength, i);
    LetterString a = base;
    switch (type) {
    case TransformationType::RemoveRedundant: {
        int pos = params.modified_position.value_or(-1);
        if (pos < 0 || pos >= kBaseLength)
            throw InvalidParams("remove_redundant needs a duplicated position in 0..4");
        a.insert(pos + 1, base[pos]);
        break;
    }
    case TransformationType::FixSequence: {
        int pos = params.modified_position.value_or(-1);
        if (pos < 0 || pos >= kBaseLength)
            throw InvalidParams("fix_sequence needs a replaced position in 0..4");
        if (!params.distractor_letter || !alphabet.contains(*params.distractor_letter))
            throw InvalidParams("fix_sequence needs a distractor letter");
        if (*params.distractor_letter == base[pos])
            throw InvalidParams("fix_sequence distractor equals the correct letter");
        a[pos] = *params.distractor_letter;
        break;
    }
    default: {
        if (!params.swap_pair)
            throw InvalidParams("sort needs a swap pair");
        auto [p, q] = *params.swap_pair;
        if (p < 0 || q >= kBaseLength || p >= q)
            throw InvalidParams("sort swap pair must satisfy 0 <= p < q <= 4");
        std::swap(a[p], a[q]);
        break;
    }
    }
    return {a, base};
}

std::pair<LetterString, LetterString> build_source_pair(const PermutedAlphabet& alphabet,
                                                        TransformationType type,
                                                        IntervalSize interval,
                                                        const GenerationMeta& meta)
{
    return build_pair(alphabet, type, interval, meta.source_start, meta.source);
}

AnalogyProblem build_problem(const PermutedAlphabet& alphabet,
                             TransformationType type,
                             IntervalSize interval,
                             const GenerationMeta& meta,
                             std::string id,
                             std::uint64_t seed)
{
    if (meta.source_start == meta.target_start)
        throw InvalidParams("source and target must start at different letters");

    auto [source_a, source_b] = build_pair(alphabet, type, interval, meta.source_start, meta.source);
    auto [target_a, target_b] = build_pair(alphabet, type, interval, meta.target_start, meta.target);

    AnalogyProblem p;
    p.id = std::move(id);
    p.alphabet_id = alphabet.id();
    p.transformation = type;
    p.interval = interval;
    p.source_a = std::move(source_a);
    p.source_b = std::move(source_b);
    p.target_a = std::move(target_a);
    p.answer = target_b;
    p.meta = meta;
    p.seed = seed;

    if (solve(p, alphabet) != target_b)
        throw std::logic_error("rule engine disagrees with constructed answer for " + p.id);
    return p;
}

GenerationMeta sample_meta(const PermutedAlphabet& alphabet,
                           TransformationType type,
                           IntervalSize interval,
                           std::mt19937_64& rng)
{
    auto [lo, hi] = valid_start_range(type, interval);
    GenerationMeta meta;
    meta.source_start = uniform(rng, lo, hi);
    // uniform over the range with the source start removed
    meta.target_start = uniform(rng, lo, hi - 1);
    if (meta.target_start >= meta.source_start)
        ++meta.target_start;

    if (uses_spaced_base(type)) {
        meta.base_step = interval.value();
    } else {
        meta.base_step = 1;
        meta.transform_delta = interval.value();
    }
    meta.source = sample_side(alphabet, type, interval, meta.source_start, rng);
    meta.target = sample_side(alphabet, type, interval, meta.target_start, rng);
    return meta;
}

AnalogyProblem generate_problem(const PermutedAlphabet& alphabet,
                                TransformationType type,
                                IntervalSize interval,
                                std::mt19937_64& rng)
{
    return build_problem(alphabet, type, interval, sample_meta(alphabet, type, interval, rng));
}

std::uint64_t problem_seed(std::uint64_t set_seed, TransformationType type,
                           IntervalSize interval, int counter)
{
    std::uint64_t h = splitmix64(set_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(type));
    h = splitmix64(h ^ static_cast<std::uint64_t>(interval.value()));
    return splitmix64(h ^ static_cast<std::uint64_t>(counter));
}

std::vector<AnalogyProblem> generate_problem_set(const PermutedAlphabet& alphabet,
                                                 int per_cell,
                                                 const std::set<int>& intervals,
                                                 std::uint64_t seed)
{
    if (per_cell < 1)
        throw std::invalid_argument("per-cell count must be at least 1");
    if (intervals.empty())
        throw std::invalid_argument("at least one interval size is required");

    std::vector<AnalogyProblem> out;
    out.reserve(static_cast<std::size_t>(per_cell) * kAllTransformations.size() * intervals.size());
    for (int iv : intervals) {
        IntervalSize interval(iv);
        for (auto type : kAllTransformations) {
            for (int k = 0; k < per_cell; ++k) {
                std::uint64_t s = problem_seed(seed, type, interval, k);
                std::mt19937_64 rng(s);
                std::string id = alphabet.id() + "-" + std::string(to_string(type)) + "-" +
                                 std::to_string(iv) + "-" + std::to_string(k);
                out.push_back(build_problem(alphabet, type, interval,
                                            sample_meta(alphabet, type, interval, rng),
                                            std::move(id), s));
            }
        }
    }
    return out;
}

} // namespace counterfax
