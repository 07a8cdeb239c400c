// generator.hpp -- construction of letter-string analogy problems

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/problem.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace counterfax {

/// Letters at alphabet indices start, start+step, ... (length letters).
/// Throws OutOfRange if the last index exceeds 25.
LetterString build_base_sequence(const PermutedAlphabet& alphabet, int start, int length, int step);

/// Builds one (A, B) pair of a problem from a start index and the side's
/// positional parameters. Used for both the source and the target pair.
///
///   ExtendSequence  A = 4 letters at step 1, B = A + letter at +interval
///   Successor       A = 4 letters at step 1, B = A with last letter +interval
///   Predecessor     A = 4 letters at step 1, B = A with first letter -interval
///   RemoveRedundant base = 5 letters at step interval; A duplicates one letter
///   FixSequence     base = 5 letters at step interval; A has one wrong letter
///   Sort            base = 5 letters at step interval; A has two letters swapped
///
/// B is the base for the last three. Throws OutOfRange or InvalidParams.
std::pair<LetterString, LetterString> build_pair(const PermutedAlphabet& alphabet,
                                                 TransformationType type,
                                                 IntervalSize interval,
                                                 int start,
                                                 const SideParams& params);

/// build_pair for the source side of `meta`.
std::pair<LetterString, LetterString> build_source_pair(const PermutedAlphabet& alphabet,
                                                        TransformationType type,
                                                        IntervalSize interval,
                                                        const GenerationMeta& meta);

/// Inclusive range of start indices that keep every letter of a pair
/// inside the alphabet.
std::pair<int, int> valid_start_range(TransformationType type, IntervalSize interval);

/// Assembles a problem from fully specified parameters. The answer is
/// taken from the constructed target pair and cross-checked against the
/// rule engine; a disagreement throws std::logic_error.
AnalogyProblem build_problem(const PermutedAlphabet& alphabet,
                             TransformationType type,
                             IntervalSize interval,
                             const GenerationMeta& meta,
                             std::string id = {},
                             std::uint64_t seed = 0);

/// Samples the random parameters of a problem.
GenerationMeta sample_meta(const PermutedAlphabet& alphabet,
                           TransformationType type,
                           IntervalSize interval,
                           std::mt19937_64& rng);

AnalogyProblem generate_problem(const PermutedAlphabet& alphabet,
                                TransformationType type,
                                IntervalSize interval,
                                std::mt19937_64& rng);

/// Seed for one problem, derived from the set seed and its cell/counter so
/// that each problem can be regenerated on its own.
std::uint64_t problem_seed(std::uint64_t set_seed, TransformationType type,
                           IntervalSize interval, int counter);

/// `per_cell` problems for every transformation type and each interval in
/// `intervals`. Ids are "{alphabet}-{transformation}-{interval}-{counter}".
/// Throws std::invalid_argument if per_cell < 1 or intervals is empty.
std::vector<AnalogyProblem> generate_problem_set(const PermutedAlphabet& alphabet,
                                                 int per_cell,
                                                 const std::set<int>& intervals,
                                                 std::uint64_t seed);

} // namespace counterfax
