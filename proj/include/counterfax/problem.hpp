// problem.hpp -- letter strings, transformation types and analogy problems

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace counterfax {

/// An ordered run of letters, stored one char per letter.
class LetterString {
public:
    LetterString() = default;
    explicit LetterString(std::string letters) : _letters(std::move(letters)) {}

    std::size_t size() const { return _letters.size(); }
    bool empty() const { return _letters.empty(); }
    char operator[](std::size_t i) const { return _letters[i]; }
    char& operator[](std::size_t i) { return _letters[i]; }
    auto begin() const { return _letters.begin(); }
    auto end() const { return _letters.end(); }
    auto begin() { return _letters.begin(); }
    auto end() { return _letters.end(); }
    char front() const { return _letters.front(); }
    char back() const { return _letters.back(); }

    void push_back(char c) { _letters.push_back(c); }
    void insert(std::size_t pos, char c) { _letters.insert(_letters.begin() + pos, c); }
    void erase(std::size_t pos) { _letters.erase(_letters.begin() + pos); }

    const std::string& str() const { return _letters; }

    /// "[x y l k]"
    std::string bracketed() const;

    auto operator<=>(const LetterString&) const = default;

private:
    std::string _letters;
};

std::ostream& operator<<(std::ostream& out, const LetterString& s);

enum class TransformationType {
    ExtendSequence,
    Successor,
    Predecessor,
    RemoveRedundant,
    FixSequence,
    Sort,
};

inline constexpr std::array<TransformationType, 6> kAllTransformations = {
    TransformationType::ExtendSequence, TransformationType::Successor,
    TransformationType::Predecessor,    TransformationType::RemoveRedundant,
    TransformationType::FixSequence,    TransformationType::Sort,
};

/// Machine name, e.g. "extend_sequence".
std::string_view to_string(TransformationType t);

/// Table label, e.g. "Extend sequence".
std::string_view display_name(TransformationType t);

/// Inverse of to_string; nullopt for unknown names.
std::optional<TransformationType> parse_transformation(std::string_view name);

/// Interval size of a problem: 1 or 2.
class IntervalSize {
public:
    /// Throws std::invalid_argument for anything but 1 or 2.
    explicit IntervalSize(int value);
    int value() const { return _value; }
    auto operator<=>(const IntervalSize&) const = default;

private:
    int _value;
};

/// Random choices made for one side (source or target) of a problem.
struct SideParams {
    /// RemoveRedundant: duplicated base position. FixSequence: replaced position.
    std::optional<int> modified_position;
    /// FixSequence only.
    std::optional<char> distractor_letter;
    /// Sort only; first < second.
    std::optional<std::pair<int, int>> swap_pair;

    bool operator==(const SideParams&) const = default;
};

struct GenerationMeta {
    int source_start = 0;
    int target_start = 0;
    /// Letter spacing in the ordered base sequence.
    int base_step = 1;
    /// Shift used by extend/successor/predecessor.
    std::optional<int> transform_delta;
    SideParams source;
    SideParams target;

    bool operator==(const GenerationMeta&) const = default;
};

struct AnalogyProblem {
    std::string id;
    std::string alphabet_id;
    TransformationType transformation = TransformationType::Successor;
    IntervalSize interval{1};
    LetterString source_a;
    LetterString source_b;
    LetterString target_a;
    /// Absent for problems read from a public export.
    std::optional<LetterString> answer;
    std::optional<GenerationMeta> meta;
    std::uint64_t seed = 0;

    bool operator==(const AnalogyProblem&) const = default;
};

} // namespace counterfax
