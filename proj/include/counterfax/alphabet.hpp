// alphabet.hpp -- permuted alphabets and index arithmetic over them

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace counterfax {

inline constexpr int kAlphabetSize = 26;

/// An ordering of the 26 lowercase letters. Successor, predecessor and
/// sort order are all defined by position in this ordering.
///
/// Immutable once constructed. Construction validates that `letters` is a
/// permutation of a-z and throws `std::invalid_argument` otherwise.
class PermutedAlphabet {
public:
    PermutedAlphabet(std::string id, std::string_view letters);

    const std::string& id() const { return _id; }
    const std::string& letters() const { return _letters; }

    /// 0-based position of `letter`. Throws UnknownLetter for anything
    /// outside a-z.
    int index_of(char letter) const;

    /// Throws OutOfRange unless 0 <= position <= 25.
    char letter_at(int position) const;

    /// letter_at(index_of(letter) + delta). There is no wraparound: leaving
    /// either end throws OutOfRange.
    char shift(char letter, int delta) const;

    bool contains(char letter) const { return letter >= 'a' && letter <= 'z'; }

    /// "[x y l k ...]"
    std::string bracketed() const;

    /// Space separated, as accepted by parse_alphabet_line.
    std::string config_line() const;

    friend bool operator==(const PermutedAlphabet& a, const PermutedAlphabet& b)
    {
        return a._id == b._id && a._letters == b._letters;
    }

private:
    std::string _id;
    std::string _letters;
    std::array<int, kAlphabetSize> _index{};
};

/// Permuted alphabet used by the original counterfactual problem set.
const PermutedAlphabet& hw_alphabet();

/// Second synthetic alphabet, used for the novel problem set.
const PermutedAlphabet& alternate_alphabet();

/// The ordinary a-z ordering.
const PermutedAlphabet& standard_alphabet();

/// Parses "x y l k w ..." (26 whitespace-separated letters).
PermutedAlphabet parse_alphabet_line(std::string id, std::string_view line);

/// Resolves a built-in name ("hw", "alt", "std") or loads the first
/// non-comment line of a file; the id is then the file stem.
PermutedAlphabet load_alphabet(const std::string& name_or_path);

/// Looks up a built-in alphabet by id; throws std::invalid_argument.
const PermutedAlphabet& builtin_alphabet(std::string_view id);

/// Built-in alphabets plus any loaded from files, looked up by id.
class AlphabetRegistry {
public:
    /// Replaces any alphabet already registered under the same id.
    void add(PermutedAlphabet alphabet);
    /// Registered alphabets first, then built-ins; throws std::invalid_argument.
    const PermutedAlphabet& get(std::string_view id) const;

private:
    std::vector<PermutedAlphabet> _custom;
};

} // namespace counterfax
