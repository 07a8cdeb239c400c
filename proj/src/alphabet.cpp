#include "counterfax/alphabet.hpp"

#include "counterfax/errors.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace counterfax {

PermutedAlphabet::PermutedAlphabet(std::string id, std::string_view letters)
  : _id(std::move(id)), _letters(letters)
{
    if (_letters.size() != kAlphabetSize)
        throw std::invalid_argument("alphabet '" + _id + "' has " +
                                    std::to_string(_letters.size()) + " letters, expected 26");
    _index.fill(-1);
    for (int i = 0; i < kAlphabetSize; ++i) {
        char c = _letters[i];
        if (c < 'a' || c > 'z')
            throw std::invalid_argument("alphabet '" + _id + "' contains non-letter '" +
                                        std::string(1, c) + "'");
        if (_index[c - 'a'] != -1)
            throw std::invalid_argument("alphabet '" + _id + "' repeats '" +
                                        std::string(1, c) + "'");
        _index[c - 'a'] = i;
    }
}

int PermutedAlphabet::index_of(char letter) const
{
    if (!contains(letter))
        throw UnknownLetter(letter);
    return _index[letter - 'a'];
}

char PermutedAlphabet::letter_at(int position) const
{
    if (position < 0 || position >= kAlphabetSize)
        throw OutOfRange("alphabet position " + std::to_string(position) + " outside 0..25");
    return _letters[position];
}

char PermutedAlphabet::shift(char letter, int delta) const
{
    int target = index_of(letter) + delta;
    if (target < 0 || target >= kAlphabetSize)
        throw OutOfRange(std::string("shifting '") + letter + "' by " + std::to_string(delta) +
                         " leaves alphabet '" + _id + "'");
    return _letters[target];
}

std::string PermutedAlphabet::bracketed() const
{
    return "[" + config_line() + "]";
}

std::string PermutedAlphabet::config_line() const
{
    std::string out;
    for (char c : _letters) {
        if (!out.empty())
            out += ' ';
        out += c;
    }
    return out;
}

const PermutedAlphabet& hw_alphabet()
{
    static const PermutedAlphabet a("hw", "xylkwbfztnjrqahvgmuopdicse");
    return a;
}

const PermutedAlphabet& alternate_alphabet()
{
    static const PermutedAlphabet a("alt", "nhvbopyztmrwxfiqdjlcaskgeu");
    return a;
}

const PermutedAlphabet& standard_alphabet()
{
    static const PermutedAlphabet a("std", "abcdefghijklmnopqrstuvwxyz");
    return a;
}

const PermutedAlphabet& builtin_alphabet(std::string_view id)
{
    for (const auto* a : {&hw_alphabet(), &alternate_alphabet(), &standard_alphabet()})
        if (a->id() == id)
            return *a;
    throw std::invalid_argument("unknown alphabet id '" + std::string(id) + "'");
}

void AlphabetRegistry::add(PermutedAlphabet alphabet)
{
    for (auto& a : _custom)
        if (a.id() == alphabet.id()) {
            a = std::move(alphabet);
            return;
        }
    _custom.push_back(std::move(alphabet));
}

const PermutedAlphabet& AlphabetRegistry::get(std::string_view id) const
{
    for (const auto& a : _custom)
        if (a.id() == id)
            return a;
    return builtin_alphabet(id);
}

PermutedAlphabet parse_alphabet_line(std::string id, std::string_view line)
{
    std::istringstream in{std::string(line)};
    std::string letters, token;
    while (in >> token) {
        if (token.size() != 1)
            throw std::invalid_argument("alphabet entry '" + token + "' is not a single letter");
        letters += token[0];
    }
    return PermutedAlphabet(std::move(id), letters);
}

PermutedAlphabet load_alphabet(const std::string& name_or_path)
{
    for (const auto* a : {&hw_alphabet(), &alternate_alphabet(), &standard_alphabet()})
        if (a->id() == name_or_path)
            return *a;

    std::ifstream in(name_or_path);
    if (!in)
        throw std::invalid_argument("'" + name_or_path + "' is neither a built-in alphabet nor a readable file");
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        return parse_alphabet_line(std::filesystem::path(name_or_path).stem().string(), line);
    }
    throw std::invalid_argument("alphabet file '" + name_or_path + "' is empty");
}

} // namespace counterfax
