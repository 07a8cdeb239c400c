#pragma once

#include <stdexcept>
#include <string>

namespace counterfax {

/// A character outside a-z was used where a letter was expected.
class UnknownLetter : public std::invalid_argument {
public:
    explicit UnknownLetter(char c)
      : std::invalid_argument(std::string("unknown letter '") + c + "'"), letter(c) {}
    char letter;
};

/// An alphabet index or shift left the range 0..25.
class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Generation parameters are inconsistent with the requested transformation.
class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file; the message names the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

/// Statistical routine called outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace counterfax
