#include "counterfax/problem.hpp"

#include <stdexcept>

namespace counterfax {

std::string LetterString::bracketed() const
{
    std::string out = "[";
    for (std::size_t i = 0; i < _letters.size(); ++i) {
        if (i)
            out += ' ';
        out += _letters[i];
    }
    out += ']';
    return out;
}

std::ostream& operator<<(std::ostream& out, const LetterString& s)
{
    return out << s.bracketed();
}

namespace {

struct TypeNames {
    TransformationType type;
    std::string_view name;
    std::string_view display;
};

constexpr TypeNames kTypeNames[] = {
    {TransformationType::ExtendSequence, "extend_sequence", "Extend sequence"},
    {TransformationType::Successor, "successor", "Successor"},
    {TransformationType::Predecessor, "predecessor", "Predecessor"},
    {TransformationType::RemoveRedundant, "remove_redundant", "Remove redundant letter"},
    {TransformationType::FixSequence, "fix_sequence", "Fix alphabetic sequence"},
    {TransformationType::Sort, "sort", "Sort"},
};

} // namespace

std::string_view to_string(TransformationType t)
{
    return kTypeNames[static_cast<int>(t)].name;
}

std::string_view display_name(TransformationType t)
{
    return kTypeNames[static_cast<int>(t)].display;
}

std::optional<TransformationType> parse_transformation(std::string_view name)
{
    for (const auto& n : kTypeNames)
        if (n.name == name)
            return n.type;
    return std::nullopt;
}

IntervalSize::IntervalSize(int value) : _value(value)
{
    if (value != 1 && value != 2)
        throw std::invalid_argument("interval size must be 1 or 2, got " + std::to_string(value));
}

} // namespace counterfax
