#include "counterfax/prompt.hpp"

#include <stdexcept>

namespace counterfax {

std::string_view to_string(PromptMode mode)
{
    return mode == PromptMode::Plain ? "plain" : "tool";
}

PromptMode parse_prompt_mode(std::string_view name)
{
    if (name == "plain")
        return PromptMode::Plain;
    if (name == "tool")
        return PromptMode::ToolAugmented;
    throw std::invalid_argument("unknown prompt mode '" + std::string(name) + "' (expected plain or tool)");
}

std::vector<ChatMessage> build_prompt(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                                      PromptMode mode)
{
    if (problem.alphabet_id != alphabet.id())
        throw std::invalid_argument("problem " + problem.id + " uses alphabet '" + problem.alphabet_id +
                                    "', not '" + alphabet.id() + "'");
    const std::string pattern = problem.source_a.bracketed() + " " + problem.source_b.bracketed() + "\n" +
                                problem.target_a.bracketed() + " [ ? ]";
    if (mode == PromptMode::Plain) {
        std::string text = "Use this fictional alphabet: " + alphabet.bracketed() +
                           ".\n\nLet's try to complete the pattern:\n\n" + pattern +
                           "\n\nPlease only provide the answer. Do not provide any additional explanation."
                           "\n\nAnswer:";
        return {{"system", std::string(kDefaultSystemMessage)}, {"user", std::move(text)}};
    }
    std::string text = "Let's solve a puzzle problem involving the following fictional alphabet:\n\n" +
                       alphabet.bracketed() + "\n\nHere is the problem:\n\n" + pattern;
    return {{"user", std::move(text)}};
}

} // namespace counterfax
