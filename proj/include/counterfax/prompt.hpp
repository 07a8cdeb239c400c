// prompt.hpp -- the two prompt protocols used to query chat models

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/classifier.hpp"
#include "counterfax/problem.hpp"

#include <string_view>
#include <vector>

namespace counterfax {

enum class PromptMode {
    /// Answer-only instructions after a default system message.
    Plain,
    /// Bare puzzle statement for a model with code execution.
    ToolAugmented,
};

std::string_view to_string(PromptMode mode);
/// "plain" or "tool"; throws std::invalid_argument.
PromptMode parse_prompt_mode(std::string_view name);

inline constexpr std::string_view kDefaultSystemMessage = "You are a helpful assistant.";

/// Plain: system message then one user message. ToolAugmented: one user
/// message with no further instructions.
std::vector<ChatMessage> build_prompt(const AnalogyProblem& problem, const PermutedAlphabet& alphabet,
                                      PromptMode mode);

} // namespace counterfax
