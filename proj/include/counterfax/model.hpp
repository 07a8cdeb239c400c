// model.hpp -- chat model endpoints: an OpenAI-compatible HTTP client and
// offline mock policies

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/classifier.hpp"
#include "counterfax/prompt.hpp"
#include "counterfax/rules.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace counterfax {

/// Request could not be completed; recorded per problem.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Credentials missing or rejected; aborts a run.
class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelEndpoint {
    std::string base_url = "https://api.openai.com/v1";
    std::string engine = "gpt-4-0125-preview";
    PromptMode mode = PromptMode::Plain;
    double temperature = 0.0;
    double top_p = 0.0;
    /// Name of the environment variable holding the API key.
    std::string auth_env = "OPENAI_API_KEY";
    int max_retries = 5;
    int parallelism = 1;
    /// 0 disables rate limiting.
    double requests_per_minute = 30.0;
    double timeout_seconds = 120.0;

    /// Endpoint with the sampling settings recorded for `mode`: 0/0 for
    /// Plain, the defaults 1/1 for ToolAugmented.
    static ModelEndpoint for_mode(PromptMode mode);
};

nlohmann::ordered_json endpoint_to_json(const ModelEndpoint& endpoint);

struct ChatRequest {
    std::string problem_id;
    std::vector<ChatMessage> messages;
    /// 0 for the first request, n for the n-th regeneration.
    int attempt = 0;
};

class ChatModel {
public:
    virtual ~ChatModel() = default;
    /// The assistant's reply text. Throws TransportError or AuthError.
    /// Must be safe to call concurrently.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// POST {base_url}/chat/completions with a bearer key read from
/// endpoint.auth_env. ToolAugmented adds a code_interpreter tool entry.
class HttpChatModel : public ChatModel {
public:
    /// Throws AuthError if the key variable is unset or empty.
    explicit HttpChatModel(ModelEndpoint endpoint);
    std::string complete(const ChatRequest& request) override;

    /// Request body sent for `messages`; exposed for tests.
    nlohmann::json request_body(const std::vector<ChatMessage>& messages) const;

private:
    ModelEndpoint _endpoint;
    std::string _key;
    std::string _origin;
    std::string _path;
};

struct MockPolicy {
    enum class Kind { Oracle, Noisy, AlternativeRule, RefuseN };
    Kind kind = Kind::Oracle;
    /// Noisy: probability of answering correctly.
    double p = 1.0;
    /// AlternativeRule: the catalog rule kind to apply.
    RuleKind rule = RuleKind::PositionalSwap;
    /// RefuseN: refusals before answering.
    int refusals = 0;

    static MockPolicy oracle() { return {}; }
    static MockPolicy noisy(double p) { return {Kind::Noisy, p, {}, 0}; }
    static MockPolicy alternative(RuleKind rule) { return {Kind::AlternativeRule, 1.0, rule, 0}; }
    static MockPolicy refuse(int n) { return {Kind::RefuseN, 1.0, {}, n}; }
};

/// "oracle", "noisy:0.6", "alternative:PositionalSwap", "refuse:2";
/// throws std::invalid_argument.
MockPolicy parse_mock_policy(std::string_view spec);
std::string to_string(const MockPolicy& policy);

inline constexpr std::string_view kMockRefusal =
    "There is too much uncertainty about the underlying pattern to give a definite answer.";

/// Offline model answering from the problem set. Replies depend only on
/// (seed, problem id, attempt).
class MockModel : public ChatModel {
public:
    MockModel(MockPolicy policy, const std::vector<AnalogyProblem>& problems, AlphabetRegistry alphabets,
              std::uint64_t seed = 0);
    std::string complete(const ChatRequest& request) override;

private:
    LetterString alternative_answer(const AnalogyProblem& problem) const;

    MockPolicy _policy;
    std::map<std::string, AnalogyProblem> _problems;
    AlphabetRegistry _alphabets;
    std::uint64_t _seed;
};

} // namespace counterfax
