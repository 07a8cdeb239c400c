#include "counterfax/model.hpp"

#include "counterfax/problem_io.hpp"

#include "httplib.h"

#include <cstdlib>
#include <random>
#include <sstream>

namespace counterfax {

ModelEndpoint ModelEndpoint::for_mode(PromptMode mode)
{
    ModelEndpoint e;
    e.mode = mode;
    e.temperature = mode == PromptMode::Plain ? 0.0 : 1.0;
    e.top_p = e.temperature;
    return e;
}

nlohmann::ordered_json endpoint_to_json(const ModelEndpoint& e)
{
    return {{"base_url", e.base_url},       {"engine", e.engine},
            {"mode", to_string(e.mode)},    {"temperature", e.temperature},
            {"top_p", e.top_p},             {"auth_env", e.auth_env},
            {"max_retries", e.max_retries}, {"parallelism", e.parallelism},
            {"requests_per_minute", e.requests_per_minute}};
}

HttpChatModel::HttpChatModel(ModelEndpoint endpoint) : _endpoint(std::move(endpoint))
{
    const char* key = std::getenv(_endpoint.auth_env.c_str());
    if (!key || !*key)
        throw AuthError("environment variable " + _endpoint.auth_env + " is not set");
    _key = key;

    const auto& url = _endpoint.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("base URL '" + url + "' has no scheme");
    auto path_start = url.find('/', scheme_end + 3);
    _origin = url.substr(0, path_start);
    _path = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!_path.empty() && _path.back() == '/')
        _path.pop_back();
    _path += "/chat/completions";
}

nlohmann::json HttpChatModel::request_body(const std::vector<ChatMessage>& messages) const
{
    nlohmann::json body;
    body["model"] = _endpoint.engine;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = _endpoint.temperature;
    body["top_p"] = _endpoint.top_p;
    if (_endpoint.mode == PromptMode::ToolAugmented)
        body["tools"] = nlohmann::json::array({{{"type", "code_interpreter"}}});
    return body;
}

std::string HttpChatModel::complete(const ChatRequest& request)
{
    httplib::Client client(_origin);
    const auto timeout = std::chrono::duration<double>(_endpoint.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_bearer_token_auth(_key);

    auto res = client.Post(_path, request_body(request.messages).dump(), "application/json");
    if (!res)
        throw TransportError(_origin + _path + ": " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
        throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
    if (res->status != 200)
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));

    try {
        auto j = nlohmann::json::parse(res->body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed completion response: ") + e.what());
    }
}

MockPolicy parse_mock_policy(std::string_view spec)
{
    auto colon = spec.find(':');
    std::string name(spec.substr(0, colon));
    std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
    for (auto& c : name)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto need_arg = [&] {
        if (arg.empty())
            throw std::invalid_argument("mock policy '" + name + "' needs an argument");
    };
    try {
        if (name == "oracle" && arg.empty())
            return MockPolicy::oracle();
        if (name == "noisy") {
            need_arg();
            std::size_t used = 0;
            double p = std::stod(arg, &used);
            if (used != arg.size() || p < 0 || p > 1)
                throw std::invalid_argument("noisy probability must lie in [0, 1]");
            return MockPolicy::noisy(p);
        }
        if (name == "alternative") {
            need_arg();
            for (auto kind : {RuleKind::IntendedTransform, RuleKind::PositionalSwap,
                              RuleKind::PositionalReplaceShift, RuleKind::PositionalDelete,
                              RuleKind::AppendShift, RuleKind::LiteralCopy})
                if (to_string(kind) == arg)
                    return MockPolicy::alternative(kind);
            throw std::invalid_argument("unknown rule kind '" + arg + "'");
        }
        if (name == "refuse") {
            need_arg();
            std::size_t used = 0;
            int n = std::stoi(arg, &used);
            if (used != arg.size() || n < 0)
                throw std::invalid_argument("refusal count must be a non-negative integer");
            return MockPolicy::refuse(n);
        }
    } catch (const std::logic_error& e) {
        throw std::invalid_argument("bad mock policy '" + std::string(spec) + "': " + e.what());
    }
    throw std::invalid_argument("unknown mock policy '" + std::string(spec) +
                                "' (expected oracle, noisy:P, alternative:RULEKIND or refuse:N)");
}

std::string to_string(const MockPolicy& policy)
{
    switch (policy.kind) {
    case MockPolicy::Kind::Oracle: return "oracle";
    case MockPolicy::Kind::Noisy: {
        std::ostringstream out;
        out << "noisy:" << policy.p;
        return out.str();
    }
    case MockPolicy::Kind::AlternativeRule: return "alternative:" + std::string(to_string(policy.rule));
    case MockPolicy::Kind::RefuseN: return "refuse:" + std::to_string(policy.refusals);
    }
    return "?";
}

namespace {

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
        h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

} // namespace

MockModel::MockModel(MockPolicy policy, const std::vector<AnalogyProblem>& problems,
                     AlphabetRegistry alphabets, std::uint64_t seed)
  : _policy(policy), _alphabets(std::move(alphabets)), _seed(seed)
{
    for (const auto& p : problems) {
        if (!p.answer)
            throw std::invalid_argument("mock model needs answers; problem " + p.id + " has none");
        _problems.emplace(p.id, p);
    }
}

LetterString MockModel::alternative_answer(const AnalogyProblem& problem) const
{
    const auto& alpha = _alphabets.get(problem.alphabet_id);
    for (const auto& rule : induce_rules(alpha, problem.source_a, problem.source_b)) {
        if (rule.kind != _policy.rule || rule.standard_alphabet)
            continue;
        if (auto out = apply_rule(rule, alpha, problem.target_a))
            return *out;
    }
    return *problem.answer;
}

std::string MockModel::complete(const ChatRequest& request)
{
    auto it = _problems.find(request.problem_id);
    if (it == _problems.end())
        throw TransportError("mock model has no problem '" + request.problem_id + "'");
    const auto& problem = it->second;
    const auto& answer = *problem.answer;

    switch (_policy.kind) {
    case MockPolicy::Kind::Oracle: return answer.bracketed();
    case MockPolicy::Kind::RefuseN:
        return request.attempt < _policy.refusals ? std::string(kMockRefusal) : answer.bracketed();
    case MockPolicy::Kind::AlternativeRule: return alternative_answer(problem).bracketed();
    case MockPolicy::Kind::Noisy: {
        std::mt19937_64 rng(mix(_seed ^ mix(fnv1a(problem.id)) ^ mix(static_cast<std::uint64_t>(request.attempt))));
        if (std::bernoulli_distribution(_policy.p)(rng))
            return answer.bracketed();
        std::uniform_int_distribution<int> letter(0, 25);
        std::string s;
        do {
            s.clear();
            for (std::size_t i = 0; i < answer.size(); ++i)
                s += static_cast<char>('a' + letter(rng));
        } while (s == answer.str());
        return LetterString(s).bracketed();
    }
    }
    return answer.bracketed();
}

} // namespace counterfax
