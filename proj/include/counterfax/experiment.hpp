// experiment.hpp -- backend for the human behavioural experiment: sessions,
// problem assignment, free responses and the attention check

#pragma once

#include "counterfax/alphabet.hpp"
#include "counterfax/classifier.hpp"
#include "counterfax/problem.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace counterfax {

/// One attention-check list; `vegetable` must occur in `items` exactly once.
struct AttentionItem {
    std::vector<std::string> items;
    std::string vegetable;
};

std::vector<AttentionItem> default_attention_bank();
/// JSON array of {"items": [...], "vegetable": "..."}; validated.
std::vector<AttentionItem> load_attention_bank(const std::filesystem::path& path);
/// Throws std::invalid_argument for an empty bank, duplicate items or a
/// vegetable that is not listed exactly once.
void validate_attention_bank(const std::vector<AttentionItem>& bank);

struct ExperimentConfig {
    /// The deployment's condition; only problems with this interval are used.
    int interval = 1;
    std::uint64_t seed = 0;
    /// Problems per transformation type in each session.
    int per_type = 1;
    /// Classifier-compatible response records, one line per answer.
    std::filesystem::path responses_path = "responses.jsonl";
    /// Append-only session event log, replayed at start-up.
    std::filesystem::path events_path = "sessions.jsonl";
    std::vector<AttentionItem> attention_bank = default_attention_bank();
};

/// HTTP-independent result: status code and JSON body.
struct ApiResult {
    int status = 200;
    nlohmann::ordered_json body;
};

class ExperimentService {
public:
    /// Keeps only problems of the configured interval; throws
    /// std::invalid_argument if any transformation type has fewer than
    /// `per_type` of them. Replays existing events.
    ExperimentService(std::vector<AnalogyProblem> problems, AlphabetRegistry alphabets, ExperimentConfig config);

    ApiResult create_session();
    ApiResult next(const std::string& session);
    /// Body: {"problem_id": "...", "response": "...", optional "rt_ms"}.
    ApiResult respond(const std::string& session, const nlohmann::json& body);
    /// Body: {"choice": "..."}.
    ApiResult attention(const std::string& session, const nlohmann::json& body);
    ApiResult complete(const std::string& session);
    /// The instruction page's example problem.
    static nlohmann::ordered_json instructions();

    /// Problem ids in presentation order; empty for an unknown session.
    std::vector<std::string> assignment(const std::string& session) const;
    std::size_t session_count() const;

private:
    struct Session {
        std::string id;
        std::vector<std::string> problems;
        std::size_t answered = 0;
        std::size_t attention_index = 0;
        std::optional<bool> attention_passed;
        std::string attention_choice;
    };

    Session* find(const std::string& id);
    void replay();
    void log(const nlohmann::ordered_json& event);
    nlohmann::ordered_json public_problem(const AnalogyProblem& p, std::size_t index, std::size_t total) const;
    std::string completion_code(const std::string& session) const;

    std::map<std::string, AnalogyProblem> _problems;
    std::map<TransformationType, std::vector<std::string>> _pool;
    AlphabetRegistry _alphabets;
    ExperimentConfig _config;
    std::map<std::string, Session> _sessions;
    int _counter = 0;
    mutable std::mutex _mutex;
};

/// Binds the service to HTTP routes and optionally hosts a static directory
/// at "/".
class ExperimentServer {
public:
    ExperimentServer(ExperimentService& service, std::filesystem::path static_dir = {});
    ~ExperimentServer();

    /// Returns the bound port (useful with port 0); throws on failure.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();
    void wait_until_ready();

private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
};

} // namespace counterfax
