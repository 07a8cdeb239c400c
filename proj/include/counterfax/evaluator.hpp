// evaluator.hpp -- runs a chat model over a problem set

#pragma once

#include "counterfax/model.hpp"

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

namespace counterfax {

/// Token bucket limiting requests per minute. Thread-safe.
class RateLimiter {
public:
    /// rate <= 0 disables limiting. `burst` tokens are available at start.
    explicit RateLimiter(double requests_per_minute, int burst = 1);
    /// Blocks until a token is available.
    void acquire();

private:
    using Clock = std::chrono::steady_clock;
    double _per_second;
    double _capacity;
    double _tokens;
    Clock::time_point _last;
    std::mutex _mutex;
};

struct EvalRun {
    std::string run_id;
    ModelEndpoint endpoint;
    /// Model label stored as agent_id on every record.
    std::string agent_id;
    /// Where the problems came from.
    std::string problem_set;
    /// ISO-8601 UTC.
    std::string started;
    std::string finished;
    /// One per problem, sorted by problem_id.
    std::vector<ResponseRecord> records;

    int failures() const;
};

struct EvalOptions {
    std::string run_id;
    std::string problem_set;
    /// Defaults to endpoint.engine.
    std::string agent_id;
};

/// Prompts the model once per problem, regenerating up to
/// endpoint.max_retries times while the reply has no parseable answer.
/// Transport failures are stored in the record and the run continues; an
/// AuthError stops all workers and is rethrown.
EvalRun evaluate(const std::vector<AnalogyProblem>& problems, const AlphabetRegistry& alphabets,
                 ChatModel& model, const ModelEndpoint& endpoint, EvalOptions options = {});

nlohmann::ordered_json run_metadata(const EvalRun& run);

std::string utc_timestamp();

} // namespace counterfax
