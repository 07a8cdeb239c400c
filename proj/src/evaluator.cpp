#include "counterfax/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <exception>
#include <thread>

namespace counterfax {

RateLimiter::RateLimiter(double requests_per_minute, int burst)
  : _per_second(requests_per_minute / 60.0),
    _capacity(std::max(1, burst)),
    _tokens(_capacity),
    _last(Clock::now())
{
}

void RateLimiter::acquire()
{
    if (_per_second <= 0)
        return;
    std::unique_lock lock(_mutex);
    for (;;) {
        auto now = Clock::now();
        _tokens = std::min(_capacity, _tokens + std::chrono::duration<double>(now - _last).count() * _per_second);
        _last = now;
        if (_tokens >= 1.0) {
            _tokens -= 1.0;
            return;
        }
        // holding the lock while sleeping keeps waiters in line
        std::this_thread::sleep_for(std::chrono::duration<double>((1.0 - _tokens) / _per_second));
    }
}

int EvalRun::failures() const
{
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.error; }));
}

std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

ResponseRecord query(const AnalogyProblem& problem, const PermutedAlphabet& alphabet, ChatModel& model,
                     const ModelEndpoint& endpoint, const std::string& agent_id, RateLimiter& limiter)
{
    ResponseRecord r;
    r.problem_id = problem.id;
    r.agent_id = agent_id;
    r.agent_class = "model";
    const auto prompt = build_prompt(problem, alphabet, endpoint.mode);
    r.transcript = prompt;

    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
        limiter.acquire();
        std::string reply;
        try {
            reply = model.complete({problem.id, prompt, attempt});
        } catch (const TransportError& e) {
            r.error = e.what();
            return r;
        }
        r.transcript.push_back({"assistant", reply});
        r.raw_text = std::move(reply);
        r.retries = attempt;
        if (parse_answer(r.raw_text))
            break;
    }
    return r;
}

} // namespace

EvalRun evaluate(const std::vector<AnalogyProblem>& problems, const AlphabetRegistry& alphabets,
                 ChatModel& model, const ModelEndpoint& endpoint, EvalOptions options)
{
    EvalRun run;
    run.run_id = options.run_id;
    run.endpoint = endpoint;
    run.agent_id = options.agent_id.empty() ? endpoint.engine : options.agent_id;
    run.problem_set = options.problem_set;
    run.started = utc_timestamp();

    // resolve alphabets up front so a bad id fails before any request
    std::vector<const PermutedAlphabet*> alpha;
    alpha.reserve(problems.size());
    for (const auto& p : problems)
        alpha.push_back(&alphabets.get(p.alphabet_id));

    RateLimiter limiter(endpoint.requests_per_minute, std::max(1, endpoint.parallelism));
    std::vector<ResponseRecord> records(problems.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr auth_failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            if (abort)
                return;
            std::size_t i = next++;
            if (i >= problems.size())
                return;
            try {
                records[i] = query(problems[i], *alpha[i], model, endpoint, run.agent_id, limiter);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!auth_failure)
                    auth_failure = std::current_exception();
                abort = true;
                return;
            }
        }
    };

    const int threads = std::clamp(endpoint.parallelism, 1, static_cast<int>(std::max<std::size_t>(1, problems.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (auth_failure)
        std::rethrow_exception(auth_failure);

    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.problem_id < b.problem_id; });
    run.records = std::move(records);
    run.finished = utc_timestamp();
    return run;
}

nlohmann::ordered_json run_metadata(const EvalRun& run)
{
    nlohmann::ordered_json j;
    j["run_id"] = run.run_id;
    j["agent_id"] = run.agent_id;
    j["problem_set"] = run.problem_set;
    j["endpoint"] = endpoint_to_json(run.endpoint);
    j["started"] = run.started;
    j["finished"] = run.finished;
    j["records"] = run.records.size();
    j["failures"] = run.failures();
    return j;
}

} // namespace counterfax
