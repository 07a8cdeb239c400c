#include "counterfax/experiment.hpp"

#include "counterfax/errors.hpp"
#include "counterfax/evaluator.hpp"
#include "counterfax/io_util.hpp"
#include "counterfax/problem_io.hpp"
#include "counterfax/records_io.hpp"

#include "httplib.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

namespace counterfax {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<AttentionItem> default_attention_bank()
{
    return {
        {{"hammer", "carrot", "violin", "bicycle"}, "carrot"},
        {{"spinach", "trumpet", "sofa", "kettle"}, "spinach"},
        {{"lamp", "shirt", "broccoli", "train"}, "broccoli"},
        {{"guitar", "pencil", "umbrella", "potato"}, "potato"},
        {{"onion", "scissors", "bus", "candle"}, "onion"},
    };
}

void validate_attention_bank(const std::vector<AttentionItem>& bank)
{
    if (bank.empty())
        throw std::invalid_argument("attention bank is empty");
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto& entry = bank[i];
        std::set<std::string> unique(entry.items.begin(), entry.items.end());
        if (unique.size() != entry.items.size() || entry.items.size() < 2)
            throw std::invalid_argument("attention list " + std::to_string(i) + " needs at least two distinct items");
        if (std::count(entry.items.begin(), entry.items.end(), entry.vegetable) != 1)
            throw std::invalid_argument("attention list " + std::to_string(i) + " does not contain '" +
                                        entry.vegetable + "' exactly once");
    }
}

std::vector<AttentionItem> load_attention_bank(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<AttentionItem> bank;
    try {
        for (const auto& entry : json::parse(in))
            bank.push_back({entry.at("items").get<std::vector<std::string>>(), entry.at("vegetable").get<std::string>()});
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    validate_attention_bank(bank);
    return bank;
}

namespace {

std::mt19937_64 session_rng(std::uint64_t seed, int number)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(number), 0x5e55u};
    return std::mt19937_64(seq);
}

std::string participant_id(int number)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%04d", number);
    return buf;
}

ApiResult error(int status, const std::string& message)
{
    return {status, {{"error", message}}};
}

} // namespace

ExperimentService::ExperimentService(std::vector<AnalogyProblem> problems, AlphabetRegistry alphabets,
                                     ExperimentConfig config)
  : _alphabets(std::move(alphabets)), _config(std::move(config))
{
    IntervalSize interval(_config.interval);
    validate_attention_bank(_config.attention_bank);
    if (_config.per_type < 1)
        throw std::invalid_argument("per_type must be at least 1");
    for (auto& p : problems) {
        if (p.interval != interval)
            continue;
        _alphabets.get(p.alphabet_id);
        _pool[p.transformation].push_back(p.id);
        _problems.emplace(p.id, std::move(p));
    }
    for (auto type : kAllTransformations)
        if (static_cast<int>(_pool[type].size()) < _config.per_type)
            throw std::invalid_argument("problem set has too few " + std::string(to_string(type)) +
                                        " problems at interval " + std::to_string(_config.interval));
    replay();
}

void ExperimentService::replay()
{
    if (!std::filesystem::exists(_config.events_path))
        return;
    auto lines = read_lines(_config.events_path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty())
            continue;
        json e;
        try {
            e = json::parse(lines[n]);
        } catch (const json::exception&) {
            // a torn final line from a crash is dropped; anything earlier is corruption
            if (n + 1 == lines.size())
                break;
            throw ParseError(_config.events_path.string(), static_cast<int>(n + 1), "malformed event");
        }
        const auto type = e.at("event").get<std::string>();
        const auto id = e.at("session").get<std::string>();
        if (type == "created") {
            Session s;
            s.id = id;
            s.problems = e.at("problems").get<std::vector<std::string>>();
            s.attention_index = e.at("attention_list").get<std::size_t>();
            _sessions[id] = std::move(s);
            _counter = std::max(_counter, e.at("number").get<int>());
        } else if (auto* s = find(id)) {
            if (type == "response")
                ++s->answered;
            else if (type == "attention") {
                s->attention_passed = e.at("passed").get<bool>();
                s->attention_choice = e.at("choice").get<std::string>();
            }
        }
    }
}

void ExperimentService::log(const ordered_json& event)
{
    append_line(_config.events_path, event.dump());
}

ExperimentService::Session* ExperimentService::find(const std::string& id)
{
    auto it = _sessions.find(id);
    return it == _sessions.end() ? nullptr : &it->second;
}

ordered_json ExperimentService::instructions()
{
    return {{"text", "In each problem, work out how the first string of letters was changed into the second, "
                     "then apply the same change to the third string and type your answer."},
            {"example", {{"source_a", "[a a a]"}, {"source_b", "[b b b]"}, {"target_a", "[c c c]"}}}};
}

ApiResult ExperimentService::create_session()
{
    std::lock_guard lock(_mutex);
    const int number = ++_counter;
    auto rng = session_rng(_config.seed, number);
    Session s;
    s.id = participant_id(number);
    for (auto type : kAllTransformations) {
        std::vector<std::string> picked;
        std::sample(_pool[type].begin(), _pool[type].end(), std::back_inserter(picked), _config.per_type, rng);
        s.problems.insert(s.problems.end(), picked.begin(), picked.end());
    }
    std::shuffle(s.problems.begin(), s.problems.end(), rng);
    s.attention_index = std::uniform_int_distribution<std::size_t>(0, _config.attention_bank.size() - 1)(rng);

    log({{"event", "created"},
         {"session", s.id},
         {"number", number},
         {"interval", _config.interval},
         {"problems", s.problems},
         {"attention_list", s.attention_index},
         {"time", utc_timestamp()}});
    ApiResult r{200,
                {{"session", s.id}, {"interval", _config.interval}, {"problems", s.problems.size()},
                 {"instructions", instructions()}}};
    _sessions[s.id] = std::move(s);
    return r;
}

ordered_json ExperimentService::public_problem(const AnalogyProblem& p, std::size_t index, std::size_t total) const
{
    // deliberately built field by field: answer and meta never leave the server
    return {{"index", index + 1},
            {"total", total},
            {"problem_id", p.id},
            {"alphabet", letters_to_json(LetterString(_alphabets.get(p.alphabet_id).letters()))},
            {"source_a", letters_to_json(p.source_a)},
            {"source_b", letters_to_json(p.source_b)},
            {"target_a", letters_to_json(p.target_a)}};
}

ApiResult ExperimentService::next(const std::string& session)
{
    std::lock_guard lock(_mutex);
    auto* s = find(session);
    if (!s)
        return error(404, "unknown session " + session);
    if (s->answered < s->problems.size()) {
        const auto& p = _problems.at(s->problems[s->answered]);
        return {200, {{"stage", "problem"}, {"problem", public_problem(p, s->answered, s->problems.size())}}};
    }
    if (!s->attention_passed)
        return {200, {{"stage", "attention"},
                      {"prompt", "Which of these items is a vegetable?"},
                      {"items", _config.attention_bank[s->attention_index].items}}};
    return {200, {{"stage", "complete"}}};
}

ApiResult ExperimentService::respond(const std::string& session, const json& body)
{
    if (!body.is_object() || !body.contains("problem_id") || !body["problem_id"].is_string() ||
        !body.contains("response") || !body["response"].is_string() ||
        (body.contains("rt_ms") && !body["rt_ms"].is_number()))
        return error(400, "expected {\"problem_id\": string, \"response\": string, \"rt_ms\"?: number}");
    std::lock_guard lock(_mutex);
    auto* s = find(session);
    if (!s)
        return error(404, "unknown session " + session);
    if (s->answered >= s->problems.size())
        return error(409, "all problems already answered");
    const auto expected = s->problems[s->answered];
    if (body["problem_id"] != expected)
        return error(409, "expected a response to " + expected);

    const auto now = utc_timestamp();
    ResponseRecord r;
    r.problem_id = expected;
    r.agent_id = s->id;
    r.agent_class = "human";
    r.raw_text = body["response"].get<std::string>();
    r.extra["trial"] = s->answered + 1;
    r.extra["interval"] = _config.interval;
    r.extra["received_at"] = now;
    if (body.contains("rt_ms"))
        r.extra["rt_ms"] = body["rt_ms"];
    append_line(_config.responses_path, response_to_json(r).dump());
    log({{"event", "response"}, {"session", s->id}, {"problem_id", expected}, {"time", now}});
    ++s->answered;
    return {200, {{"accepted", true}, {"remaining", s->problems.size() - s->answered}}};
}

ApiResult ExperimentService::attention(const std::string& session, const json& body)
{
    if (!body.is_object() || !body.contains("choice") || !body["choice"].is_string())
        return error(400, "expected {\"choice\": string}");
    std::lock_guard lock(_mutex);
    auto* s = find(session);
    if (!s)
        return error(404, "unknown session " + session);
    if (s->answered < s->problems.size())
        return error(409, "attention check comes after the problems");
    if (s->attention_passed)
        return error(409, "attention check already answered");
    const auto& entry = _config.attention_bank[s->attention_index];
    const auto choice = body["choice"].get<std::string>();
    if (std::find(entry.items.begin(), entry.items.end(), choice) == entry.items.end())
        return error(400, "'" + choice + "' is not one of the listed items");
    s->attention_passed = choice == entry.vegetable;
    s->attention_choice = choice;
    log({{"event", "attention"},
         {"session", s->id},
         {"choice", choice},
         {"passed", *s->attention_passed},
         {"time", utc_timestamp()}});
    return {200, {{"recorded", true}}};
}

std::string ExperimentService::completion_code(const std::string& session) const
{
    std::uint64_t h = 0xcbf29ce484222325ULL ^ _config.seed;
    for (unsigned char c : session)
        h = (h ^ c) * 0x100000001b3ULL;
    char buf[24];
    std::snprintf(buf, sizeof buf, "CFX-%08llX", static_cast<unsigned long long>(h & 0xffffffffULL));
    return buf;
}

ApiResult ExperimentService::complete(const std::string& session)
{
    std::lock_guard lock(_mutex);
    auto* s = find(session);
    if (!s)
        return error(404, "unknown session " + session);
    if (s->answered < s->problems.size() || !s->attention_passed)
        return error(409, "session is not finished");
    return {200, {{"completed", true}, {"session", s->id}, {"code", completion_code(s->id)}}};
}

std::vector<std::string> ExperimentService::assignment(const std::string& session) const
{
    std::lock_guard lock(_mutex);
    auto it = _sessions.find(session);
    return it == _sessions.end() ? std::vector<std::string>{} : it->second.problems;
}

std::size_t ExperimentService::session_count() const
{
    std::lock_guard lock(_mutex);
    return _sessions.size();
}

struct ExperimentServer::Impl {
    httplib::Server server;
};

ExperimentServer::ExperimentServer(ExperimentService& service, std::filesystem::path static_dir)
  : _impl(std::make_unique<Impl>())
{
    auto& srv = _impl->server;
    auto send = [](httplib::Response& res, const ApiResult& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse = [](const httplib::Request& req) {
        return json::parse(req.body, nullptr, false);
    };
    srv.Post("/session", [&service, send](const httplib::Request&, httplib::Response& res) {
        send(res, service.create_session());
    });
    srv.Get("/instructions", [send](const httplib::Request&, httplib::Response& res) {
        send(res, {200, ExperimentService::instructions()});
    });
    srv.Get(R"(/session/([^/]+)/next)", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.next(req.matches[1]));
    });
    srv.Post(R"(/session/([^/]+)/response)", [&service, send, parse](const httplib::Request& req, httplib::Response& res) {
        send(res, service.respond(req.matches[1], parse(req)));
    });
    srv.Post(R"(/session/([^/]+)/attention)", [&service, send, parse](const httplib::Request& req, httplib::Response& res) {
        send(res, service.attention(req.matches[1], parse(req)));
    });
    srv.Get(R"(/session/([^/]+)/complete)", [&service, send](const httplib::Request& req, httplib::Response& res) {
        send(res, service.complete(req.matches[1]));
    });
    if (!static_dir.empty() && !srv.set_mount_point("/", static_dir.string()))
        throw std::invalid_argument("static directory " + static_dir.string() + " does not exist");
}

ExperimentServer::~ExperimentServer() = default;

int ExperimentServer::bind(const std::string& host, int port)
{
    int bound = port == 0 ? _impl->server.bind_to_any_port(host) : (_impl->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void ExperimentServer::listen()
{
    _impl->server.listen_after_bind();
}

void ExperimentServer::stop()
{
    _impl->server.stop();
}

void ExperimentServer::wait_until_ready()
{
    _impl->server.wait_until_ready();
}

} // namespace counterfax
