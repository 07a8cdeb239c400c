// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
// gated criterion fails.

#include "counterfax/analysis.hpp"
#include "counterfax/cli.hpp"
#include "counterfax/evaluator.hpp"
#include "counterfax/experiment.hpp"
#include "counterfax/generator.hpp"
#include "counterfax/io_util.hpp"
#include "counterfax/problem_io.hpp"
#include "counterfax/records_io.hpp"
#include "counterfax/stats.hpp"

#include "invariants.hpp"
#include "oracles.hpp"

#include "httplib.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

using namespace counterfax;
namespace fs = std::filesystem;
using T = TransformationType;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Failure(what);
}

int failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body)
{
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
        o.detail = body();
        o.pass = true;
    } catch (const std::exception& e) {
        o.detail = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass)
        ++failures;
    std::printf("%s  %-28s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

SideParams dup_at(int p)
{
    SideParams s;
    s.modified_position = p;
    return s;
}
SideParams wrong_at(int p, char c)
{
    SideParams s;
    s.modified_position = p;
    s.distractor_letter = c;
    return s;
}
SideParams swapped(int p, int q)
{
    SideParams s;
    s.swap_pair = std::pair{p, q};
    return s;
}

std::string worked_examples()
{
    struct Case {
        T type;
        int interval;
        int start;
        SideParams side;
        const char* a;
        const char* b;
    };
    const std::vector<Case> cases{
        {T::Successor, 1, 0, {}, "xylk", "xylw"},
        {T::Predecessor, 1, 1, {}, "ylkw", "xlkw"},
        {T::RemoveRedundant, 1, 0, dup_at(1), "xyylkw", "xylkw"},
        {T::FixSequence, 1, 0, wrong_at(3, 'g'), "xylgw", "xylkw"},
        {T::Sort, 1, 0, swapped(1, 3), "xklyw", "xylkw"},
        {T::ExtendSequence, 1, 0, {}, "xylk", "xylkw"},
        {T::ExtendSequence, 2, 0, {}, "xylk", "xylkb"},
        {T::Successor, 2, 0, {}, "xylk", "xylb"},
        {T::Predecessor, 2, 2, {}, "lkwb", "xkwb"},
        {T::RemoveRedundant, 2, 0, dup_at(1), "xllwft", "xlwft"},
        {T::FixSequence, 2, 0, wrong_at(3, 'g'), "xlwgt", "xlwft"},
        {T::Sort, 2, 0, swapped(1, 3), "xfwlt", "xlwft"},
    };
    auto start = std::chrono::steady_clock::now();
    for (const auto& c : cases) {
        auto [a, b] = build_pair(hw_alphabet(), c.type, IntervalSize(c.interval), c.start, c.side);
        require(a == LetterString(c.a) && b == LetterString(c.b),
                std::string(to_string(c.type)) + "/" + std::to_string(c.interval) + ": got " + a.bracketed() +
                    " -> " + b.bracketed());
    }
    double secs = elapsed_since(start);
    require(secs < 1.0, "took " + fmt("%.3f", secs) + " s");
    return std::to_string(cases.size()) + "/12 pairs verbatim";
}

AnalogyProblem sort_example()
{
    GenerationMeta meta;
    meta.source_start = 0;
    meta.target_start = 10;
    meta.base_step = 1;
    meta.source.swap_pair = std::pair{1, 3};
    meta.target.swap_pair = std::pair{0, 4};
    return build_problem(hw_alphabet(), T::Sort, IntervalSize(1), meta, "sort-example");
}

std::string oracle_fidelity()
{
    const auto& hw = hw_alphabet();
    AnalogyProblem p;
    p.alphabet_id = "hw";
    p.transformation = T::Successor;
    p.interval = IntervalSize(1);
    p.source_a = LetterString("xylk");
    p.source_b = LetterString("xylw");
    p.target_a = LetterString("jrqa");
    require(solve(p, hw) == LetterString("jrqh"), "successor/1 gave " + solve(p, hw).bracketed());
    p.interval = IntervalSize(2);
    p.source_a = LetterString("qahv");
    p.source_b = LetterString("qahm");
    p.target_a = LetterString("kwbf");
    require(solve(p, hw) == LetterString("kwbt"), "successor/2 gave " + solve(p, hw).bracketed());
    auto s = sort_example();
    require(s.source_a == LetterString("xklyw") && s.target_a == LetterString("hrqaj"),
            "sort example built as " + s.source_a.bracketed() + " / " + s.target_a.bracketed());
    require(solve(s, hw) == LetterString("jrqah"), "sort gave " + solve(s, hw).bracketed());
    return "[j r q h], [k w b t], [j r q a h]";
}

// Responses on distinct problems of one cell: `valid` valid-alternative
// errors, the rest plain errors.
void script_cell(const std::vector<AnalogyProblem>& pool, T type, int interval, int valid, int errors,
                 std::vector<ResponseRecord>& out, std::mt19937_64& rng)
{
    const auto& hw = hw_alphabet();
    int made_valid = 0, made_invalid = 0;
    for (const auto& p : pool) {
        if (p.transformation != type || p.interval.value() != interval)
            continue;
        if (made_valid == valid && made_invalid == errors - valid)
            break;
        std::optional<std::string> text;
        if (made_valid < valid) {
            for (const auto& rule : induce_rules(hw, p.source_a, p.source_b)) {
                if (rule.kind == RuleKind::LiteralCopy || rule == Rule::intended(type, interval))
                    continue;
                auto alt = apply_rule(rule, hw, p.target_a);
                if (!alt || alt == p.answer)
                    continue;
                auto v = classify(p, hw, alt);
                if (v.kind == VerdictKind::ValidAlternative && !v.literal_copy_only()) {
                    text = "The answer is " + alt->bracketed();
                    ++made_valid;
                    break;
                }
            }
        }
        if (!text && made_invalid < errors - valid) {
            std::uniform_int_distribution<int> letter(0, 25);
            for (int attempt = 0; attempt < 100 && !text; ++attempt) {
                std::string s;
                for (std::size_t i = 0; i < p.answer->size(); ++i)
                    s += static_cast<char>('a' + letter(rng));
                if (classify(p, hw, LetterString(s)).kind == VerdictKind::Invalid) {
                    text = LetterString(s).bracketed();
                    ++made_invalid;
                }
            }
        }
        if (text) {
            ResponseRecord r;
            r.problem_id = p.id;
            r.agent_id = "scripted";
            r.raw_text = *text;
            out.push_back(std::move(r));
        }
    }
    require(made_valid == valid && made_invalid == errors - valid,
            "could not script " + std::string(to_string(type)) + "/" + std::to_string(interval));
}

std::string classifier_fidelity()
{
    const auto& hw = hw_alphabet();
    auto s = sort_example();
    auto v = classify(s, hw, parse_answer("[h a q r j]"));
    require(v.kind == VerdictKind::ValidAlternative, "[h a q r j] classified " + std::string(to_string(v.kind)));
    require(std::find(v.matches.begin(), v.matches.end(), Rule::swap(1, 3)) != v.matches.end(),
            "PositionalSwap(1,3) not among matches");

    // the reference per-cell counts, reproduced by scripted responses run
    // through the real parser and classifier
    const std::map<std::pair<T, int>, std::pair<int, int>> target{
        {{T::ExtendSequence, 1}, {0, 0}}, {{T::Successor, 1}, {0, 0}},  {{T::Predecessor, 1}, {0, 2}},
        {{T::RemoveRedundant, 1}, {1, 1}}, {{T::FixSequence, 1}, {6, 10}}, {{T::Sort, 1}, {3, 7}},
        {{T::ExtendSequence, 2}, {0, 9}}, {{T::Successor, 2}, {0, 1}},  {{T::Predecessor, 2}, {0, 2}},
        {{T::RemoveRedundant, 2}, {0, 1}}, {{T::FixSequence, 2}, {10, 10}}, {{T::Sort, 2}, {3, 7}},
    };
    auto pool = generate_problem_set(hw, 50, {1, 2}, 2024);
    std::mt19937_64 rng(5);
    std::vector<ResponseRecord> records;
    for (const auto& [key, counts] : target)
        script_cell(pool, key.first, key.second, counts.first, counts.second, records, rng);
    std::map<std::string, const AnalogyProblem*> by_id;
    for (const auto& p : pool)
        by_id[p.id] = &p;
    for (auto& r : records)
        classify(*by_id.at(r.problem_id), hw, r);

    auto table = tabulate_valid_errors(records, pool);
    require(table.valid == 23 && table.errors == 50,
            "tabulated " + std::to_string(table.valid) + "/" + std::to_string(table.errors));
    require(table.overall_text() == "46%", "overall rendered " + table.overall_text());
    for (const auto& [key, counts] : target) {
        auto expect = std::to_string(counts.first) + "\\" + std::to_string(counts.second);
        require(table.cells.at(key).cell() == expect,
                std::string(to_string(key.first)) + "/" + std::to_string(key.second) + " cell " +
                    table.cells.at(key).cell() + " != " + expect);
        auto rendered = table.render(key.second);
        auto row = std::string(display_name(key.first));
        auto at = rendered.find(row);
        require(at != std::string::npos && rendered.find(expect, at) == rendered.find('\n', at) - expect.size(),
                "rendered table row for " + row);
    }
    return "PositionalSwap(1,3) matched; 23/50 = " + table.overall_text() + ", cells e.g. \"" +
           table.cells.at({T::FixSequence, 1}).cell() + "\"";
}

std::string fuzz()
{
    auto start = std::chrono::steady_clock::now();
    std::size_t checked = 0, violations = 0;
    std::string first;
    std::set<std::tuple<std::string, T, int>> cells;
    for (const auto* alpha : {&hw_alphabet(), &alternate_alphabet()}) {
        for (const auto& p : generate_problem_set(*alpha, 417, {1, 2}, 20240501)) {
            auto bad = testing::problem_violations(p, *alpha);
            if (!bad.empty() && first.empty())
                first = p.id + ": " + bad.front();
            violations += !bad.empty();
            cells.insert({alpha->id(), p.transformation, p.interval.value()});
            ++checked;
        }
    }
    double secs = elapsed_since(start);
    require(checked >= 10000, "only " + std::to_string(checked) + " problems");
    require(cells.size() == 24, "covered " + std::to_string(cells.size()) + " of 24 alphabet x cell combinations");
    require(violations == 0, std::to_string(violations) + " violations, first " + first);
    require(secs < 30.0, "took " + fmt("%.1f", secs) + " s");
    return std::to_string(checked) + " problems, 0 violations";
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run(args, out, err);
    if (code != 0)
        throw Failure(args.front() + " exited " + std::to_string(code) + ": " + err.str());
    return code;
}

std::string pipeline_identity()
{
    auto dir = fs::temp_directory_path() / "cfx_acceptance_pipeline";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const char* f) { return (dir / f).string(); };
    cli({"gen", "--alphabet", "hw", "--per-cell", "100", "--intervals", "1,2", "--seed", "7", "--out", p("problems.jsonl")});
    cli({"eval", "--problems", p("problems.jsonl"), "--mode", "mock:ORACLE", "--engine", "oracle", "--out",
         p("responses.jsonl")});
    cli({"score", "--problems", p("problems.jsonl"), "--responses", p("responses.jsonl"), "--out", p("verdicts.jsonl")});
    cli({"stats", "--verdicts", p("verdicts.jsonl"), "--problems", p("problems.jsonl"), "--by-transformation", "--out",
         p("summary.csv"), "--regressions", p("regressions.txt")});
    auto lines = read_lines(p("summary.csv"));
    require(lines.size() == 13, "summary has " + std::to_string(lines.size() - 1) + " rows, expected 12");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> cols;
        std::stringstream ss(lines[i]);
        for (std::string c; std::getline(ss, c, ',');)
            cols.push_back(c);
        require(cols.size() >= 10 && std::stod(cols[5]) == 1.0 && std::stod(cols[9]) == 1.0,
                "row not at 1.0: " + lines[i]);
    }
    auto problems = read_problems(p("problems.jsonl"));
    fs::remove_all(dir);

    // noisy mock: how often does the exact 95% interval around the observed
    // accuracy cover the true rate?
    const int reps = 100;
    int covered = 0;
    for (int seed = 1; seed <= reps; ++seed) {
        MockModel model(MockPolicy::noisy(0.6), problems, {}, static_cast<std::uint64_t>(seed));
        auto e = ModelEndpoint::for_mode(PromptMode::Plain);
        e.requests_per_minute = 0;
        auto run = evaluate(problems, {}, model, e);
        std::map<std::string, const AnalogyProblem*> by_id;
        for (const auto& q : problems)
            by_id[q.id] = &q;
        int correct = 0;
        for (auto& r : run.records)
            correct += classify(*by_id.at(r.problem_id), hw_alphabet(), r).kind == VerdictKind::Correct;
        auto [lo, hi] = stats::binomial_ci(correct, static_cast<int>(problems.size()));
        covered += lo <= 0.6 && 0.6 <= hi;
    }
    require(covered >= 92, "coverage " + std::to_string(covered) + "/100 below 92");
    return "oracle 12/12 cells at 1.0; Noisy(0.6) coverage " + std::to_string(covered) + "/" + std::to_string(reps);
}

std::string stats_oracles()
{
    // saturated 2x2
    Eigen::MatrixXd x(200, 2);
    Eigen::VectorXd y(200);
    for (int i = 0; i < 200; ++i) {
        bool second = i >= 100;
        x(i, 0) = 1;
        x(i, 1) = second;
        y[i] = second ? (i - 100 < 60) : (i < 80);
    }
    auto fit = stats::fit_logistic(x, y, {"(Intercept)", "interval2"});
    const double b0 = std::log(0.8 / 0.2), b1 = std::log(0.6 / 0.4) - std::log(0.8 / 0.2);
    require(std::fabs(fit.coefficients[0] - b0) < 1e-4 && std::fabs(fit.coefficients[1] - b1) < 1e-4,
            "saturated fit " + fmt("%.6f", fit.coefficients[0]) + ", " + fmt("%.6f", fit.coefficients[1]));

    auto [lo, hi] = stats::binomial_ci(5, 10);
    auto [olo, ohi] = testing::cp_oracle(5, 10, 0.05);
    require(std::fabs(lo - olo) < 1e-6 && std::fabs(hi - ohi) < 1e-6, "Clopper-Pearson (5,10) off oracle");

    std::mt19937_64 rng(31337);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 60 + rep * 4, k = 1 + rep % 4;
        Eigen::MatrixXd d(n, k);
        Eigen::VectorXd o(n);
        std::bernoulli_distribution coin(0.5);
        std::normal_distribution<double> noise(0, 1);
        for (int i = 0; i < n; ++i) {
            d(i, 0) = 1;
            double eta = 0.2 + noise(rng);
            for (int j = 1; j < k; ++j) {
                d(i, j) = coin(rng);
                eta += 0.5 * d(i, j);
            }
            o[i] = std::bernoulli_distribution(1 / (1 + std::exp(-eta)))(rng);
        }
        std::vector<std::string> names(k, "t");
        auto f = stats::fit_logistic(d, o, names);
        auto ref = testing::coordinate_ml(d, o);
        for (int j = 0; j < k; ++j)
            worst = std::max(worst, std::fabs(f.coefficients[j] - ref[j]));
    }
    require(worst < 1e-6, "IRLS vs direct ML max |diff| " + fmt("%.2e", worst));

    Eigen::VectorXd all(200);
    all.setOnes();
    bool separated = false;
    try {
        stats::fit_logistic(x, all, {"a", "b"});
    } catch (const stats::SeparationDetected&) {
        separated = true;
    }
    require(separated, "all-correct data did not raise SeparationDetected");
    return "b0 " + fmt("%.4f", fit.coefficients[0]) + ", b1 " + fmt("%.4f", fit.coefficients[1]) +
           "; CP(5,10) (" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "); IRLS max diff " + fmt("%.1e", worst);
}

std::string prompt_golden()
{
    const std::string dir = std::string(COUNTERFAX_TEST_DATA) + "/golden/";
    AnalogyProblem p;
    p.id = "example";
    p.alphabet_id = "hw";
    p.transformation = T::Successor;
    p.interval = IntervalSize(1);
    p.source_a = LetterString("xylk");
    p.source_b = LetterString("xylw");
    p.target_a = LetterString("jrqa");
    auto plain = build_prompt(p, hw_alphabet(), PromptMode::Plain);
    require(plain.size() == 2 && plain[0].content == "You are a helpful assistant.", "plain system message");
    require(plain[1].content == slurp(dir + "plain_successor_1.txt"), "plain prompt differs from golden file");
    p.interval = IntervalSize(2);
    p.source_a = LetterString("qahv");
    p.source_b = LetterString("qahm");
    p.target_a = LetterString("kwbf");
    auto tool = build_prompt(p, hw_alphabet(), PromptMode::ToolAugmented);
    require(tool.size() == 1 && tool[0].content == slurp(dir + "tool_successor_2.txt"),
            "tool prompt differs from golden file");
    return "plain and tool prompts byte-identical";
}

std::string experiment_session()
{
    auto dir = fs::temp_directory_path() / "cfx_acceptance_session";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto problems = generate_problem_set(hw_alphabet(), 10, {1, 2}, 3);
    write_problems(dir / "problems.jsonl", problems);
    ExperimentConfig config;
    config.interval = 1;
    config.responses_path = dir / "responses.jsonl";
    config.events_path = dir / "sessions.jsonl";
    ExperimentService service(problems, {}, config);
    ExperimentServer server(service);
    int port = server.bind("127.0.0.1", 0);
    std::thread t([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    std::vector<std::string> payloads;
    auto get = [&](const std::string& path) {
        auto r = client.Get(path);
        require(static_cast<bool>(r), "GET " + path + " failed");
        payloads.push_back(r->body);
        return nlohmann::json::parse(r->body);
    };
    auto post = [&](const std::string& path, const nlohmann::json& body) {
        auto r = client.Post(path, body.dump(), "application/json");
        require(r && r->status == 200, "POST " + path + " failed");
        payloads.push_back(r->body);
        return nlohmann::json::parse(r->body);
    };
    std::set<T> types;
    std::vector<T> order;
    for (int participant = 0; participant < 3; ++participant) {
        std::string sid = post("/session", nlohmann::json::object())["session"];
        for (;;) {
            auto next = get("/session/" + sid + "/next");
            if (next["stage"] != "problem") {
                std::string veg;
                for (const auto& item : next["items"])
                    for (const auto& entry : default_attention_bank())
                        if (entry.vegetable == item)
                            veg = item;
                post("/session/" + sid + "/attention", {{"choice", veg}});
                break;
            }
            std::string pid = next["problem"]["problem_id"];
            auto it = std::find_if(problems.begin(), problems.end(), [&](const auto& q) { return q.id == pid; });
            if (participant == 0)
                order.push_back(it->transformation);
            types.insert(it->transformation);
            // answer half of them correctly, typed loosely
            std::string text = order.size() % 2 ? it->answer->str() : "j r q";
            post("/session/" + sid + "/response", {{"problem_id", pid}, {"response", text}});
        }
        require(get("/session/" + sid + "/complete")["completed"] == true, "session did not complete");
    }
    server.stop();
    t.join();
    require(types.size() == 6 && order.size() == 6, "session did not cover the six transformation types once each");
    for (const auto& body : payloads)
        require(body.find("\"answer\"") == std::string::npos && body.find("\"meta\"") == std::string::npos,
                "payload leaked answer data: " + body.substr(0, 80));

    auto p = [&](const char* f) { return (dir / f).string(); };
    cli({"score", "--problems", p("problems.jsonl"), "--responses", p("responses.jsonl"), "--out", p("verdicts.jsonl")});
    cli({"stats", "--verdicts", p("verdicts.jsonl"), "--problems", p("problems.jsonl"), "--out", p("summary.csv"),
         "--regressions", p("regressions.txt")});
    auto summary = read_lines(p("summary.csv"));
    require(summary.size() == 2 && summary[1].rfind("human,1,all,18,", 0) == 0, "summary row " + summary.back());
    fs::remove_all(dir);
    return "3 API sessions, 6 types each, no answer fields sent, responses scored";
}

} // namespace

int main()
{
    std::printf("counterfax acceptance\n");
    criterion("worked-example fidelity", worked_examples);
    criterion("oracle fidelity", oracle_fidelity);
    criterion("classifier fidelity", classifier_fidelity);
    criterion("self-consistency fuzz", fuzz);
    criterion("pipeline identity", pipeline_identity);
    criterion("statistics oracles", stats_oracles);
    criterion("prompt golden files", prompt_golden);
    std::printf("SKIP  %-28s %s\n", "headline-number replication",
                "not gated: needs live model access and human participant data");
    criterion("experiment session (API)", experiment_session);
    std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
