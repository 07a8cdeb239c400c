#include "counterfax/cli.hpp"

#include "counterfax/analysis.hpp"
#include "counterfax/errors.hpp"
#include "counterfax/evaluator.hpp"
#include "counterfax/experiment.hpp"
#include "counterfax/generator.hpp"
#include "counterfax/io_util.hpp"
#include "counterfax/problem_io.hpp"
#include "counterfax/records_io.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <map>
#include <set>
#include <sstream>

namespace counterfax {

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Raised for argument combinations CLI11 cannot check itself.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

AlphabetRegistry registry(const std::vector<std::string>& files)
{
    AlphabetRegistry r;
    for (const auto& f : files)
        r.add(load_alphabet(f));
    return r;
}

std::map<std::string, const AnalogyProblem*> index_problems(const std::vector<AnalogyProblem>& problems)
{
    std::map<std::string, const AnalogyProblem*> by_id;
    for (const auto& p : problems)
        by_id[p.id] = &p;
    return by_id;
}

// ---- gen

struct GenArgs {
    std::string alphabet = "hw";
    int per_cell = 100;
    std::vector<int> intervals{1, 2};
    std::uint64_t seed = 0;
    std::string out = "problems.jsonl";
    std::string public_out;
};

int cmd_gen(const GenArgs& a, std::ostream& out)
{
    auto alpha = load_alphabet(a.alphabet);
    auto problems = generate_problem_set(alpha, a.per_cell, {a.intervals.begin(), a.intervals.end()}, a.seed);
    write_problems(a.out, problems);
    if (!a.public_out.empty())
        write_problems(a.public_out, problems, ExportMode::Public);
    out << "wrote " << problems.size() << " problems to " << a.out << "\n";
    return kOk;
}

// ---- solve

struct SolveArgs {
    std::string problems;
    std::string out;
    std::vector<std::string> alphabet_files;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err)
{
    auto problems = read_problems(a.problems);
    auto alphabets = registry(a.alphabet_files);
    int mismatches = 0, unsolvable = 0;
    for (auto& p : problems) {
        try {
            auto solved = solve(p, alphabets.get(p.alphabet_id));
            if (p.answer && *p.answer != solved) {
                err << p.id << ": stored answer " << p.answer->bracketed() << " but rule gives " << solved.bracketed()
                    << "\n";
                ++mismatches;
            }
            p.answer = solved;
        } catch (const std::exception& e) {
            err << p.id << ": " << e.what() << "\n";
            ++unsolvable;
        }
    }
    if (!a.out.empty())
        write_problems(a.out, problems);
    else
        for (const auto& p : problems)
            out << p.id << " " << p.answer.value_or(LetterString()).bracketed() << "\n";
    if (mismatches || unsolvable) {
        err << mismatches << " mismatches, " << unsolvable << " unsolvable\n";
        return kFailure;
    }
    if (!a.out.empty())
        out << "solved " << problems.size() << " problems\n";
    return kOk;
}

// ---- eval

struct EvalArgs {
    std::string problems;
    std::string mode = "plain";
    std::string engine;
    std::string out;
    int parallel = 1;
    int max_retries = 5;
    std::string base_url = ModelEndpoint{}.base_url;
    std::string auth_env = ModelEndpoint{}.auth_env;
    std::optional<double> rpm;
    double timeout = 120;
    std::uint64_t seed = 0;
    std::string run_id;
    std::vector<std::string> alphabet_files;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err)
{
    const bool mock = a.mode.rfind("mock:", 0) == 0;
    std::optional<MockPolicy> policy;
    ModelEndpoint endpoint;
    if (mock) {
        try {
            policy = parse_mock_policy(a.mode.substr(5));
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--mode: ") + e.what());
        }
        endpoint = ModelEndpoint::for_mode(PromptMode::Plain);
        endpoint.base_url = "mock";
        endpoint.engine = a.engine.empty() ? "mock-" + to_string(*policy) : a.engine;
        endpoint.requests_per_minute = a.rpm.value_or(0.0);
    } else {
        PromptMode mode;
        try {
            mode = parse_prompt_mode(a.mode);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--mode: ") + e.what());
        }
        endpoint = ModelEndpoint::for_mode(mode);
        if (!a.engine.empty())
            endpoint.engine = a.engine;
        endpoint.base_url = a.base_url;
        endpoint.auth_env = a.auth_env;
        endpoint.requests_per_minute = a.rpm.value_or(endpoint.requests_per_minute);
    }
    endpoint.max_retries = a.max_retries;
    endpoint.parallelism = a.parallel;
    endpoint.timeout_seconds = a.timeout;

    auto problems = read_problems(a.problems);
    auto alphabets = registry(a.alphabet_files);
    std::unique_ptr<ChatModel> model;
    if (mock)
        model = std::make_unique<MockModel>(*policy, problems, alphabets, a.seed);
    else
        model = std::make_unique<HttpChatModel>(endpoint);

    EvalRun run;
    try {
        run = evaluate(problems, alphabets, *model, endpoint, {a.run_id, a.problems, endpoint.engine});
    } catch (const AuthError& e) {
        err << "authentication failed: " << e.what() << "\n";
        return kFailure;
    }
    write_responses(a.out, run.records);
    // timestamps live beside the records so the records themselves stay reproducible
    write_file_atomic(a.out + ".run.json", run_metadata(run).dump(2) + "\n");
    out << "wrote " << run.records.size() << " responses to " << a.out << "\n";
    if (run.failures()) {
        err << run.failures() << " of " << run.records.size() << " requests failed\n";
        return kFailure;
    }
    return kOk;
}

// ---- score

struct ScoreArgs {
    std::string problems;
    std::string responses;
    std::string out;
    std::string tables;
    std::string review;
    bool unparseable_as_error = false;
    std::vector<std::string> alphabet_files;
};

void apply_review(std::vector<ResponseRecord>& records, const std::string& path,
                  const std::map<std::string, const AnalogyProblem*>& problems)
{
    auto lines = read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json j;
        std::optional<VerdictKind> kind;
        std::string pid, agent;
        try {
            j = json::parse(lines[n]);
            pid = j.at("problem_id").get<std::string>();
            agent = j.value("agent_id", std::string());
            kind = parse_verdict_kind(j.at("verdict").get<std::string>());
        } catch (const json::exception& e) {
            throw ParseError(path, static_cast<int>(n + 1), e.what());
        }
        if (!kind)
            throw ParseError(path, static_cast<int>(n + 1), "unknown verdict " + j["verdict"].dump());
        if (!problems.count(pid))
            throw ParseError(path, static_cast<int>(n + 1), "unknown problem " + pid);
        int hits = 0;
        for (auto& r : records) {
            if (r.problem_id != pid || (!agent.empty() && r.agent_id != agent))
                continue;
            if (!r.verdict || r.verdict->kind != *kind) {
                Verdict v{*kind, {}};
                if (*kind == VerdictKind::ValidAlternative && r.verdict)
                    v.matches = r.verdict->matches;
                r.verdict = v;
            }
            r.reviewed = true;
            ++hits;
        }
        if (!hits)
            throw ParseError(path, static_cast<int>(n + 1), "no response for problem " + pid);
    }
}

std::string tables_csv(const std::map<std::string, ValidErrorTable>& tables)
{
    std::ostringstream out;
    out << "agent,interval,transformation,valid,errors,literal_copies,cell\n";
    for (const auto& [agent, table] : tables) {
        for (const auto& [key, cell] : table.cells)
            out << agent << ',' << key.second << ',' << to_string(key.first) << ',' << cell.valid << ','
                << cell.errors << ',' << cell.literal_copies << ",\"" << cell.cell() << "\"\n";
        out << agent << ",all,all," << table.valid << ',' << table.errors << ",," << table.overall_text() << "\n";
    }
    return out.str();
}

int cmd_score(const ScoreArgs& a, std::ostream& out)
{
    auto problems = read_problems(a.problems);
    auto by_id = index_problems(problems);
    auto alphabets = registry(a.alphabet_files);
    auto records = read_records(a.responses);
    std::set<std::string> orphans;
    for (auto& r : records) {
        auto it = by_id.find(r.problem_id);
        if (it == by_id.end()) {
            orphans.insert(r.problem_id);
            continue;
        }
        classify(*it->second, alphabets.get(it->second->alphabet_id), r, {a.unparseable_as_error});
    }
    if (!orphans.empty())
        throw std::invalid_argument("responses reference unknown problems: " + *orphans.begin() +
                                    (orphans.size() > 1 ? " and " + std::to_string(orphans.size() - 1) + " more" : ""));
    if (!a.review.empty())
        apply_review(records, a.review, by_id);
    write_verdicts(a.out, records);

    std::map<std::string, std::vector<ResponseRecord>> by_agent;
    for (const auto& r : records)
        by_agent[r.agent_class == "human" ? std::string(kHumanLabel) : r.agent_id].push_back(r);
    std::map<std::string, ValidErrorTable> tables;
    for (const auto& [agent, rs] : by_agent)
        tables[agent] = tabulate_valid_errors(rs, problems);
    if (!a.tables.empty())
        write_file_atomic(a.tables, tables_csv(tables));

    std::map<VerdictKind, int> counts;
    for (const auto& r : records)
        ++counts[r.verdict->kind];
    out << "scored " << records.size() << " responses:";
    for (auto k : {VerdictKind::Correct, VerdictKind::ValidAlternative, VerdictKind::Invalid, VerdictKind::Unparseable})
        out << " " << to_string(k) << "=" << counts[k];
    out << "\n";
    for (const auto& [agent, table] : tables) {
        std::set<int> intervals;
        for (const auto& [key, cell] : table.cells)
            intervals.insert(key.second);
        out << "\n[" << agent << "]\n";
        for (int iv : intervals)
            out << table.render(iv) << "\n";
        out << "Overall: " << table.overall_text() << " (" << table.valid << "/" << table.errors << ")\n";
    }
    return kOk;
}

// ---- stats

struct StatsArgs {
    std::string verdicts;
    std::string problems;
    std::vector<std::string> models;
    std::string out;
    std::string regressions;
    bool by_transformation = false;
    std::string ci = "clopper-pearson";
    double level = 0.95;
    bool lrt = false;
};

int cmd_stats(const StatsArgs& a, std::ostream& out)
{
    auto problems = read_problems(a.problems);
    auto records = read_records(a.verdicts);
    auto rows = trial_rows(records, problems);

    std::vector<std::string> models = a.models;
    if (models.empty()) {
        std::set<std::string> found;
        for (const auto& r : rows)
            if (r.agent_class == AgentClass::Model)
                found.insert(r.label);
        models.assign(found.begin(), found.end());
    } else {
        std::set<std::string> keep(models.begin(), models.end());
        std::set<std::string> present;
        for (const auto& r : rows)
            present.insert(r.label);
        for (const auto& m : models)
            if (!present.count(m))
                throw UsageError("--model: no records for '" + m + "'");
        keep.insert(std::string(kHumanLabel));
        std::erase_if(rows, [&](const TrialRow& r) { return !keep.count(r.label); });
    }

    AggregateOptions opts;
    opts.by_transformation = a.by_transformation;
    opts.ci_method = a.ci == "wilson" ? stats::CiMethod::Wilson : stats::CiMethod::ClopperPearson;
    opts.level = a.level;
    auto summary = aggregate(rows, opts);
    auto csv = summary_csv(summary);
    if (!a.out.empty())
        write_file_atomic(a.out, csv);
    else
        out << csv;

    auto report = regression_report(rows, models, {a.lrt});
    if (!a.regressions.empty())
        write_file_atomic(a.regressions, report);
    else
        out << "\n" << report;
    if (!a.out.empty())
        out << "wrote " << summary.size() << " summary rows to " << a.out << "\n";
    return kOk;
}

// ---- export

struct ExportArgs {
    std::string records;
    std::string problems;
    std::string out;
    std::string review_template;
    std::string agent;
};

int cmd_export(const ExportArgs& a, std::ostream& out)
{
    auto problems = read_problems(a.problems);
    auto by_id = index_problems(problems);
    auto records = read_records(a.records);
    std::erase_if(records, [&](const auto& r) { return !a.agent.empty() && r.agent_id != a.agent; });
    std::sort(records.begin(), records.end(), [](const auto& x, const auto& y) {
        return std::tie(x.problem_id, x.agent_id) < std::tie(y.problem_id, y.agent_id);
    });

    std::ostringstream md;
    std::ostringstream tmpl;
    md << "# Transcripts for review\n";
    for (const auto& r : records) {
        auto it = by_id.find(r.problem_id);
        if (it == by_id.end())
            throw std::invalid_argument("record references unknown problem " + r.problem_id);
        const auto& p = *it->second;
        md << "\n## " << r.problem_id << " / " << r.agent_id << "\n\n";
        md << "- transformation: " << to_string(p.transformation) << ", interval " << p.interval.value() << "\n";
        md << "- problem: " << p.source_a.bracketed() << " " << p.source_b.bracketed() << " / "
           << p.target_a.bracketed() << " [ ? ]\n";
        md << "- answer: " << (p.answer ? p.answer->bracketed() : "unknown") << "\n";
        md << "- parsed: " << (r.parsed ? r.parsed->bracketed() : "none") << "\n";
        md << "- verdict: " << (r.verdict ? to_string(r.verdict->kind) : "unscored") << "\n";
        md << "- retries: " << r.retries << "\n";
        if (r.error)
            md << "- error: " << *r.error << "\n";
        for (const auto& m : r.transcript)
            md << "\n### " << m.role << "\n\n```\n" << m.content << "\n```\n";
        if (r.transcript.empty())
            md << "\n```\n" << r.raw_text << "\n```\n";

        json line{{"problem_id", r.problem_id}, {"agent_id", r.agent_id},
                  {"verdict", r.verdict ? std::string(to_string(r.verdict->kind)) : std::string()}};
        tmpl << line.dump() << "\n";
    }
    write_file_atomic(a.out, md.str());
    if (!a.review_template.empty())
        write_file_atomic(a.review_template, tmpl.str());
    out << "exported " << records.size() << " transcripts to " << a.out << "\n";
    return kOk;
}

// ---- serve

struct ServeArgs {
    std::string problems;
    int interval = 1;
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string out = "responses.jsonl";
    std::string sessions = "sessions.jsonl";
    std::string static_dir;
    std::string attention_bank;
    int per_type = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> alphabet_files;
};

ExperimentServer* g_server = nullptr;

extern "C" void stop_server(int)
{
    if (g_server)
        g_server->stop();
}

int cmd_serve(const ServeArgs& a, std::ostream& out)
{
    ExperimentConfig config;
    config.interval = a.interval;
    config.seed = a.seed;
    config.per_type = a.per_type;
    config.responses_path = a.out;
    config.events_path = a.sessions;
    if (!a.attention_bank.empty())
        config.attention_bank = load_attention_bank(a.attention_bank);
    ExperimentService service(read_problems(a.problems), registry(a.alphabet_files), config);
    ExperimentServer server(service, a.static_dir);
    int port = server.bind(a.host, a.port);
    out << "serving interval-" << a.interval << " experiment on http://" << a.host << ":" << port << " ("
        << service.session_count() << " sessions restored)" << std::endl;
    g_server = &server;
    auto old_int = std::signal(SIGINT, stop_server);
    auto old_term = std::signal(SIGTERM, stop_server);
    server.listen();
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    g_server = nullptr;
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Counterfactual letter-string analogy toolkit", "counterfax"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a problem set");
    g->add_option("--alphabet", gen.alphabet, "hw, alt, std or a file with 26 letters")->capture_default_str();
    g->add_option("--per-cell", gen.per_cell, "Problems per transformation x interval")
        ->check(CLI::Range(1, 1000000))->capture_default_str();
    g->add_option("--intervals", gen.intervals, "Comma-separated interval sizes")
        ->delimiter(',')->check(CLI::IsMember({1, 2}))->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--out", gen.out)->capture_default_str();
    g->add_option("--public", gen.public_out, "Also write a copy without answers or metadata");

    SolveArgs sol;
    auto* s = app.add_subcommand("solve", "Apply each problem's intended rule and check stored answers");
    s->add_option("--problems", sol.problems)->required()->check(CLI::ExistingFile);
    s->add_option("--out", sol.out, "Write problems with answers filled in");
    s->add_option("--alphabet-file", sol.alphabet_files)->check(CLI::ExistingFile);

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Query a model on a problem set");
    e->add_option("--problems", ev.problems)->required()->check(CLI::ExistingFile);
    e->add_option("--mode", ev.mode, "plain, tool, or mock:POLICY (oracle, noisy:P, alternative:KIND, refuse:N)")
        ->capture_default_str();
    e->add_option("--engine", ev.engine, "Model name; also the agent id in the records");
    e->add_option("--out", ev.out)->required();
    e->add_option("--parallel", ev.parallel)->check(CLI::Range(1, 256))->capture_default_str();
    e->add_option("--max-retries", ev.max_retries)->check(CLI::NonNegativeNumber)->capture_default_str();
    e->add_option("--base-url", ev.base_url)->capture_default_str();
    e->add_option("--auth-env", ev.auth_env, "Environment variable holding the API key")->capture_default_str();
    e->add_option("--rpm", ev.rpm, "Requests per minute, 0 for unlimited (default 30; mock 0)")
        ->check(CLI::NonNegativeNumber);
    e->add_option("--timeout", ev.timeout, "Seconds per request")->check(CLI::PositiveNumber)->capture_default_str();
    e->add_option("--seed", ev.seed, "Mock model seed")->capture_default_str();
    e->add_option("--run-id", ev.run_id);
    e->add_option("--alphabet-file", ev.alphabet_files)->check(CLI::ExistingFile);

    ScoreArgs sc;
    auto* c = app.add_subcommand("score", "Classify responses and tabulate valid-alternative errors");
    c->add_option("--problems", sc.problems)->required()->check(CLI::ExistingFile);
    c->add_option("--responses", sc.responses)->required()->check(CLI::ExistingFile);
    c->add_option("--out", sc.out)->required();
    c->add_option("--tables", sc.tables, "CSV of valid/error counts per cell");
    c->add_option("--review", sc.review, "JSONL of manual verdicts, merged by problem_id")->check(CLI::ExistingFile);
    c->add_flag("--unparseable-as-error", sc.unparseable_as_error);
    c->add_option("--alphabet-file", sc.alphabet_files)->check(CLI::ExistingFile);

    StatsArgs st;
    auto* t = app.add_subcommand("stats", "Accuracy summaries and logistic regressions");
    t->add_option("--verdicts", st.verdicts)->required()->check(CLI::ExistingFile);
    t->add_option("--problems", st.problems)->required()->check(CLI::ExistingFile);
    t->add_option("--model", st.models, "Model agent to analyse (repeatable; default all)");
    t->add_option("--out", st.out, "Summary CSV (default stdout)");
    t->add_option("--regressions", st.regressions, "Regression report (default stdout)");
    t->add_flag("--by-transformation", st.by_transformation);
    t->add_option("--ci", st.ci)->check(CLI::IsMember({"clopper-pearson", "wilson"}))->capture_default_str();
    t->add_option("--level", st.level)->check(CLI::Range(0.5, 0.9999))->capture_default_str();
    t->add_flag("--lrt", st.lrt, "Add likelihood-ratio p-values");

    ExportArgs ex;
    auto* x = app.add_subcommand("export", "Write transcripts for manual review");
    x->add_option("--records", ex.records, "Responses or verdicts JSONL")->required()->check(CLI::ExistingFile);
    x->add_option("--problems", ex.problems)->required()->check(CLI::ExistingFile);
    x->add_option("--out", ex.out, "Markdown output")->required();
    x->add_option("--review-template", ex.review_template, "JSONL to edit and pass to score --review");
    x->add_option("--agent", ex.agent);

    ServeArgs sv;
    auto* v = app.add_subcommand("serve", "Run the human experiment backend");
    v->add_option("--problems", sv.problems)->required()->check(CLI::ExistingFile);
    v->add_option("--interval", sv.interval)->check(CLI::IsMember({1, 2}))->capture_default_str();
    v->add_option("--host", sv.host)->capture_default_str();
    v->add_option("--port", sv.port)->check(CLI::Range(0, 65535))->capture_default_str();
    v->add_option("--out", sv.out)->capture_default_str();
    v->add_option("--sessions", sv.sessions, "Session event log")->capture_default_str();
    v->add_option("--static", sv.static_dir, "Directory of frontend files")->check(CLI::ExistingDirectory);
    v->add_option("--attention-bank", sv.attention_bank)->check(CLI::ExistingFile);
    v->add_option("--per-type", sv.per_type)->check(CLI::Range(1, 1000))->capture_default_str();
    v->add_option("--seed", sv.seed)->capture_default_str();
    v->add_option("--alphabet-file", sv.alphabet_files)->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (g->parsed())
            return cmd_gen(gen, out);
        if (s->parsed())
            return cmd_solve(sol, out, err);
        if (e->parsed())
            return cmd_eval(ev, out, err);
        if (c->parsed())
            return cmd_score(sc, out);
        if (t->parsed())
            return cmd_stats(st, out);
        if (x->parsed())
            return cmd_export(ex, out);
        if (v->parsed())
            return cmd_serve(sv, out);
    } catch (const UsageError& ue) {
        err << "usage error: " << ue.what() << "\n";
        return kUsage;
    } catch (const std::exception& ex_) {
        err << "error: " << ex_.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

} // namespace counterfax
