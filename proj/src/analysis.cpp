#include "counterfax/analysis.hpp"

#include "counterfax/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace counterfax {

std::vector<TrialRow> trial_rows(const std::vector<ResponseRecord>& records,
                                 const std::vector<AnalogyProblem>& problems)
{
    std::unordered_map<std::string, const AnalogyProblem*> by_id;
    for (const auto& p : problems)
        by_id[p.id] = &p;

    std::set<std::string> orphans;
    std::vector<TrialRow> rows;
    rows.reserve(records.size());
    for (const auto& r : records) {
        auto it = by_id.find(r.problem_id);
        if (it == by_id.end()) {
            orphans.insert(r.problem_id);
            continue;
        }
        if (!r.verdict)
            throw std::invalid_argument("record " + r.problem_id + "/" + r.agent_id + " has no verdict");
        TrialRow row;
        if (r.agent_class == "human") {
            row.agent_class = AgentClass::Human;
            row.label = kHumanLabel;
            row.participant_id = r.agent_id;
        } else {
            row.label = r.agent_id;
        }
        row.interval = it->second->interval;
        row.transformation = it->second->transformation;
        row.correct = r.verdict->kind == VerdictKind::Correct;
        rows.push_back(std::move(row));
    }
    if (!orphans.empty()) {
        std::string list;
        for (const auto& id : orphans)
            list += (list.empty() ? "" : ", ") + id;
        throw std::invalid_argument("records reference unknown problems: " + list);
    }
    return rows;
}

void RegressionSpec::validate() const
{
    auto has = [&](Predictor::Kind k) {
        return std::any_of(predictors.begin(), predictors.end(), [&](const auto& p) { return p.kind == k; });
    };
    if (has(Predictor::Kind::Interaction) &&
        !(has(Predictor::Kind::IntervalSize) && has(Predictor::Kind::AgentContrast)))
        throw std::invalid_argument("an interaction term needs both the interval and agent main effects");
    auto contrasts = std::count_if(predictors.begin(), predictors.end(),
                                   [](const auto& p) { return p.kind == Predictor::Kind::AgentContrast; });
    if (contrasts > 1)
        throw std::invalid_argument("at most one agent contrast per regression");
}

Design build_design(const std::vector<TrialRow>& rows, const RegressionSpec& spec)
{
    spec.validate();
    const Predictor* contrast = nullptr;
    for (const auto& p : spec.predictors)
        if (p.kind == Predictor::Kind::AgentContrast)
            contrast = &p;

    std::vector<const TrialRow*> used;
    for (const auto& r : rows)
        if (!contrast || r.label == contrast->reference || r.label == contrast->other)
            used.push_back(&r);

    Design d;
    d.terms.push_back("(Intercept)");
    for (const auto& p : spec.predictors) {
        switch (p.kind) {
        case Predictor::Kind::IntervalSize: d.terms.push_back("interval2"); break;
        case Predictor::Kind::AgentContrast: d.terms.push_back(p.other); break;
        case Predictor::Kind::Interaction: d.terms.push_back("interval2:" + contrast->other); break;
        }
    }
    const auto n = static_cast<Eigen::Index>(used.size());
    d.x.resize(n, static_cast<Eigen::Index>(d.terms.size()));
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = *used[i];
        const double interval = r.interval.value() == 2 ? 1.0 : 0.0;
        const double agent = contrast && r.label == contrast->other ? 1.0 : 0.0;
        d.x(i, 0) = 1.0;
        for (std::size_t k = 0; k < spec.predictors.size(); ++k) {
            double v = 0.0;
            switch (spec.predictors[k].kind) {
            case Predictor::Kind::IntervalSize: v = interval; break;
            case Predictor::Kind::AgentContrast: v = agent; break;
            case Predictor::Kind::Interaction: v = interval * agent; break;
            }
            d.x(i, static_cast<Eigen::Index>(k + 1)) = v;
        }
        d.y[i] = r.correct ? 1.0 : 0.0;
    }
    return d;
}

stats::RegressionFit fit_regression(const std::vector<TrialRow>& rows, const RegressionSpec& spec,
                                    stats::IrlsOptions options)
{
    auto d = build_design(rows, spec);
    return stats::fit_logistic(d.x, d.y, std::move(d.terms), options);
}

std::vector<SummaryRow> aggregate(const std::vector<TrialRow>& rows, AggregateOptions options)
{
    using Key = std::tuple<std::string, int, int>; // agent, interval, transformation or -1
    struct Cell {
        int trials = 0, correct = 0;
        std::map<std::string, std::pair<int, int>> participants; // id -> (correct, trials)
        bool human = false;
    };
    std::map<Key, Cell> cells;
    for (const auto& r : rows) {
        int t = options.by_transformation ? static_cast<int>(r.transformation) : -1;
        auto& c = cells[{r.label, r.interval.value(), t}];
        ++c.trials;
        c.correct += r.correct;
        if (r.agent_class == AgentClass::Human) {
            c.human = true;
            auto& pc = c.participants[r.participant_id.value_or("")];
            pc.first += r.correct;
            ++pc.second;
        }
    }

    std::vector<SummaryRow> out;
    for (const auto& [key, c] : cells) {
        SummaryRow s;
        s.agent = std::get<0>(key);
        s.interval = std::get<1>(key);
        if (std::get<2>(key) >= 0)
            s.transformation = static_cast<TransformationType>(std::get<2>(key));
        s.trials = c.trials;
        s.correct = c.correct;
        if (c.human) {
            std::vector<double> acc;
            for (const auto& [id, pc] : c.participants)
                acc.push_back(static_cast<double>(pc.first) / pc.second);
            s.participants = static_cast<int>(acc.size());
            double sum = 0.0;
            for (double a : acc)
                sum += a;
            s.accuracy = sum / static_cast<double>(acc.size());
            if (acc.size() >= 2)
                s.sem = stats::sem(acc);
        } else {
            s.accuracy = static_cast<double>(c.correct) / c.trials;
        }
        std::tie(s.ci_low, s.ci_high) = stats::binomial_ci(c.correct, c.trials, options.level, options.ci_method);
        out.push_back(std::move(s));
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream out;
    out << "agent,interval,transformation,trials,correct,accuracy,participants,sem,ci_low,ci_high\n";
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << r.agent << ',' << r.interval << ','
            << (r.transformation ? std::string(to_string(*r.transformation)) : "all") << ','
            << r.trials << ',' << r.correct << ',' << num(r.accuracy) << ',' << r.participants << ','
            << (r.sem ? num(*r.sem) : "") << ',' << num(r.ci_low) << ',' << num(r.ci_high) << '\n';
    }
    return out.str();
}

namespace {

void print_fit(std::ostringstream& out, const std::string& title, const std::vector<TrialRow>& rows,
               const RegressionSpec& spec, const ReportOptions& options)
{
    out << "== " << title << "\n";
    Design d;
    try {
        d = build_design(rows, spec);
    } catch (const std::exception& e) {
        out << "   skipped: " << e.what() << "\n\n";
        return;
    }
    out << "   trials: " << d.y.size() << "\n";
    stats::RegressionFit fit;
    try {
        fit = stats::fit_logistic(d.x, d.y, d.terms);
    } catch (const stats::SeparationDetected& e) {
        out << "   separation detected: " << e.what() << "\n\n";
        return;
    } catch (const stats::RankDeficient& e) {
        out << "   rank deficient: " << e.what() << "\n\n";
        return;
    } catch (const std::exception& e) {
        out << "   failed: " << e.what() << "\n\n";
        return;
    }

    std::vector<std::string> lrt(fit.terms.size());
    if (options.likelihood_ratio) {
        for (std::size_t k = 1; k < fit.terms.size(); ++k) {
            Eigen::MatrixXd reduced(d.x.rows(), d.x.cols() - 1);
            std::vector<std::string> names;
            for (Eigen::Index c = 0, j = 0; c < d.x.cols(); ++c) {
                if (c == static_cast<Eigen::Index>(k))
                    continue;
                reduced.col(j++) = d.x.col(c);
                names.push_back(fit.terms[c]);
            }
            try {
                auto r = stats::fit_logistic(reduced, d.y, names);
                lrt[k] = stats::format_p(stats::chi_squared_upper(2 * (fit.log_likelihood - r.log_likelihood), 1));
            } catch (const std::exception&) {
                lrt[k] = "NA";
            }
        }
    }

    char line[256];
    std::snprintf(line, sizeof line, "   %-28s %10s %10s %9s %10s%s\n", "term", "estimate", "std.err", "z",
                  "p(Wald)", options.likelihood_ratio ? "      p(LR)" : "");
    out << line;
    for (std::size_t k = 0; k < fit.terms.size(); ++k) {
        std::snprintf(line, sizeof line, "   %-28s %10.4f %10.4f %9.3f %10s", fit.terms[k].c_str(),
                      fit.coefficients[k], fit.standard_errors[k], fit.wald_z[k],
                      stats::format_p(fit.p_values[k]).c_str());
        out << line;
        if (options.likelihood_ratio) {
            std::snprintf(line, sizeof line, " %10s", k == 0 ? "" : lrt[k].c_str());
            out << line;
        }
        out << "\n";
    }
    std::snprintf(line, sizeof line, "   log-likelihood %.4f, %d iterations%s\n\n", fit.log_likelihood,
                  fit.iterations, fit.converged ? "" : " (not converged)");
    out << line;
}

} // namespace

std::string regression_report(const std::vector<TrialRow>& rows, const std::vector<std::string>& models,
                              ReportOptions options)
{
    std::ostringstream out;
    const bool have_humans = std::any_of(rows.begin(), rows.end(),
                                         [](const auto& r) { return r.agent_class == AgentClass::Human; });
    auto only = [&](std::string_view label) {
        std::vector<TrialRow> sub;
        for (const auto& r : rows)
            if (r.label == label)
                sub.push_back(r);
        return sub;
    };
    const std::string human(kHumanLabel);

    if (have_humans) {
        for (const auto& m : models) {
            RegressionSpec spec{{Predictor::interval(), Predictor::contrast(human, m), Predictor::interaction()}};
            print_fit(out, "human vs " + m + ": interval + agent + interaction", rows, spec, options);
        }
        print_fit(out, "human: interval effect", only(human), RegressionSpec{{Predictor::interval()}}, options);
    }
    for (const auto& m : models)
        print_fit(out, m + ": interval effect", only(m), RegressionSpec{{Predictor::interval()}}, options);
    return out.str();
}

} // namespace counterfax
