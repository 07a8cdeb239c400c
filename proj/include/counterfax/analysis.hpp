// analysis.hpp -- trial tables, per-condition summaries and the regression
// analyses comparing human participants with model agents.

#pragma once

#include "counterfax/classifier.hpp"
#include "counterfax/problem.hpp"
#include "counterfax/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace counterfax {

enum class AgentClass { Human, Model };

/// Label under which humans are pooled in summaries and contrasts.
inline constexpr std::string_view kHumanLabel = "human";

/// One binary-outcome trial.
struct TrialRow {
    AgentClass agent_class = AgentClass::Model;
    /// Model engine; "human" for participants.
    std::string label;
    /// Present iff agent_class is Human.
    std::optional<std::string> participant_id;
    IntervalSize interval{1};
    TransformationType transformation = TransformationType::Successor;
    bool correct = false;
};

/// Joins classified records to their problems. A record is correct iff its
/// verdict is Correct; every other verdict is an incorrect trial. Throws
/// std::invalid_argument listing orphan problem ids or unclassified records.
std::vector<TrialRow> trial_rows(const std::vector<ResponseRecord>& records,
                                 const std::vector<AnalogyProblem>& problems);

struct Predictor {
    enum class Kind { IntervalSize, AgentContrast, Interaction };
    Kind kind = Kind::IntervalSize;
    /// AgentContrast: `reference` codes 0, `other` codes 1.
    std::string reference;
    std::string other;

    static Predictor interval() { return {Kind::IntervalSize, {}, {}}; }
    static Predictor contrast(std::string reference, std::string other)
    {
        return {Kind::AgentContrast, std::move(reference), std::move(other)};
    }
    static Predictor interaction() { return {Kind::Interaction, {}, {}}; }
};

/// Predictors after the implicit intercept. Interval 1 codes 0, interval 2
/// codes 1.
struct RegressionSpec {
    std::vector<Predictor> predictors;

    /// Throws std::invalid_argument if an interaction lacks either main effect.
    void validate() const;
};

/// Builds the design for `spec` (rows outside an agent contrast are
/// dropped; without a contrast all rows are used) and fits it.
stats::RegressionFit fit_regression(const std::vector<TrialRow>& rows, const RegressionSpec& spec,
                                    stats::IrlsOptions options = {});

/// Design matrix, outcomes and term names for `spec`; exposed for tests.
struct Design {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> terms;
};
Design build_design(const std::vector<TrialRow>& rows, const RegressionSpec& spec);

struct SummaryRow {
    std::string agent;
    int interval = 1;
    /// Empty when not grouped by transformation.
    std::optional<TransformationType> transformation;
    int trials = 0;
    int correct = 0;
    /// Humans: mean of per-participant accuracies. Models: pooled.
    double accuracy = 0.0;
    int participants = 0;
    /// Humans with at least two participants only.
    std::optional<double> sem;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct AggregateOptions {
    bool by_transformation = false;
    stats::CiMethod ci_method = stats::CiMethod::ClopperPearson;
    double level = 0.95;
};

/// Accuracy per agent x interval [x transformation]. Human participants are
/// pooled under "human". Rows are sorted by agent, interval, transformation.
std::vector<SummaryRow> aggregate(const std::vector<TrialRow>& rows, AggregateOptions options = {});

std::string summary_csv(const std::vector<SummaryRow>& rows);

struct ReportOptions {
    /// Add likelihood-ratio p-values next to the Wald tests.
    bool likelihood_ratio = false;
};

/// Coefficient tables for: each model vs humans (interval, agent and their
/// interaction), the human interval effect, and each model's interval
/// effect. Analyses whose data are missing are skipped; separated or
/// rank-deficient fits are reported as such.
std::string regression_report(const std::vector<TrialRow>& rows, const std::vector<std::string>& models,
                              ReportOptions options = {});

} // namespace counterfax
