// stats.hpp -- numerical routines: normal tail probabilities, binomial
// confidence intervals, SEM, and maximum-likelihood logistic regression.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace counterfax::stats {

/// Standard normal CDF, computed through erfc so the far tails keep full
/// relative precision.
double normal_cdf(double x);

/// Two-sided p-value of a standard normal statistic: 2 * Phi(-|z|).
double two_sided_p(double z);

/// "1.5e-11"-style rendering; values under 2.2e-16 print as "<2e-16".
std::string format_p(double p);

enum class CiMethod { ClopperPearson, Wilson };

/// Confidence interval for a binomial proportion. Clopper-Pearson is the
/// exact interval from beta quantiles. Throws DomainError unless
/// 0 <= successes <= trials, trials >= 1 and 0 < level < 1.
std::pair<double, double> binomial_ci(int successes, int trials, double level = 0.95,
                                      CiMethod method = CiMethod::ClopperPearson);

/// Sample standard deviation (n-1) over sqrt(n). Throws DomainError for n < 2.
double sem(const std::vector<double>& values);

struct RegressionFit {
    std::vector<std::string> terms;
    std::vector<double> coefficients;
    std::vector<double> standard_errors;
    std::vector<double> wald_z;
    std::vector<double> p_values;
    bool converged = false;
    int iterations = 0;
    double log_likelihood = 0.0;
};

/// Fitted probabilities left [1e-10, 1 - 1e-10] while the coefficients were
/// still moving: the outcome is (quasi-)perfectly separated.
class SeparationDetected : public std::runtime_error {
public:
    SeparationDetected(const std::string& what, RegressionFit fit)
      : std::runtime_error(what), fit(std::move(fit)) {}
    /// State at detection, marked not converged.
    RegressionFit fit;
};

/// Design matrix columns are linearly dependent.
class RankDeficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IrlsOptions {
    double tolerance = 1e-8;
    int max_iterations = 50;
    double probability_floor = 1e-10;
};

/// Logistic regression by iteratively reweighted least squares, starting
/// from zero. Converged when max |delta beta| < tolerance. Standard errors
/// come from the inverse Fisher information at the final estimate; p-values
/// are two-sided Wald tests.
RegressionFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& outcome,
                           std::vector<std::string> terms, IrlsOptions options = {});

/// Bernoulli log-likelihood of `beta`.
double logistic_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& outcome,
                               const Eigen::VectorXd& beta);

/// Upper tail of chi-squared with `df` degrees of freedom.
double chi_squared_upper(double statistic, int df);

} // namespace counterfax::stats
