#include "counterfax/stats.hpp"

#include "counterfax/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace counterfax::stats {

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double two_sided_p(double z)
{
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

std::string format_p(double p)
{
    if (std::isnan(p))
        return "NA";
    if (p < 2.2e-16)
        return "<2e-16";
    char buf[32];
    std::snprintf(buf, sizeof buf, p < 1e-3 ? "%.2g" : "%.3g", p);
    return buf;
}

std::pair<double, double> binomial_ci(int successes, int trials, double level, CiMethod method)
{
    if (trials < 1 || successes < 0 || successes > trials)
        throw DomainError("binomial_ci needs 0 <= successes <= trials and trials >= 1");
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("confidence level must lie in (0, 1)");
    const double alpha = 1.0 - level;
    const double x = successes, n = trials;

    if (method == CiMethod::Wilson) {
        const double z = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2);
        const double phat = x / n;
        const double denom = 1.0 + z * z / n;
        const double centre = (phat + z * z / (2 * n)) / denom;
        const double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
        return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
    }

    double low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1, alpha / 2);
    double high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1, n - x, 1 - alpha / 2);
    return {low, high};
}

double sem(const std::vector<double>& values)
{
    if (values.size() < 2)
        throw DomainError("SEM needs at least two values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1)) / std::sqrt(n);
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& eta)
{
    return eta.unaryExpr([](double e) {
        return e >= 0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e));
    });
}

} // namespace

double logistic_log_likelihood(const Eigen::MatrixXd& design, const Eigen::VectorXd& outcome,
                               const Eigen::VectorXd& beta)
{
    Eigen::VectorXd eta = design * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // log(1 + e^eta), stable for large |eta|
        double softplus = eta[i] > 0 ? eta[i] + std::log1p(std::exp(-eta[i])) : std::log1p(std::exp(eta[i]));
        ll += outcome[i] * eta[i] - softplus;
    }
    return ll;
}

RegressionFit fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& outcome,
                           std::vector<std::string> terms, IrlsOptions options)
{
    const Eigen::Index n = design.rows(), k = design.cols();
    if (n == 0 || k == 0)
        throw DomainError("logistic regression needs at least one row and one column");
    if (outcome.size() != n)
        throw DomainError("outcome length does not match design rows");
    if (static_cast<Eigen::Index>(terms.size()) != k)
        throw DomainError("one term name per design column is required");
    for (Eigen::Index i = 0; i < n; ++i)
        if (outcome[i] != 0.0 && outcome[i] != 1.0)
            throw DomainError("outcome must be coded 0/1");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k)
        throw RankDeficient("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(k) + " columns");

    RegressionFit fit;
    fit.terms = std::move(terms);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);

    auto finish = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd p = sigmoid(design * b);
        Eigen::VectorXd w = (p.array() * (1.0 - p.array())).matrix();
        Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
        Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
        fit.coefficients.assign(b.data(), b.data() + k);
        fit.standard_errors.resize(k);
        fit.wald_z.resize(k);
        fit.p_values.resize(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            fit.standard_errors[j] = std::sqrt(cov(j, j));
            fit.wald_z[j] = b[j] / fit.standard_errors[j];
            fit.p_values[j] = two_sided_p(fit.wald_z[j]);
        }
        fit.log_likelihood = logistic_log_likelihood(design, outcome, b);
    };

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Eigen::VectorXd p = sigmoid(design * beta);
        Eigen::VectorXd w = (p.array() * (1.0 - p.array())).matrix();
        Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
        Eigen::VectorXd score = design.transpose() * (outcome - p);
        // Newton step on the log-likelihood; same fixed point as the
        // weighted least-squares form but without dividing by tiny weights
        Eigen::VectorXd step = info.ldlt().solve(score);
        beta += step;
        fit.iterations = iter;
        const double change = step.cwiseAbs().maxCoeff();

        Eigen::VectorXd fitted = sigmoid(design * beta);
        const bool extreme = (fitted.array() < options.probability_floor).any() ||
                             (fitted.array() > 1.0 - options.probability_floor).any();
        if (change < options.tolerance) {
            fit.converged = true;
            break;
        }
        if (extreme || !beta.allFinite()) {
            fit.converged = false;
            finish(beta);
            throw SeparationDetected("fitted probabilities reached 0 or 1 after " +
                                         std::to_string(iter) + " iterations; outcome is separated",
                                     fit);
        }
    }
    finish(beta);
    return fit;
}

double chi_squared_upper(double statistic, int df)
{
    if (statistic <= 0)
        return 1.0;
    return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

} // namespace counterfax::stats
