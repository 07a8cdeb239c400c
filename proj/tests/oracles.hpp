// Independent reference implementations used to check the stats module.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace counterfax::testing {

inline double binom_cdf(int k, int n, double p)
{
    // sum_{i<=k} C(n,i) p^i (1-p)^(n-i), accumulated in log space
    double total = 0.0;
    for (int i = 0; i <= k; ++i) {
        double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        total += std::exp(lc + i * std::log(p) + (n - i) * std::log1p(-p));
    }
    return total;
}

/// Clopper-Pearson bounds by bisection on the binomial CDF.
inline std::pair<double, double> cp_oracle(int x, int n, double alpha)
{
    auto solve = [](auto f) {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            double mid = (lo + hi) / 2;
            (f(mid) ? hi : lo) = mid;
        }
        return (lo + hi) / 2;
    };
    double low = x == 0 ? 0.0 : solve([&](double p) { return 1.0 - binom_cdf(x - 1, n, p) >= alpha / 2; });
    double high = x == n ? 1.0 : solve([&](double p) { return binom_cdf(x, n, p) <= alpha / 2; });
    return {low, high};
}

/// Logistic maximum likelihood by cyclic one-dimensional Newton updates.
inline Eigen::VectorXd coordinate_ml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y)
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(x.cols());
    for (int sweep = 0; sweep < 5000; ++sweep) {
        double biggest = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            double g = 0.0, h = 0.0;
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                double p = 1.0 / (1.0 + std::exp(-x.row(i).dot(b)));
                g += x(i, j) * (y[i] - p);
                h += x(i, j) * x(i, j) * p * (1 - p);
            }
            double step = g / h;
            b[j] += step;
            biggest = std::max(biggest, std::fabs(step));
        }
        if (biggest < 1e-12)
            break;
    }
    return b;
}

} // namespace counterfax::testing
