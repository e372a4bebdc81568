#include "mimoarq/orthant.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimoarq::orthant {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        if (p == 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        throw std::invalid_argument("normal_quantile: p must lie in [0,1]");
    }
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void semidefinite_cholesky(const double* cov, double* l, int n, double rel_tol) {
    double scale = 0.0;
    for (int k = 0; k < n; ++k) {
        scale = std::max(scale, std::abs(cov[k * n + k]));
    }
    std::fill(l, l + n * n, 0.0);
    for (int k = 0; k < n; ++k) {
        double v = cov[k * n + k];
        for (int j = 0; j < k; ++j) {
            v -= l[k * n + j] * l[k * n + j];
        }
        if (v <= rel_tol * scale) {
            continue;
        }
        const double lkk = std::sqrt(v);
        l[k * n + k] = lkk;
        for (int i = k + 1; i < n; ++i) {
            double s = cov[i * n + k];
            for (int j = 0; j < k; ++j) {
                s -= l[i * n + j] * l[k * n + j];
            }
            l[i * n + k] = s / lkk;
        }
    }
}

RMatrix semidefinite_cholesky(const RMatrix& cov, double rel_tol) {
    if (cov.rows() != cov.cols()) {
        throw std::invalid_argument("semidefinite_cholesky: matrix must be square");
    }
    const auto n = static_cast<int>(cov.rows());
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor in = cov;
    RowMajor out(n, n);
    semidefinite_cholesky(in.data(), out.data(), n, rel_tol);
    return out;
}

double ghk_weight(const double* l, const double* upper, int n, CounterRng& rng) {
    double z[kMaxSmallDim];
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
        double mean = 0.0;
        for (int j = 0; j < k; ++j) {
            mean += l[k * n + j] * z[j];
        }
        const double lkk = l[k * n + k];
        if (lkk == 0.0) {
            // Pinned direction: the coordinate is a deterministic function of z.
            z[k] = 0.0;
            if (!(mean < upper[k])) {
                return 0.0;
            }
            continue;
        }
        const double p = normal_cdf((upper[k] - mean) / lkk);
        w *= p;
        if (w <= 0.0) {
            return 0.0;
        }
        if (k + 1 < n) {
            z[k] = normal_quantile(std::max(rng.uniform() * p, std::numeric_limits<double>::min()));
        }
    }
    return w;
}

namespace {

ProbabilityEstimate summarize(const std::vector<double>& samples) {
    ProbabilityEstimate out;
    const double m = static_cast<double>(samples.size());
    out.value = pairwise_sum(samples) / m;
    if (samples.size() > 1) {
        std::vector<double> sq(samples.size());
        std::transform(samples.begin(), samples.end(), sq.begin(),
                       [&](double v) { return (v - out.value) * (v - out.value); });
        out.std_error = std::sqrt(pairwise_sum(sq) / (m - 1.0) / m);
    }
    return out;
}

void check_inputs(const RMatrix& cov, const Eigen::VectorXd& upper, std::size_t mc) {
    if (cov.rows() != cov.cols() || cov.rows() != upper.size()) {
        throw std::invalid_argument("orthant: covariance and bounds disagree in size");
    }
    if (mc == 0) {
        throw std::invalid_argument("orthant: sample budget must be positive");
    }
    if (!upper.allFinite()) {
        throw std::invalid_argument("orthant: bounds must be finite");
    }
}

}  // namespace

ProbabilityEstimate below_ghk(const RMatrix& cov, const Eigen::VectorXd& upper, std::size_t mc, CounterRng& rng) {
    check_inputs(cov, upper, mc);
    const auto n = static_cast<int>(cov.rows());
    if (n > kMaxSmallDim) {
        throw std::invalid_argument("orthant: dimension above " + std::to_string(kMaxSmallDim));
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor l = semidefinite_cholesky(cov);
    std::vector<double> weights(mc);
    for (std::size_t s = 0; s < mc; ++s) {
        weights[s] = ghk_weight(l.data(), upper.data(), n, rng);
    }
    return summarize(weights);
}

ProbabilityEstimate below_indicator(const RMatrix& cov, const Eigen::VectorXd& upper, std::size_t mc,
                                    CounterRng& rng) {
    check_inputs(cov, upper, mc);
    const RMatrix l = semidefinite_cholesky(cov);
    const Eigen::Index n = cov.rows();
    std::vector<double> hits(mc);
    Eigen::VectorXd z(n);
    for (std::size_t s = 0; s < mc; ++s) {
        for (Eigen::Index k = 0; k < n; ++k) {
            z(k) = rng.normal();
        }
        hits[s] = ((l * z).array() < upper.array()).all() ? 1.0 : 0.0;
    }
    return summarize(hits);
}

}  // namespace mimoarq::orthant
