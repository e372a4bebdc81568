#include "mimoarq/errprob.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mimoarq/errors.hpp"

namespace mimoarq::errprob {

CMatrix difference_matrix(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_i,
                          const CVector& s_j, int n) {
    if (h.lt() != code.lt()) {
        throw std::invalid_argument("channel and code disagree on L_t");
    }
    const CVector delta = s_i - s_j;
    return std::sqrt(snr.linear() / code.lt()) * h.matrix() * code.codeword(delta, n);
}

double pairwise_distance(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_i,
                         const CVector& s_j, int n) {
    return difference_matrix(h, code, snr, s_i, s_j, n).squaredNorm();
}

namespace {

/// Covariance from D^(n)_{i_l, j}, l = 1..n; prefixes are leading columns.
PairwiseCovariance covariance_from_differences(const LdcCode& code, std::span<const CMatrix* const> full,
                                               bool check_psd) {
    const int n = static_cast<int>(full.size());
    PairwiseCovariance cov;
    cov.r_w = RMatrix::Zero(n, n);
    cov.thresholds = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        const Eigen::Index cols = code.cumulative_slots(k + 1);
        const auto dk = full[static_cast<std::size_t>(k)]->leftCols(cols);
        cov.thresholds(k) = dk.squaredNorm();
        for (int l = k; l < n; ++l) {
            const auto dl = full[static_cast<std::size_t>(l)]->leftCols(cols);
            const double v = 2.0 * (dk.array() * dl.array().conjugate()).sum().real();
            cov.r_w(k, l) = v;
            cov.r_w(l, k) = v;
        }
    }
    if (check_psd && n > 1) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(cov.r_w, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, cov.r_w.diagonal().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
            throw InternalError("build_covariance: covariance is not positive semidefinite");
        }
    }
    return cov;
}

}  // namespace

PairwiseCovariance build_covariance(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_j,
                                    std::span<const CVector> competitors) {
    const int n = static_cast<int>(competitors.size());
    if (n < 1 || n > code.rounds()) {
        throw std::invalid_argument("build_covariance: need 1 <= n <= rounds competitors");
    }
    std::vector<CMatrix> full;
    std::vector<const CMatrix*> ptrs;
    for (const auto& s_i : competitors) {
        full.push_back(difference_matrix(h, code, snr, s_i, s_j, n));
    }
    for (const auto& d : full) {
        ptrs.push_back(&d);
    }
    return covariance_from_differences(code, ptrs, true);
}

ProbabilityEstimate q_n(const PairwiseCovariance& cov, std::size_t mc, CounterRng& rng) {
    if (cov.n() < 1) {
        throw std::invalid_argument("q_n: empty covariance");
    }
    if (cov.n() == 1) {
        return {orthant::q_function(std::sqrt(std::max(0.0, cov.thresholds(0)) / 2.0)), 0.0};
    }
    return orthant::below_ghk(cov.r_w, -cov.thresholds, mc, rng);
}

ProbabilityEstimate q_n(const PairwiseCovariance& cov, std::size_t mc, std::uint64_t seed) {
    CounterRng rng(seed, streams::kOrthant, 0);
    return q_n(cov, mc, rng);
}

std::uint64_t union_bound_work(int m, int n, std::size_t h_samples) {
    long double work = static_cast<long double>(m - 1) * static_cast<long double>(h_samples);
    for (int i = 0; i < n; ++i) {
        work *= m;
    }
    if (work > static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(work);
}

UnionBoundResult union_bound(const LdcCode& code, const SymbolSet& symbols, SnrPoint snr, int n,
                             const UnionBoundOptions& opts) {
    const int m = symbols.size();
    if (m < 2) {
        throw std::invalid_argument("union_bound: need at least two symbol vectors");
    }
    if (n < 1 || n > code.rounds()) {
        throw std::invalid_argument("union_bound: round index out of range");
    }
    if (opts.h_samples < 2) {
        throw std::invalid_argument("union_bound: need at least two channel samples");
    }
    if (opts.mc_per_h < 1) {
        throw std::invalid_argument("union_bound: need at least one orthant sample per term");
    }
    const std::uint64_t work = union_bound_work(m, n, opts.h_samples);
    if (work > opts.work_budget) {
        throw WorkBudgetExceeded(work, opts.work_budget);
    }

    const auto mm = static_cast<std::size_t>(m);
    const int cols = code.cumulative_slots(n);
    std::vector<int> prefix_cols;
    for (int k = 1; k <= n; ++k) {
        prefix_cols.push_back(code.cumulative_slots(k));
    }
    std::vector<double> per_h(opts.h_samples);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<double> terms;
    // ip[(k * M + a) * M + b] = Re <D_a, D_b> over the first T^(k+1) columns, D_a = S_a - S_j.
    std::vector<double> ip(static_cast<std::size_t>(n) * mm * mm);
    std::vector<CMatrix> diff(mm);
    double cov[orthant::kMaxSmallDim * orthant::kMaxSmallDim];
    double fac[orthant::kMaxSmallDim * orthant::kMaxSmallDim];
    double upper[orthant::kMaxSmallDim];
    if (n > orthant::kMaxSmallDim) {
        throw std::invalid_argument("union_bound: n above " + std::to_string(orthant::kMaxSmallDim));
    }
    for (std::size_t hs = 0; hs < opts.h_samples; ++hs) {
        CounterRng hrng(opts.seed, streams::kUnionBoundChannel, hs);
        const ChannelMatrix h = channel::sample_channel(code.lt(), opts.lr, hrng);
        CounterRng orng(opts.seed, streams::kOrthant, hs);
        std::vector<CMatrix> received;
        for (const auto& v : symbols.vectors) {
            received.push_back(std::sqrt(snr.linear() / code.lt()) * h.matrix() * code.codeword(v, n));
        }
        terms.clear();
        for (int j = 0; j < m; ++j) {
            for (std::size_t a = 0; a < mm; ++a) {
                diff[a] = received[a] - received[static_cast<std::size_t>(j)];
            }
            for (std::size_t a = 0; a < mm; ++a) {
                for (std::size_t b = a; b < mm; ++b) {
                    double acc = 0.0;
                    int k = 0;
                    for (int c = 0; c < cols; ++c) {
                        acc += diff[a].col(c).dot(diff[b].col(c)).real();
                        if (c + 1 == prefix_cols[static_cast<std::size_t>(k)]) {
                            ip[(static_cast<std::size_t>(k) * mm + a) * mm + b] = acc;
                            ip[(static_cast<std::size_t>(k) * mm + b) * mm + a] = acc;
                            ++k;
                        }
                    }
                }
            }
            // Odometer over (i_1, ..., i_n), each skipping j.
            std::fill(idx.begin(), idx.end(), j == 0 ? 1 : 0);
            while (true) {
                if (n == 1) {
                    const double d2 = ip[static_cast<std::size_t>(idx[0]) * mm + static_cast<std::size_t>(idx[0])];
                    terms.push_back(orthant::q_function(std::sqrt(std::max(0.0, d2) / 2.0)));
                } else {
                    for (int k = 0; k < n; ++k) {
                        const auto base = static_cast<std::size_t>(k) * mm;
                        const auto ik = static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
                        upper[k] = -ip[(base + ik) * mm + ik];
                        for (int l = k; l < n; ++l) {
                            const auto il = static_cast<std::size_t>(idx[static_cast<std::size_t>(l)]);
                            cov[k * n + l] = cov[l * n + k] = 2.0 * ip[(base + ik) * mm + il];
                        }
                    }
                    orthant::semidefinite_cholesky(cov, fac, n);
                    double acc = 0.0;
                    for (std::size_t s = 0; s < opts.mc_per_h; ++s) {
                        acc += orthant::ghk_weight(fac, upper, n, orng);
                    }
                    terms.push_back(acc / static_cast<double>(opts.mc_per_h));
                }
                int pos = n - 1;
                while (pos >= 0) {
                    int& v = idx[static_cast<std::size_t>(pos)];
                    ++v;
                    if (v == j) {
                        ++v;
                    }
                    if (v < m) {
                        break;
                    }
                    v = j == 0 ? 1 : 0;
                    --pos;
                }
                if (pos < 0) {
                    break;
                }
            }
        }
        per_h[hs] = orthant::pairwise_sum(terms) / m;
    }
    UnionBoundResult out;
    out.terms = work;
    const double hcount = static_cast<double>(opts.h_samples);
    out.bound = orthant::pairwise_sum(per_h) / hcount;
    double ss = 0.0;
    for (double v : per_h) {
        ss += (v - out.bound) * (v - out.bound);
    }
    out.std_error = std::sqrt(ss / (hcount - 1.0) / hcount);
    return out;
}

int optimal_diversity(int lt, int lr, int t_cum) {
    if (lt < 1 || lr < 1 || t_cum < 1) {
        throw std::invalid_argument("optimal_diversity: arguments must be positive");
    }
    return lr * std::min(t_cum, lt);
}

DiversityFit diversity_estimate(std::span<const PerPoint> curve, double window_db) {
    if (curve.empty()) {
        throw std::invalid_argument("diversity_estimate: empty curve");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& p : curve) {
        top = std::max(top, p.snr_db);
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : curve) {
        if (p.snr_db >= top - window_db - 1e-9) {
            if (!(p.per > 0.0)) {
                throw std::domain_error("diversity_estimate: zero PER in the window; run more trials");
            }
            x.push_back(p.snr_db / 10.0);
            y.push_back(-std::log10(p.per));
        }
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw std::invalid_argument("diversity_estimate: need at least 3 points in the window");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    DiversityFit fit;
    fit.points_used = static_cast<int>(n);
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + fit.slope * x[i]);
        sse += r * r;
    }
    const double dof = static_cast<double>(n) - 2.0;
    fit.std_error = std::sqrt(sse / dof / sxx);
    const boost::math::students_t dist(dof);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.ci_low = fit.slope - t * fit.std_error;
    fit.ci_high = fit.slope + t * fit.std_error;
    return fit;
}

}  // namespace mimoarq::errprob
