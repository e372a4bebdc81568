#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimoarq/channel.hpp"
#include "mimoarq/ldc.hpp"
#include "mimoarq/modulation.hpp"
#include "mimoarq/orthant.hpp"

namespace mimoarq {

/// Covariance of the decision metrics W^(1..n) against the correct vector j
/// and competitors i_1..i_n, with thresholds d_E^(k)^2.
struct PairwiseCovariance {
    RMatrix r_w;
    Eigen::VectorXd thresholds;

    int n() const { return static_cast<int>(thresholds.size()); }
};

struct UnionBoundResult {
    double bound = 0.0;
    /// Standard error across channel samples (includes the orthant noise).
    double std_error = 0.0;
    std::uint64_t terms = 0;
};

struct DiversityFit {
    double slope = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int points_used = 0;
};

struct PerPoint {
    double snr_db = 0.0;
    double per = 0.0;
};

namespace errprob {

inline constexpr std::uint64_t kDefaultWorkBudget = 100'000'000;

/// sqrt(snr / L_t) H (X^(n)(s_i) - X^(n)(s_j)).
CMatrix difference_matrix(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_i,
                          const CVector& s_j, int n);

/// d_E^(n)(i,j)^2 = ||difference_matrix||_F^2.
double pairwise_distance(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_i,
                         const CVector& s_j, int n);

/// R_w(k,l) = 2 Re <D^(k)_{i_k,j}, D^(k)_{i_l,j}>_F for l >= k, mirrored.
/// Throws InternalError if the result is not PSD within 1e-10 (relative).
PairwiseCovariance build_covariance(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, const CVector& s_j,
                                    std::span<const CVector> competitors);

/// P(W^(k) < -d_E^(k)^2 for all k). Exact for n = 1; GHK otherwise.
ProbabilityEstimate q_n(const PairwiseCovariance& cov, std::size_t mc, CounterRng& rng);
ProbabilityEstimate q_n(const PairwiseCovariance& cov, std::size_t mc, std::uint64_t seed);

struct UnionBoundOptions {
    int lr = 1;
    std::size_t h_samples = 200;
    std::size_t mc_per_h = 200;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t work_budget = kDefaultWorkBudget;
};

/// M^n (M-1) h_samples elementary terms.
std::uint64_t union_bound_work(int m, int n, std::size_t h_samples);

/// (1/M) sum_j sum_{i_1..i_n != j} E_H[Q_n]. Raises WorkBudgetExceeded when
/// union_bound_work exceeds the budget.
UnionBoundResult union_bound(const LdcCode& code, const SymbolSet& symbols, SnrPoint snr, int n,
                             const UnionBoundOptions& opts = {});

/// L_r min(T^(n), L_t).
int optimal_diversity(int lt, int lr, int t_cum);

/// Least-squares slope of -log10(PER) against snr_db / 10 over the points
/// within window_db of the highest SNR, with a 95% Student-t interval.
DiversityFit diversity_estimate(std::span<const PerPoint> curve, double window_db = 6.0);

}  // namespace errprob
}  // namespace mimoarq
