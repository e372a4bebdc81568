#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mimoarq/channel.hpp"

namespace mimoarq {

/// Effective rates R^(1) >= ... >= R^(N) >= 0 after each ARQ round, in bits
/// per channel use. R^(0) = inf and R^(N+1) = 0 are implicit.
class RoundRates {
public:
    RoundRates() = default;
    explicit RoundRates(std::vector<double> rates);

    int n_max() const { return static_cast<int>(rates_.size()); }
    /// 1-based; rate(0) = inf, rate(N+1) = 0.
    double rate(int n) const;
    const std::vector<double>& values() const { return rates_; }

private:
    std::vector<double> rates_;
};

struct AvgRateResult {
    RoundRates optimal_rates;
    double avg_rate = 0.0;
    /// Standard error of avg_rate as a sample mean at the reported rates.
    double std_error = 0.0;
    /// P(A_n), n = 1..N, estimated on the sample set.
    std::vector<double> success_probs;
    std::size_t samples_used = 0;
};

namespace harq {

/// sum_n (R^(n) - R^(n+1)) P(A_n). Throws std::invalid_argument when the
/// probabilities decrease, leave [0,1], or the rates are not monotone.
double avg_rate_from_probs(const RoundRates& rates, std::span<const double> success_probs);

/// Direct form sum_n R^(n) (P(A_n) - P(A_{n-1})); cross-check of the above.
double avg_rate_from_probs_direct(const RoundRates& rates, std::span<const double> success_probs);

/// (1/n) log2 det(I + (n snr / L_t) H H^H): Chase combining after n rounds.
double cc_equiv_capacity(const ChannelMatrix& h, SnrPoint snr, int n);

/// IR under isotropic input does not depend on the round.
double ir_equiv_capacity(const ChannelMatrix& h, SnrPoint snr);

/// Maximize sum_n (R^(n) - R^(n+1)) P(C >= R^(n)) over R^(1) >= ... >= R^(N)
/// on the empirical distribution. Thresholds are restricted to sample values,
/// which is exact for the empirical measure. Among maximizers the
/// lexicographically smallest rate vector is returned.
AvgRateResult optimize_ir_rates(const CapacitySampleSet& samples, int n_max);

/// IR with constant-length retransmissions: R^(n) = R / T^(n) for the given
/// slot lengths, optimized over the scalar R.
AvgRateResult optimize_ir_rates(const CapacitySampleSet& samples, std::span<const int> slot_lengths);

/// A single-parameter HARQ problem: success after round n on sample i iff
/// cumulative[n][i] >= R, and the objective is R * sum_n weight[n] P(A_n).
/// cumulative[n] are per-sample "bits delivered per codeword" values; they
/// must be nondecreasing in n for each sample so that A_{n-1} is a subset
/// of A_n.
struct ScalarRateProblem {
    std::vector<std::vector<double>> cumulative;
    std::vector<double> weights;
    /// Divisors d_n with R^(n) = R / d_n, reported in the result.
    std::vector<double> divisors;
};

/// Evaluates the objective at fixed R.
AvgRateResult evaluate_scalar_rate(const ScalarRateProblem& problem, double rate);

/// Maximizes over R by scanning every sample value as a candidate. The
/// objective is linear in R between consecutive candidates, so the maximum
/// sits on one of them. Ties go to the smallest R.
AvgRateResult optimize_scalar_rate(const ScalarRateProblem& problem);

/// Chase combining with a single rate R, R^(n) = R/n, on shared channels.
AvgRateResult optimize_cc_rate(std::span<const ChannelMatrix> channels, SnrPoint snr, int n_max);
AvgRateResult optimize_cc_rate(SnrPoint snr, int lt, int lr, int n_max, std::size_t mc, std::uint64_t seed);

/// Sample mean of the isotropic mutual information, with its standard error.
struct ErgodicResult {
    double capacity = 0.0;
    double std_error = 0.0;
};
ErgodicResult ergodic_capacity(const CapacitySampleSet& samples);
ErgodicResult ergodic_capacity(SnrPoint snr, int lt, int lr, std::size_t mc, std::uint64_t seed);

/// Closed-form MISO objectives built from the chi-square CDF.
double miso_ir_avg_rate(const RoundRates& rates, SnrPoint snr, int lt);
double miso_cc_avg_rate(double rate, int n_max, SnrPoint snr, int lt);

}  // namespace harq
}  // namespace mimoarq
