#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "mimoarq/rng.hpp"

namespace mimoarq {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

/// Quasi-static L_r x L_t fading realization.
class ChannelMatrix {
public:
    explicit ChannelMatrix(CMatrix h);

    int lr() const { return static_cast<int>(h_.rows()); }
    int lt() const { return static_cast<int>(h_.cols()); }
    const CMatrix& matrix() const { return h_; }

private:
    CMatrix h_;
};

/// Linear SNR with a dB view. All interfaces take dB and convert here.
class SnrPoint {
public:
    static SnrPoint from_linear(double linear);
    static SnrPoint from_db(double db);

    double linear() const { return linear_; }
    double db() const;

private:
    explicit SnrPoint(double linear) : linear_(linear) {}
    double linear_;
};

/// Empirical distribution of a per-channel capacity, sorted ascending once
/// finalized.
struct CapacitySampleSet {
    std::vector<double> values;
    std::uint64_t seed = 0;

    std::size_t count() const { return values.size(); }
    void finalize();
    bool finalized() const;
    /// Fraction of samples >= rate (requires finalize()).
    double survival(double rate) const;
    /// Fraction of samples <= rate (requires finalize()).
    double cdf(double rate) const;
};

namespace channel {

/// i.i.d. CN(0,1) entries; throws std::invalid_argument on a zero dimension.
ChannelMatrix sample_channel(int lt, int lr, CounterRng& rng);

/// Draw `count` channels; realization i comes from CounterRng(seed, kChannel, i).
std::vector<ChannelMatrix> sample_channels(int lt, int lr, std::size_t count, std::uint64_t seed);

/// log2 det(I + m) for Hermitian positive semidefinite m, via Cholesky.
double log2det_identity_plus(const CMatrix& m);
double log2det_identity_plus(const RMatrix& m);

/// log2 det(I + (snr/L_t) H H^H), bits per channel use.
double mimo_mutual_info(const ChannelMatrix& h, SnrPoint snr);

/// Same quantity via the eigenvalues of H H^H; used to cross-check the
/// Cholesky route.
double mimo_mutual_info_eigen(const ChannelMatrix& h, SnrPoint snr);

/// CDF of g = sum of L_t unit-mean exponentials (chi-square with 2 L_t
/// degrees of freedom, scaled): 1 - e^{-g} sum_{k<L_t} g^k / k!.
double chi2_cdf(double g, int lt);

/// P(C_miso <= rate) for an (L_t, 1) channel under isotropic input.
double miso_capacity_cdf(double rate, SnrPoint snr, int lt);

CapacitySampleSet capacity_samples(std::span<const ChannelMatrix> channels, SnrPoint snr);

/// Supremum distance between an empirical sample set and a reference CDF,
/// evaluated at the sample jump points.
template <typename Cdf>
double kolmogorov_distance(const CapacitySampleSet& samples, Cdf&& reference) {
    const double m = static_cast<double>(samples.count());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.count(); ++i) {
        const double f = reference(samples.values[i]);
        const double lo = static_cast<double>(i) / m;
        const double hi = static_cast<double>(i + 1) / m;
        worst = std::max({worst, std::abs(f - lo), std::abs(f - hi)});
    }
    return worst;
}

}  // namespace channel
}  // namespace mimoarq
