#include "mimoarq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimoarq {

ChannelMatrix::ChannelMatrix(CMatrix h) : h_(std::move(h)) {
    if (h_.rows() < 1 || h_.cols() < 1) {
        throw std::invalid_argument("channel matrix must have positive dimensions");
    }
}

SnrPoint SnrPoint::from_linear(double linear) {
    if (!(linear >= 0.0) || !std::isfinite(linear)) {
        throw std::invalid_argument("linear SNR must be finite and nonnegative");
    }
    return SnrPoint(linear);
}

SnrPoint SnrPoint::from_db(double db) {
    if (!std::isfinite(db)) {
        throw std::invalid_argument("SNR in dB must be finite");
    }
    return SnrPoint(std::pow(10.0, db / 10.0));
}

double SnrPoint::db() const {
    return linear_ > 0.0 ? 10.0 * std::log10(linear_) : -std::numeric_limits<double>::infinity();
}

void CapacitySampleSet::finalize() { std::sort(values.begin(), values.end()); }

bool CapacitySampleSet::finalized() const { return std::is_sorted(values.begin(), values.end()); }

double CapacitySampleSet::survival(double rate) const {
    const auto it = std::lower_bound(values.begin(), values.end(), rate);
    return static_cast<double>(values.end() - it) / static_cast<double>(values.size());
}

double CapacitySampleSet::cdf(double rate) const {
    const auto it = std::upper_bound(values.begin(), values.end(), rate);
    return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

namespace channel {

ChannelMatrix sample_channel(int lt, int lr, CounterRng& rng) {
    if (lt < 1 || lr < 1) {
        throw std::invalid_argument("antenna counts must be at least 1");
    }
    CMatrix h(lr, lt);
    for (int c = 0; c < lt; ++c) {
        for (int r = 0; r < lr; ++r) {
            h(r, c) = rng.complex_normal();
        }
    }
    return ChannelMatrix(std::move(h));
}

std::vector<ChannelMatrix> sample_channels(int lt, int lr, std::size_t count, std::uint64_t seed) {
    std::vector<ChannelMatrix> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, streams::kChannel, i);
        out.push_back(sample_channel(lt, lr, rng));
    }
    return out;
}

double log2det_identity_plus(const CMatrix& m) {
    const CMatrix a = CMatrix::Identity(m.rows(), m.cols()) + m;
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("log2det_identity_plus: matrix is not positive semidefinite");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        acc += std::log2(llt.matrixL()(i, i).real());
    }
    return 2.0 * acc;
}

double log2det_identity_plus(const RMatrix& m) {
    const RMatrix a = RMatrix::Identity(m.rows(), m.cols()) + m;
    Eigen::LLT<RMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("log2det_identity_plus: matrix is not positive semidefinite");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        acc += std::log2(llt.matrixL()(i, i));
    }
    return 2.0 * acc;
}

double mimo_mutual_info(const ChannelMatrix& h, SnrPoint snr) {
    const CMatrix& hm = h.matrix();
    const double scale = snr.linear() / h.lt();
    // det(I + c H H^H) = det(I + c H^H H); factor the smaller Gram matrix.
    if (hm.rows() <= hm.cols()) {
        return log2det_identity_plus(CMatrix(scale * hm * hm.adjoint()));
    }
    return log2det_identity_plus(CMatrix(scale * hm.adjoint() * hm));
}

double mimo_mutual_info_eigen(const ChannelMatrix& h, SnrPoint snr) {
    const CMatrix gram = h.matrix() * h.matrix().adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    const double scale = snr.linear() / h.lt();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        acc += std::log2(1.0 + scale * std::max(0.0, es.eigenvalues()(i)));
    }
    return acc;
}

double chi2_cdf(double g, int lt) {
    if (lt < 1) {
        throw std::invalid_argument("chi2_cdf: degrees parameter must be >= 1");
    }
    if (std::isnan(g) || g < 0.0) {
        throw std::invalid_argument("chi2_cdf: argument must be nonnegative");
    }
    if (g == 0.0) {
        return 0.0;
    }
    if (std::isinf(g)) {
        return 1.0;
    }
    // Below the mode the head sum cancels against 1; sum the tail instead.
    if (g < static_cast<double>(lt)) {
        double term = std::exp(-g);
        for (int k = 1; k <= lt; ++k) {
            term *= g / k;
        }
        double tail = 0.0;
        for (int k = lt + 1; term > tail * 1e-17; ++k) {
            tail += term;
            term *= g / k;
        }
        return std::min(1.0, tail);
    }
    double term = 1.0;
    double head = 1.0;
    for (int k = 1; k < lt; ++k) {
        term *= g / k;
        head += term;
    }
    return std::clamp(1.0 - std::exp(-g) * head, 0.0, 1.0);
}

double miso_capacity_cdf(double rate, SnrPoint snr, int lt) {
    if (rate < 0.0) {
        throw std::invalid_argument("miso_capacity_cdf: rate must be nonnegative");
    }
    if (rate == 0.0) {
        return 0.0;
    }
    if (snr.linear() == 0.0) {
        return 1.0;
    }
    const double g = std::expm1(rate * std::log(2.0)) * lt / snr.linear();
    return chi2_cdf(g, lt);
}

CapacitySampleSet capacity_samples(std::span<const ChannelMatrix> channels, SnrPoint snr) {
    CapacitySampleSet out;
    out.values.reserve(channels.size());
    for (const auto& h : channels) {
        out.values.push_back(mimo_mutual_info(h, snr));
    }
    out.finalize();
    return out;
}

}  // namespace channel
}  // namespace mimoarq
