#include "mimoarq/ldc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mimoarq {

LdcCode::LdcCode(std::string name, int lt, std::vector<int> round_lengths, std::vector<CMatrix> c_mats,
                 std::vector<CMatrix> d_mats)
    : name_(std::move(name)), lt_(lt), t_total_(0), round_lengths_(std::move(round_lengths)), c_(std::move(c_mats)),
      d_(std::move(d_mats)) {
    if (lt_ < 1) {
        throw std::invalid_argument("LdcCode: L_t must be >= 1");
    }
    if (round_lengths_.empty()) {
        throw std::invalid_argument("LdcCode: at least one round is required");
    }
    for (int t : round_lengths_) {
        if (t < 1) {
            throw std::invalid_argument("LdcCode: round lengths must be positive");
        }
        t_total_ += t;
    }
    if (c_.empty()) {
        throw std::invalid_argument("LdcCode: K must be >= 1");
    }
    if (d_.empty()) {
        for (const auto& c : c_) {
            d_.push_back(CMatrix::Zero(c.rows(), c.cols()));
        }
    }
    if (c_.size() != d_.size()) {
        throw std::invalid_argument("LdcCode: C and D must have the same count");
    }
    for (std::size_t k = 0; k < c_.size(); ++k) {
        for (const CMatrix* m : {&c_[k], &d_[k]}) {
            if (m->rows() != lt_ || m->cols() != t_total_) {
                throw std::invalid_argument("LdcCode: spreading matrix " + std::to_string(k) + " is not " +
                                            std::to_string(lt_) + "x" + std::to_string(t_total_));
            }
        }
    }
}

int LdcCode::cumulative_slots(int n) const {
    if (n < 0 || n > rounds()) {
        throw std::invalid_argument("round index out of range");
    }
    return std::accumulate(round_lengths_.begin(), round_lengths_.begin() + n, 0);
}

bool LdcCode::has_conjugation() const {
    return std::any_of(d_.begin(), d_.end(), [](const CMatrix& d) { return d.squaredNorm() > 0.0; });
}

CMatrix LdcCode::codeword(const CVector& s, int n) const {
    if (s.size() != k()) {
        throw std::invalid_argument("codeword: symbol vector must have K entries");
    }
    const int cols = cumulative_slots(n);
    if (n < 1) {
        throw std::invalid_argument("round index out of range");
    }
    CMatrix x = CMatrix::Zero(lt_, cols);
    for (int k = 0; k < this->k(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        x += s(k) * c_[kk].leftCols(cols) + std::conj(s(k)) * d_[kk].leftCols(cols);
    }
    return x;
}

namespace ldc {

LdcCode prefix(const LdcCode& code, int n) {
    if (n < 1 || n > code.rounds()) {
        throw std::invalid_argument("prefix: round index out of range");
    }
    const int cols = code.cumulative_slots(n);
    std::vector<CMatrix> c;
    std::vector<CMatrix> d;
    for (int k = 0; k < code.k(); ++k) {
        c.push_back(code.c_mats()[static_cast<std::size_t>(k)].leftCols(cols));
        d.push_back(code.d_mats()[static_cast<std::size_t>(k)].leftCols(cols));
    }
    std::vector<int> rounds(code.round_lengths().begin(), code.round_lengths().begin() + n);
    return LdcCode(code.name(), code.lt(), std::move(rounds), std::move(c), std::move(d));
}

RMatrix real_equivalent_channel(const ChannelMatrix& h, const LdcCode& code, int n) {
    if (h.lt() != code.lt()) {
        throw std::invalid_argument("channel and code disagree on L_t");
    }
    if (n < 1 || n > code.rounds()) {
        throw std::invalid_argument("real_equivalent_channel: round index out of range");
    }
    const int cols = code.cumulative_slots(n);
    const Eigen::Index len = static_cast<Eigen::Index>(h.lr()) * cols;
    RMatrix g(2 * len, 2 * code.k());
    const std::complex<double> j(0.0, 1.0);
    for (int k = 0; k < code.k(); ++k) {
        const CMatrix ha = h.matrix() * code.a_mat(k).leftCols(cols);
        const CMatrix hb = h.matrix() * (j * code.b_mat(k).leftCols(cols));
        const auto va = ha.reshaped();
        const auto vb = hb.reshaped();
        g.col(2 * k).head(len) = va.real();
        g.col(2 * k).tail(len) = va.imag();
        g.col(2 * k + 1).head(len) = vb.real();
        g.col(2 * k + 1).tail(len) = vb.imag();
    }
    return g;
}

double ldc_mutual_info(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, int n) {
    const RMatrix g = real_equivalent_channel(h, code, n);
    const double scale = snr.linear() / code.lt();
    const double t = code.cumulative_slots(n);
    if (g.rows() <= g.cols()) {
        return channel::log2det_identity_plus(RMatrix(scale * g * g.transpose())) / (2.0 * t);
    }
    return channel::log2det_identity_plus(RMatrix(scale * g.transpose() * g)) / (2.0 * t);
}

namespace {

CMatrix stack_vec(const std::vector<CMatrix>& mats, int cols, int lt) {
    CMatrix out(static_cast<Eigen::Index>(lt) * cols, static_cast<Eigen::Index>(mats.size()));
    for (std::size_t k = 0; k < mats.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = mats[k].leftCols(cols).reshaped();
    }
    return out;
}

}  // namespace

CMatrix u_matrix(const LdcCode& code, int n) { return stack_vec(code.c_mats(), code.cumulative_slots(n), code.lt()); }

CMatrix v_matrix(const LdcCode& code, int n) { return stack_vec(code.d_mats(), code.cumulative_slots(n), code.lt()); }

ResidualReport check_theorem1(const LdcCode& code, int lr) {
    ResidualReport out;
    out.applicable = code.k() == code.lt() * code.t_total() && lr >= code.lt();
    for (int n = 1; n <= code.rounds(); ++n) {
        const CMatrix u = u_matrix(code, n);
        const CMatrix v = v_matrix(code, n);
        CMatrix f(2 * u.rows(), 2 * u.cols());
        f << u, v, v.conjugate(), u.conjugate();
        const CMatrix gram = f * f.adjoint();
        out.residuals.push_back((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm());
    }
    return out;
}

ResidualReport check_corollary2(const LdcCode& code) {
    ResidualReport out;
    out.applicable = !code.has_conjugation() && code.k() == code.lt() * code.t_total();
    for (int n = 1; n <= code.rounds(); ++n) {
        const CMatrix u = u_matrix(code, n);
        const CMatrix gram = u * u.adjoint();
        out.residuals.push_back((gram - CMatrix::Identity(gram.rows(), gram.cols())).norm());
    }
    return out;
}

OptimalityReport check_criterion1(const LdcCode& code, int lr, const Criterion1Options& opts) {
    OptimalityReport report;
    const ResidualReport thm = check_theorem1(code, lr);
    const ResidualReport cor = check_corollary2(code);
    report.theorem1_applicable = thm.applicable;
    report.corollary2_applicable = cor.applicable;

    std::vector<ChannelMatrix> channels;
    channels.reserve(opts.mc);
    for (std::size_t i = 0; i < opts.mc; ++i) {
        CounterRng rng(opts.seed, streams::kAudit, i);
        channels.push_back(channel::sample_channel(code.lt(), lr, rng));
    }
    for (int n = 1; n <= code.rounds(); ++n) {
        RoundCertificate cert;
        cert.round = n;
        for (double db : opts.snr_db) {
            const SnrPoint snr = SnrPoint::from_db(db);
            for (const auto& h : channels) {
                const double gap = std::abs(ldc_mutual_info(h, code, snr, n) - channel::mimo_mutual_info(h, snr));
                cert.mi_gap = std::max(cert.mi_gap, gap);
            }
        }
        cert.criterion1_pass = cert.mi_gap < opts.tol;
        cert.theorem1_residual = thm.residuals[static_cast<std::size_t>(n - 1)];
        if (!code.has_conjugation()) {
            cert.corollary2_residual = cor.residuals[static_cast<std::size_t>(n - 1)];
        }
        report.per_round.push_back(cert);
    }
    return report;
}

PowerCheck check_power(const LdcCode& code, PowerLevel level, double tol) {
    PowerCheck out;
    const double kk = code.k();
    for (int n = 1; n <= code.rounds(); ++n) {
        const int start = code.round_start(n);
        const int len = code.round_lengths()[static_cast<std::size_t>(n - 1)];
        double total = 0.0;
        for (int k = 0; k < code.k(); ++k) {
            const CMatrix a = code.a_mat(k).middleCols(start, len);
            const CMatrix b = code.b_mat(k).middleCols(start, len);
            const CMatrix aa = a * a.adjoint();
            const CMatrix bb = b * b.adjoint();
            total += aa.trace().real() + bb.trace().real();
            if (level == PowerLevel::PerSymbol) {
                const double target = code.lt() * len / kk;
                out.max_residual = std::max({out.max_residual, std::abs(aa.trace().real() - target),
                                             std::abs(bb.trace().real() - target)});
            } else if (level == PowerLevel::Isotropic) {
                const CMatrix target = CMatrix::Identity(code.lt(), code.lt()) * (len / kk);
                out.max_residual = std::max({out.max_residual, (aa - target).cwiseAbs().maxCoeff(),
                                             (bb - target).cwiseAbs().maxCoeff()});
            }
        }
        if (level == PowerLevel::PerRound) {
            out.max_residual = std::max(out.max_residual, std::abs(total - 2.0 * code.lt() * len));
        }
    }
    out.pass = out.max_residual <= tol;
    return out;
}

std::vector<double> round_weights(std::span<const int> round_lengths) {
    std::vector<double> w;
    double cum = 0.0;
    for (std::size_t n = 0; n < round_lengths.size(); ++n) {
        cum += round_lengths[n];
        if (n + 1 < round_lengths.size()) {
            const double next = cum + round_lengths[n + 1];
            w.push_back(round_lengths[n + 1] / (cum * next));
        } else {
            w.push_back(1.0 / cum);
        }
    }
    return w;
}

namespace {

template <typename PerRoundMi>
harq::ScalarRateProblem build_problem(std::span<const ChannelMatrix> channels, std::span<const int> round_lengths,
                                      PerRoundMi&& mi) {
    if (channels.empty()) {
        throw std::invalid_argument("empty channel set");
    }
    harq::ScalarRateProblem problem;
    problem.weights = round_weights(round_lengths);
    int cum = 0;
    for (std::size_t n = 0; n < round_lengths.size(); ++n) {
        cum += round_lengths[n];
        std::vector<double> col;
        col.reserve(channels.size());
        for (std::size_t i = 0; i < channels.size(); ++i) {
            col.push_back(cum * mi(i, static_cast<int>(n + 1)));
        }
        problem.cumulative.push_back(std::move(col));
        problem.divisors.push_back(cum);
    }
    return problem;
}

}  // namespace

harq::ScalarRateProblem ldc_rate_problem(const LdcCode& code, std::span<const ChannelMatrix> channels, SnrPoint snr,
                                         int n_max) {
    if (n_max < 1 || n_max > code.rounds()) {
        throw std::invalid_argument("avg_rate_ldc: deadline exceeds the code's round count");
    }
    const std::span<const int> lengths(code.round_lengths().data(), static_cast<std::size_t>(n_max));
    return build_problem(channels, lengths,
                         [&](std::size_t i, int n) { return ldc_mutual_info(channels[i], code, snr, n); });
}

AvgRateResult avg_rate_ldc(const LdcCode& code, std::span<const ChannelMatrix> channels, SnrPoint snr, int n_max,
                           std::optional<double> rate) {
    const auto problem = ldc_rate_problem(code, channels, snr, n_max);
    return rate ? harq::evaluate_scalar_rate(problem, *rate) : harq::optimize_scalar_rate(problem);
}

AvgRateResult avg_rate_ldc(const LdcCode& code, SnrPoint snr, int lr, int n_max, std::size_t mc, std::uint64_t seed,
                           std::optional<double> rate) {
    const auto channels = channel::sample_channels(code.lt(), lr, mc, seed);
    return avg_rate_ldc(code, channels, snr, n_max, rate);
}

AvgRateResult optimal_ldc_avg_rate(std::span<const ChannelMatrix> channels, SnrPoint snr,
                                   std::span<const int> round_lengths) {
    if (round_lengths.empty()) {
        throw std::invalid_argument("optimal_ldc_avg_rate: at least one round is required");
    }
    if (std::any_of(round_lengths.begin(), round_lengths.end(), [](int t) { return t < 1; })) {
        throw std::invalid_argument("optimal_ldc_avg_rate: round lengths must be positive");
    }
    // C_mimo does not depend on the round; compute it once per channel.
    std::vector<double> cap;
    cap.reserve(channels.size());
    for (const auto& h : channels) {
        cap.push_back(channel::mimo_mutual_info(h, snr));
    }
    return harq::optimize_scalar_rate(
        build_problem(channels, round_lengths, [&](std::size_t i, int) { return cap[i]; }));
}

AvgRateResult optimal_ldc_avg_rate(SnrPoint snr, int lt, int lr, std::span<const int> round_lengths, std::size_t mc,
                                   std::uint64_t seed) {
    const auto channels = channel::sample_channels(lt, lr, mc, seed);
    return optimal_ldc_avg_rate(channels, snr, round_lengths);
}

std::vector<std::vector<int>> round_partitions(int t_total, int n) {
    if (n < 1 || t_total < n) {
        throw std::invalid_argument("round_partitions: need 1 <= n <= T");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    auto recurse = [&](auto&& self, int remaining, int parts) -> void {
        if (parts == 1) {
            current.push_back(remaining);
            out.push_back(current);
            current.pop_back();
            return;
        }
        for (int first = 1; first <= remaining - (parts - 1); ++first) {
            current.push_back(first);
            self(self, remaining - first, parts - 1);
            current.pop_back();
        }
    };
    recurse(recurse, t_total, n);
    return out;
}

PartitionChoice best_round_partition(std::span<const ChannelMatrix> channels, SnrPoint snr, int t_total, int n) {
    PartitionChoice best;
    bool first = true;
    for (const auto& lengths : round_partitions(t_total, n)) {
        auto result = optimal_ldc_avg_rate(channels, snr, lengths);
        if (first || result.avg_rate > best.result.avg_rate) {
            best = PartitionChoice{lengths, std::move(result)};
            first = false;
        }
    }
    return best;
}

}  // namespace ldc
}  // namespace mimoarq
