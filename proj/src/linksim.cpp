#include "mimoarq/linksim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mimoarq/conv_code.hpp"

namespace mimoarq {

double SimPoint::per() const { return trials ? static_cast<double>(failures) / static_cast<double>(trials) : 0.0; }

double SimPoint::per_stderr() const {
    if (trials == 0) {
        return 0.0;
    }
    const double p = per();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double SimPoint::avg_rate() const {
    return channel_uses ? static_cast<double>(accepted_bits) / static_cast<double>(channel_uses) : 0.0;
}

double SimPoint::round_fraction(int n) const {
    return trials ? static_cast<double>(round_histogram.at(static_cast<std::size_t>(n - 1))) /
                        static_cast<double>(trials)
                  : 0.0;
}

double SimPoint::pe(int n) const {
    return trials ? static_cast<double>(fail_through.at(static_cast<std::size_t>(n - 1))) /
                        static_cast<double>(trials)
                  : 0.0;
}

double SimPoint::success_then_fail_rate(int n) const {
    return trials ? static_cast<double>(success_then_fail.at(static_cast<std::size_t>(n - 1))) /
                        static_cast<double>(trials)
                  : 0.0;
}

namespace linksim {
namespace {

struct Geometry {
    int k = 0;
    int codewords = 0;
    int bits_per_vector = 0;
    int coded_bits = 0;
    int payload_bits = 0;
    std::vector<int> cum_slots;
};

Geometry validate(const LinkConfig& config) {
    const LdcCode& code = config.code;
    if (config.n_max < 1 || config.n_max > code.rounds()) {
        throw std::invalid_argument("linksim: deadline must be within the code's round count");
    }
    if (config.lr < 1) {
        throw std::invalid_argument("linksim: L_r must be >= 1");
    }
    if (config.packet_symbols < 1 || config.packet_symbols % code.k() != 0) {
        throw std::invalid_argument("linksim: packet_symbols must be a positive multiple of K");
    }
    if (config.max_trials < 1) {
        throw std::invalid_argument("linksim: trial cap must be >= 1");
    }
    if (code.k() > 6) {
        throw std::invalid_argument("linksim: exhaustive ML supports K <= 6");
    }
    Geometry g;
    g.k = code.k();
    g.codewords = config.packet_symbols / code.k();
    g.bits_per_vector = 2 * code.k();
    g.coded_bits = 2 * config.packet_symbols;
    for (int n = 0; n <= config.n_max; ++n) {
        g.cum_slots.push_back(code.cumulative_slots(n));
    }
    if (config.coded) {
        if (config.interleaver_rows * config.interleaver_cols != g.coded_bits) {
            throw std::invalid_argument("linksim: interleaver " + std::to_string(config.interleaver_rows) + "x" +
                                        std::to_string(config.interleaver_cols) + " does not hold " +
                                        std::to_string(g.coded_bits) + " coded bits");
        }
        g.payload_bits = config.packet_symbols - coding::kTailBits;
        if (g.payload_bits < 1) {
            throw std::invalid_argument("linksim: packet too short for the code tail");
        }
    }
    return g;
}

/// Per-column squared distances from y to every hypothesis, prefix-summed by round.
void round_metrics(const CMatrix& y, const std::vector<CMatrix>& hyp, const Geometry& g, int n_max,
                   std::vector<double>& metrics) {
    const std::size_t m = hyp.size();
    metrics.assign(m * static_cast<std::size_t>(n_max), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int n = 1; n <= n_max; ++n) {
            for (int c = g.cum_slots[static_cast<std::size_t>(n - 1)]; c < g.cum_slots[static_cast<std::size_t>(n)];
                 ++c) {
                acc += (y.col(c) - hyp[i].col(c)).squaredNorm();
            }
            metrics[static_cast<std::size_t>(n - 1) * m + i] = acc;
        }
    }
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct TrialResult {
    std::vector<char> ok;
};

TrialResult run_trial(const LinkConfig& config, const Geometry& g, const SymbolSet& symbols, SnrPoint snr,
                      std::uint64_t trial) {
    const LdcCode& code = config.code;
    const int n_max = config.n_max;
    const int cols = g.cum_slots.back();
    CounterRng rng(config.seed, streams::kLinkTrial, trial);
    const ChannelMatrix h = channel::sample_channel(code.lt(), config.lr, rng);
    const double amp = std::sqrt(snr.linear() / code.lt());

    std::vector<CMatrix> hyp;
    hyp.reserve(symbols.vectors.size());
    for (const auto& v : symbols.vectors) {
        hyp.push_back(amp * h.matrix() * code.codeword(v, n_max));
    }

    // Labels per codeword.
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(g.codewords));
    std::vector<std::uint8_t> payload;
    if (config.coded) {
        payload.resize(static_cast<std::size_t>(g.payload_bits));
        for (auto& b : payload) {
            b = static_cast<std::uint8_t>(rng.bits(1));
        }
        std::vector<std::uint8_t> info = payload;
        info.resize(info.size() + coding::kTailBits, 0);
        const auto coded = coding::conv_encode(info);
        const coding::BlockInterleaver il(config.interleaver_rows, config.interleaver_cols);
        const auto inter = il.interleave<std::uint8_t>(coded);
        for (int c = 0; c < g.codewords; ++c) {
            std::uint32_t label = 0;
            for (int b = 0; b < g.bits_per_vector; ++b) {
                label |= static_cast<std::uint32_t>(inter[static_cast<std::size_t>(c * g.bits_per_vector + b)]) << b;
            }
            labels[static_cast<std::size_t>(c)] = label;
        }
    } else {
        for (auto& label : labels) {
            label = static_cast<std::uint32_t>(rng.bits(g.bits_per_vector));
        }
    }

    TrialResult out;
    out.ok.assign(static_cast<std::size_t>(n_max), 1);
    const std::size_t m = hyp.size();
    std::vector<double> metrics;
    std::vector<double> llr;
    if (config.coded) {
        llr.resize(static_cast<std::size_t>(n_max) * static_cast<std::size_t>(g.coded_bits));
    }
    CMatrix y(config.lr, cols);
    for (int c = 0; c < g.codewords; ++c) {
        const std::uint32_t label = labels[static_cast<std::size_t>(c)];
        for (int col = 0; col < cols; ++col) {
            for (int r = 0; r < config.lr; ++r) {
                y(r, col) = hyp[label](r, col) + rng.complex_normal();
            }
        }
        round_metrics(y, hyp, g, n_max, metrics);
        for (int n = 0; n < n_max; ++n) {
            const double* v = &metrics[static_cast<std::size_t>(n) * m];
            if (!config.coded) {
                const auto best = static_cast<std::size_t>(std::min_element(v, v + m) - v);
                if (symbols.labels[best] != label) {
                    out.ok[static_cast<std::size_t>(n)] = 0;
                }
                continue;
            }
            for (int b = 0; b < g.bits_per_vector; ++b) {
                double l0 = -std::numeric_limits<double>::infinity();
                double l1 = l0;
                for (std::size_t i = 0; i < m; ++i) {
                    if ((symbols.labels[i] >> b) & 1) {
                        l1 = log_sum_exp(l1, -v[i]);
                    } else {
                        l0 = log_sum_exp(l0, -v[i]);
                    }
                }
                llr[static_cast<std::size_t>(n) * static_cast<std::size_t>(g.coded_bits) +
                    static_cast<std::size_t>(c * g.bits_per_vector + b)] = l0 - l1;
            }
        }
    }
    if (config.coded) {
        const coding::BlockInterleaver il(config.interleaver_rows, config.interleaver_cols);
        for (int n = 0; n < n_max; ++n) {
            const std::span<const double> round_llr(&llr[static_cast<std::size_t>(n) * g.coded_bits],
                                                    static_cast<std::size_t>(g.coded_bits));
            const auto decoded = coding::viterbi_decode(il.deinterleave<double>(round_llr));
            out.ok[static_cast<std::size_t>(n)] = std::equal(payload.begin(), payload.end(), decoded.begin());
        }
    }
    return out;
}

void accumulate(SimPoint& point, const TrialResult& r, const Geometry& g, int n_max) {
    ++point.trials;
    int term = 0;
    bool failed_so_far = true;
    for (int n = 1; n <= n_max; ++n) {
        const bool ok = r.ok[static_cast<std::size_t>(n - 1)];
        if (ok && term == 0) {
            term = n;
        }
        failed_so_far = failed_so_far && !ok;
        if (failed_so_far) {
            ++point.fail_through[static_cast<std::size_t>(n - 1)];
        }
        if (n >= 2 && r.ok[static_cast<std::size_t>(n - 2)] && !ok) {
            ++point.success_then_fail[static_cast<std::size_t>(n - 1)];
        }
    }
    const auto codewords = static_cast<std::uint64_t>(g.codewords);
    if (term > 0) {
        ++point.round_histogram[static_cast<std::size_t>(term - 1)];
        point.accepted_bits += static_cast<std::uint64_t>(point.bits_per_packet);
        point.channel_uses += codewords * static_cast<std::uint64_t>(g.cum_slots[static_cast<std::size_t>(term)]);
    } else {
        ++point.failures;
        point.channel_uses += codewords * static_cast<std::uint64_t>(g.cum_slots.back());
    }
}

SimPoint empty_point(const LinkConfig& config, double snr_db) {
    SimPoint p;
    p.snr_db = snr_db;
    const auto n = static_cast<std::size_t>(config.n_max);
    p.round_histogram.assign(n, 0);
    p.fail_through.assign(n, 0);
    p.success_then_fail.assign(n, 0);
    // Coded packets report the rate-1/2 information bits, ignoring the tail.
    p.bits_per_packet = config.coded ? config.packet_symbols : 2 * config.packet_symbols;
    return p;
}

}  // namespace

int ml_detect(const CMatrix& y, const std::vector<CMatrix>& hypotheses, int cols) {
    int best = -1;
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        const double v = (y.leftCols(cols) - hypotheses[i].leftCols(cols)).squaredNorm();
        if (v < best_metric) {
            best_metric = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int alamouti_decoupled_detect(const CMatrix& y, const ChannelMatrix& h, const SymbolSet& symbols) {
    if (h.lt() != 2 || y.cols() < 2) {
        throw std::invalid_argument("alamouti_decoupled_detect: needs L_t = 2 and two columns");
    }
    std::complex<double> e1 = 0.0;
    std::complex<double> e2 = 0.0;
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const auto h1 = h.matrix()(r, 0);
        const auto h2 = h.matrix()(r, 1);
        e1 += std::conj(h1) * y(r, 0) + h2 * std::conj(y(r, 1));
        e2 += std::conj(h2) * y(r, 0) - h1 * std::conj(y(r, 1));
    }
    std::uint32_t label = 0;
    label |= e1.real() < 0.0 ? 1u : 0u;
    label |= (e1.imag() < 0.0 ? 1u : 0u) << 1;
    label |= (e2.real() < 0.0 ? 1u : 0u) << 2;
    label |= (e2.imag() < 0.0 ? 1u : 0u) << 3;
    const auto it = std::find(symbols.labels.begin(), symbols.labels.end(), label);
    return static_cast<int>(it - symbols.labels.begin());
}

SimPoint simulate_trials(const LinkConfig& config, double snr_db, std::uint64_t first_trial, std::uint64_t trials) {
    const Geometry g = validate(config);
    const SymbolSet symbols = modulation::qpsk_symbol_set(config.code.k());
    const SnrPoint snr = SnrPoint::from_db(snr_db);
    SimPoint point = empty_point(config, snr_db);
    for (std::uint64_t t = first_trial; t < first_trial + trials; ++t) {
        accumulate(point, run_trial(config, g, symbols, snr, t), g, config.n_max);
    }
    return point;
}

SimPoint simulate_point(const LinkConfig& config, double snr_db) {
    const Geometry g = validate(config);
    const SymbolSet symbols = modulation::qpsk_symbol_set(config.code.k());
    const SnrPoint snr = SnrPoint::from_db(snr_db);
    SimPoint point = empty_point(config, snr_db);
    for (std::uint64_t t = 0; t < config.max_trials; ++t) {
        if (t >= config.min_trials && config.min_errors > 0 && point.failures >= config.min_errors) {
            break;
        }
        accumulate(point, run_trial(config, g, symbols, snr, t), g, config.n_max);
    }
    return point;
}

SimStats run(const LinkConfig& config) {
    SimStats stats;
    stats.config = config;
    for (double db : config.snr_db) {
        stats.points.push_back(simulate_point(config, db));
    }
    return stats;
}

SimStats run_uncoded(LinkConfig config) {
    config.coded = false;
    return run(config);
}

SimStats run_coded(LinkConfig config) {
    config.coded = true;
    return run(config);
}

}  // namespace linksim
}  // namespace mimoarq
