#pragma once

#include <cstdint>
#include <vector>

#include "mimoarq/ldc.hpp"
#include "mimoarq/modulation.hpp"

namespace mimoarq {

struct LinkConfig {
    LdcCode code = ldc::alamouti();
    int n_max = 2;
    int lr = 1;
    std::vector<double> snr_db;
    /// QPSK symbols per packet; must be a multiple of K.
    int packet_symbols = 100;
    bool coded = false;
    /// Trials stop at min_errors packet errors or max_trials, whichever is
    /// first. min_errors = 0 always runs max_trials.
    std::uint64_t max_trials = 100'000;
    std::uint64_t min_errors = 100;
    /// Trials always run before the error-count stop applies.
    std::uint64_t min_trials = 0;
    std::uint64_t seed = kDefaultSeed;
    int interleaver_rows = 10;
    int interleaver_cols = 20;
};

/// Counters for one SNR point. All round-indexed vectors have N entries,
/// index n - 1 for round n.
struct SimPoint {
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    /// Packets still wrong after round N.
    std::uint64_t failures = 0;
    /// Trials that ended with an ACK at round n.
    std::vector<std::uint64_t> round_histogram;
    /// Trials whose decode was wrong at every round 1..n (P_e^(n)).
    std::vector<std::uint64_t> fail_through;
    /// Trials correct at round n - 1 and wrong at round n; entry 0 is unused.
    std::vector<std::uint64_t> success_then_fail;
    std::uint64_t accepted_bits = 0;
    std::uint64_t channel_uses = 0;
    int bits_per_packet = 0;

    double per() const;
    double per_stderr() const;
    double avg_rate() const;
    double round_fraction(int n) const;
    double pe(int n) const;
    double success_then_fail_rate(int n) const;
};

struct SimStats {
    LinkConfig config;
    std::vector<SimPoint> points;
};

namespace linksim {

/// Index of the hypothesis minimizing ||Y - S_i||_F^2 over the first `cols`
/// columns, lowest index on ties.
int ml_detect(const CMatrix& y, const std::vector<CMatrix>& hypotheses, int cols);

/// Alamouti detection at n = 2 by linear combining and per-symbol QPSK
/// slicing. Returns an index into a qpsk_symbol_set(2).
int alamouti_decoupled_detect(const CMatrix& y, const ChannelMatrix& h, const SymbolSet& symbols);

SimPoint simulate_point(const LinkConfig& config, double snr_db);
SimStats run(const LinkConfig& config);
SimStats run_uncoded(LinkConfig config);
SimStats run_coded(LinkConfig config);

/// Fixed-trial variant used for paired comparisons: runs exactly `trials`
/// trials regardless of error counts.
SimPoint simulate_trials(const LinkConfig& config, double snr_db, std::uint64_t first_trial, std::uint64_t trials);

}  // namespace linksim
}  // namespace mimoarq
