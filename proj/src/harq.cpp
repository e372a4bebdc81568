#include "mimoarq/harq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mimoarq {

RoundRates::RoundRates(std::vector<double> rates) : rates_(std::move(rates)) {
    if (rates_.empty()) {
        throw std::invalid_argument("RoundRates: at least one round is required");
    }
    for (std::size_t n = 0; n < rates_.size(); ++n) {
        if (!(rates_[n] >= 0.0) || !std::isfinite(rates_[n])) {
            throw std::invalid_argument("RoundRates: rates must be finite and nonnegative");
        }
        if (n > 0 && rates_[n] > rates_[n - 1]) {
            throw std::invalid_argument("RoundRates: rates must be nonincreasing across rounds");
        }
    }
}

double RoundRates::rate(int n) const {
    if (n <= 0) {
        return std::numeric_limits<double>::infinity();
    }
    if (n > n_max()) {
        return 0.0;
    }
    return rates_[static_cast<std::size_t>(n - 1)];
}

namespace harq {
namespace {

void check_probs(const RoundRates& rates, std::span<const double> probs) {
    if (static_cast<int>(probs.size()) != rates.n_max()) {
        throw std::invalid_argument("success probabilities must have one entry per round");
    }
    double prev = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("success probabilities must lie in [0,1]");
        }
        if (p < prev) {
            throw std::invalid_argument("success probabilities must be nondecreasing in n");
        }
        prev = p;
    }
}

double sample_std_error(std::span<const double> rewards) {
    const double m = static_cast<double>(rewards.size());
    if (rewards.size() < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / m;
    double ss = 0.0;
    for (double r : rewards) {
        ss += (r - mean) * (r - mean);
    }
    return std::sqrt(ss / (m - 1.0) / m);
}

/// Upper envelope of lines y = slope * x + intercept over a fixed sorted set
/// of query abscissae.
class LiChaoMax {
public:
    explicit LiChaoMax(std::vector<double> xs) : xs_(std::move(xs)), tree_(4 * xs_.size() + 4) {}

    void insert(double slope, double intercept) { insert(1, 0, last(), Line{slope, intercept, true}); }

    double query(std::size_t pos) const {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t node = 1;
        std::size_t l = 0;
        std::size_t r = last();
        const double x = xs_[pos];
        while (true) {
            const Line& ln = tree_[node];
            if (ln.valid) {
                best = std::max(best, ln.at(x));
            }
            if (l == r) {
                break;
            }
            const std::size_t mid = (l + r) / 2;
            if (pos <= mid) {
                node = 2 * node;
                r = mid;
            } else {
                node = 2 * node + 1;
                l = mid + 1;
            }
        }
        return best;
    }

private:
    struct Line {
        double slope = 0.0;
        double intercept = 0.0;
        bool valid = false;
        double at(double x) const { return slope * x + intercept; }
    };

    std::size_t last() const { return xs_.size() - 1; }

    void insert(std::size_t node, std::size_t l, std::size_t r, Line nw) {
        while (true) {
            Line& cur = tree_[node];
            if (!cur.valid) {
                cur = nw;
                return;
            }
            const std::size_t mid = (l + r) / 2;
            if (nw.at(xs_[mid]) > cur.at(xs_[mid])) {
                std::swap(cur, nw);
            }
            if (l == r) {
                return;
            }
            if (nw.at(xs_[l]) > cur.at(xs_[l])) {
                node = 2 * node;
                r = mid;
            } else if (nw.at(xs_[r]) > cur.at(xs_[r])) {
                node = 2 * node + 1;
                l = mid + 1;
            } else {
                return;
            }
        }
    }

    std::vector<double> xs_;
    std::vector<Line> tree_;
};

std::vector<double> ir_rewards(const CapacitySampleSet& samples, const std::vector<double>& rates) {
    std::vector<double> rewards;
    rewards.reserve(samples.count());
    for (double c : samples.values) {
        double r = 0.0;
        for (double rn : rates) {
            if (c >= rn) {
                r = rn;
                break;
            }
        }
        rewards.push_back(r);
    }
    return rewards;
}

}  // namespace

double avg_rate_from_probs(const RoundRates& rates, std::span<const double> success_probs) {
    check_probs(rates, success_probs);
    double acc = 0.0;
    for (int n = 1; n <= rates.n_max(); ++n) {
        acc += (rates.rate(n) - rates.rate(n + 1)) * success_probs[static_cast<std::size_t>(n - 1)];
    }
    return acc;
}

double avg_rate_from_probs_direct(const RoundRates& rates, std::span<const double> success_probs) {
    check_probs(rates, success_probs);
    double acc = 0.0;
    double prev = 0.0;
    for (int n = 1; n <= rates.n_max(); ++n) {
        const double p = success_probs[static_cast<std::size_t>(n - 1)];
        acc += rates.rate(n) * (p - prev);
        prev = p;
    }
    return acc;
}

double cc_equiv_capacity(const ChannelMatrix& h, SnrPoint snr, int n) {
    if (n < 1) {
        throw std::invalid_argument("cc_equiv_capacity: round index must be >= 1");
    }
    const SnrPoint combined = SnrPoint::from_linear(n * snr.linear());
    return channel::mimo_mutual_info(h, combined) / n;
}

double ir_equiv_capacity(const ChannelMatrix& h, SnrPoint snr) { return channel::mimo_mutual_info(h, snr); }

AvgRateResult optimize_ir_rates(const CapacitySampleSet& samples, int n_max) {
    if (samples.count() == 0) {
        throw std::invalid_argument("optimize_ir_rates: empty sample set");
    }
    if (n_max < 1) {
        throw std::invalid_argument("optimize_ir_rates: deadline must be >= 1");
    }
    CapacitySampleSet sorted = samples;
    if (!sorted.finalized()) {
        sorted.finalize();
    }
    const double m = static_cast<double>(sorted.count());

    // Unique candidate thresholds c (ascending) and survival S(c) = P(C >= c).
    std::vector<double> c;
    std::vector<double> surv;
    for (std::size_t i = 0; i < sorted.count(); ++i) {
        if (c.empty() || sorted.values[i] != c.back()) {
            c.push_back(sorted.values[i]);
            surv.push_back(static_cast<double>(sorted.count() - i) / m);
        }
    }
    const std::size_t u = c.size();
    const auto N = static_cast<std::size_t>(n_max);

    // value[n][i]: best objective of rounds n..N-1 (0-based) given R^(n) = c[i].
    // value[N-1][i] = c_i S_i; value[n][i] = c_i S_i + max_{j<=i} (value[n+1][j] - c_j S_i).
    std::vector<std::vector<double>> value(N, std::vector<double>(u));
    for (std::size_t i = 0; i < u; ++i) {
        value[N - 1][i] = c[i] * surv[i];
    }
    // Query abscissae are the survival values, ascending.
    std::vector<double> xs(surv.rbegin(), surv.rend());
    for (std::size_t n = N - 1; n-- > 0;) {
        LiChaoMax hull(xs);
        for (std::size_t i = 0; i < u; ++i) {
            hull.insert(-c[i], value[n + 1][i]);
            value[n][i] = c[i] * surv[i] + hull.query(u - 1 - i);
        }
    }

    const double best = *std::max_element(value[0].begin(), value[0].end());
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    std::vector<std::size_t> idx(N);
    idx[0] = static_cast<std::size_t>(
        std::find_if(value[0].begin(), value[0].end(), [&](double v) { return v >= best - tol; }) -
        value[0].begin());
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const std::size_t i = idx[n];
        const double target = value[n][i] - tol;
        for (std::size_t j = 0; j <= i; ++j) {
            if (c[i] * surv[i] + value[n + 1][j] - c[j] * surv[i] >= target) {
                idx[n + 1] = j;
                break;
            }
        }
    }

    std::vector<double> rates(N);
    AvgRateResult out;
    for (std::size_t n = 0; n < N; ++n) {
        rates[n] = c[idx[n]];
        out.success_probs.push_back(surv[idx[n]]);
    }
    out.optimal_rates = RoundRates(rates);
    out.avg_rate = avg_rate_from_probs(out.optimal_rates, out.success_probs);
    out.std_error = sample_std_error(ir_rewards(sorted, rates));
    out.samples_used = sorted.count();
    return out;
}

AvgRateResult optimize_ir_rates(const CapacitySampleSet& samples, std::span<const int> slot_lengths) {
    if (samples.count() == 0) {
        throw std::invalid_argument("optimize_ir_rates: empty sample set");
    }
    if (slot_lengths.empty()) {
        throw std::invalid_argument("optimize_ir_rates: deadline must be >= 1");
    }
    ScalarRateProblem problem;
    int cum = 0;
    for (std::size_t n = 0; n < slot_lengths.size(); ++n) {
        if (slot_lengths[n] < 1) {
            throw std::invalid_argument("optimize_ir_rates: slot lengths must be positive");
        }
        cum += slot_lengths[n];
        std::vector<double> col(samples.values.size());
        std::transform(samples.values.begin(), samples.values.end(), col.begin(),
                       [cum](double v) { return cum * v; });
        problem.cumulative.push_back(std::move(col));
        problem.divisors.push_back(cum);
    }
    for (std::size_t n = 0; n < slot_lengths.size(); ++n) {
        const double next = n + 1 < slot_lengths.size() ? 1.0 / problem.divisors[n + 1] : 0.0;
        problem.weights.push_back(1.0 / problem.divisors[n] - next);
    }
    return optimize_scalar_rate(problem);
}

AvgRateResult evaluate_scalar_rate(const ScalarRateProblem& problem, double rate) {
    const std::size_t rounds = problem.cumulative.size();
    if (rounds == 0 || problem.weights.size() != rounds || problem.divisors.size() != rounds) {
        throw std::invalid_argument("scalar rate problem: inconsistent round count");
    }
    const std::size_t m = problem.cumulative[0].size();
    if (m == 0) {
        throw std::invalid_argument("scalar rate problem: empty sample set");
    }
    AvgRateResult out;
    std::vector<double> rewards(m, 0.0);
    std::vector<double> rates;
    for (std::size_t n = 0; n < rounds; ++n) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (problem.cumulative[n][i] >= rate) {
                ++hits;
                rewards[i] += rate * problem.weights[n];
            }
        }
        out.success_probs.push_back(static_cast<double>(hits) / static_cast<double>(m));
        rates.push_back(rate / problem.divisors[n]);
    }
    out.optimal_rates = RoundRates(rates);
    double acc = 0.0;
    for (std::size_t n = 0; n < rounds; ++n) {
        acc += problem.weights[n] * out.success_probs[n];
    }
    out.avg_rate = rate * acc;
    out.std_error = sample_std_error(rewards);
    out.samples_used = m;
    return out;
}

AvgRateResult optimize_scalar_rate(const ScalarRateProblem& problem) {
    const std::size_t rounds = problem.cumulative.size();
    if (rounds == 0 || problem.weights.size() != rounds || problem.divisors.size() != rounds) {
        throw std::invalid_argument("scalar rate problem: inconsistent round count");
    }
    const std::size_t m = problem.cumulative[0].size();
    if (m == 0) {
        throw std::invalid_argument("scalar rate problem: empty sample set");
    }
    std::vector<std::vector<double>> sorted(rounds);
    std::vector<double> candidates;
    candidates.reserve(rounds * m);
    for (std::size_t n = 0; n < rounds; ++n) {
        if (problem.cumulative[n].size() != m) {
            throw std::invalid_argument("scalar rate problem: ragged sample arrays");
        }
        sorted[n] = problem.cumulative[n];
        std::sort(sorted[n].begin(), sorted[n].end());
        candidates.insert(candidates.end(), sorted[n].begin(), sorted[n].end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Sweep candidates upward; below[n] = #samples of round n strictly below R.
    std::vector<std::size_t> below(rounds, 0);
    double best_value = -1.0;
    double best_rate = 0.0;
    for (double r : candidates) {
        if (r <= 0.0) {
            continue;
        }
        double acc = 0.0;
        for (std::size_t n = 0; n < rounds; ++n) {
            while (below[n] < m && sorted[n][below[n]] < r) {
                ++below[n];
            }
            acc += problem.weights[n] * static_cast<double>(m - below[n]);
        }
        const double v = r * acc / static_cast<double>(m);
        if (v > best_value + 1e-12 * std::max(1.0, best_value)) {
            best_value = v;
            best_rate = r;
        }
    }
    return evaluate_scalar_rate(problem, best_rate);
}

AvgRateResult optimize_cc_rate(std::span<const ChannelMatrix> channels, SnrPoint snr, int n_max) {
    if (channels.empty()) {
        throw std::invalid_argument("optimize_cc_rate: empty channel set");
    }
    if (n_max < 1) {
        throw std::invalid_argument("optimize_cc_rate: deadline must be >= 1");
    }
    ScalarRateProblem problem;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<double> col;
        col.reserve(channels.size());
        const SnrPoint combined = SnrPoint::from_linear(n * snr.linear());
        for (const auto& h : channels) {
            col.push_back(channel::mimo_mutual_info(h, combined));
        }
        problem.cumulative.push_back(std::move(col));
        problem.divisors.push_back(n);
        problem.weights.push_back(n < n_max ? 1.0 / n - 1.0 / (n + 1) : 1.0 / n);
    }
    return optimize_scalar_rate(problem);
}

AvgRateResult optimize_cc_rate(SnrPoint snr, int lt, int lr, int n_max, std::size_t mc, std::uint64_t seed) {
    if (mc < 1000) {
        throw std::invalid_argument("optimize_cc_rate: sample budget must be >= 1000");
    }
    const auto channels = channel::sample_channels(lt, lr, mc, seed);
    return optimize_cc_rate(channels, snr, n_max);
}

ErgodicResult ergodic_capacity(const CapacitySampleSet& samples) {
    if (samples.count() == 0) {
        throw std::invalid_argument("ergodic_capacity: empty sample set");
    }
    ErgodicResult out;
    out.capacity = std::accumulate(samples.values.begin(), samples.values.end(), 0.0) /
                   static_cast<double>(samples.count());
    out.std_error = sample_std_error(samples.values);
    return out;
}

ErgodicResult ergodic_capacity(SnrPoint snr, int lt, int lr, std::size_t mc, std::uint64_t seed) {
    if (mc < 1000) {
        throw std::invalid_argument("ergodic_capacity: sample budget must be >= 1000");
    }
    const auto channels = channel::sample_channels(lt, lr, mc, seed);
    return ergodic_capacity(channel::capacity_samples(channels, snr));
}

double miso_ir_avg_rate(const RoundRates& rates, SnrPoint snr, int lt) {
    std::vector<double> probs;
    for (int n = 1; n <= rates.n_max(); ++n) {
        probs.push_back(1.0 - channel::miso_capacity_cdf(rates.rate(n), snr, lt));
    }
    return avg_rate_from_probs(rates, probs);
}

double miso_cc_avg_rate(double rate, int n_max, SnrPoint snr, int lt) {
    if (snr.linear() <= 0.0) {
        return 0.0;
    }
    const double x = std::expm1(rate * std::log(2.0)) * lt;
    double acc = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const double upper = n == 1 ? 1.0 : channel::chi2_cdf(x / ((n - 1) * snr.linear()), lt);
        const double lower = channel::chi2_cdf(x / (n * snr.linear()), lt);
        acc += rate / n * (upper - lower);
    }
    return acc;
}

}  // namespace harq
}  // namespace mimoarq
