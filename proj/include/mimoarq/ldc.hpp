#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimoarq/channel.hpp"
#include "mimoarq/harq.hpp"

namespace mimoarq {

/// Linear dispersion code X = sum_k s_k C_k + conj(s_k) D_k, with X an
/// L_t x T matrix split into ARQ rounds of T_1, ..., T_N columns.
class LdcCode {
public:
    LdcCode(std::string name, int lt, std::vector<int> round_lengths, std::vector<CMatrix> c_mats,
            std::vector<CMatrix> d_mats);

    const std::string& name() const { return name_; }
    int lt() const { return lt_; }
    int t_total() const { return t_total_; }
    int k() const { return static_cast<int>(c_.size()); }
    int rounds() const { return static_cast<int>(round_lengths_.size()); }
    const std::vector<int>& round_lengths() const { return round_lengths_; }
    /// T^(n) = T_1 + ... + T_n, 1-based; cumulative_slots(0) = 0.
    int cumulative_slots(int n) const;
    /// First column of round n (0-based column index).
    int round_start(int n) const { return cumulative_slots(n - 1); }

    const std::vector<CMatrix>& c_mats() const { return c_; }
    const std::vector<CMatrix>& d_mats() const { return d_; }
    CMatrix a_mat(int k) const { return c_[static_cast<std::size_t>(k)] + d_[static_cast<std::size_t>(k)]; }
    CMatrix b_mat(int k) const { return c_[static_cast<std::size_t>(k)] - d_[static_cast<std::size_t>(k)]; }
    bool has_conjugation() const;

    /// Codeword for symbol vector s, restricted to the first T^(n) columns.
    CMatrix codeword(const CVector& s, int n) const;
    CMatrix codeword(const CVector& s) const { return codeword(s, rounds()); }

private:
    std::string name_;
    int lt_;
    int t_total_;
    std::vector<int> round_lengths_;
    std::vector<CMatrix> c_;
    std::vector<CMatrix> d_;
};

enum class PowerLevel { PerRound, PerSymbol, Isotropic };

struct PowerCheck {
    bool pass = false;
    /// Largest absolute deviation from the target over rounds and symbols.
    double max_residual = 0.0;
};

struct RoundCertificate {
    int round = 0;
    bool criterion1_pass = false;
    /// max |C_ld^(n) - C_mimo| over the audit, bits per channel use.
    double mi_gap = 0.0;
    double theorem1_residual = 0.0;
    /// Empty when the code uses conjugation (D_k != 0).
    std::optional<double> corollary2_residual;
};

struct OptimalityReport {
    std::vector<RoundCertificate> per_round;
    /// K = L_t T and L_r >= L_t.
    bool theorem1_applicable = false;
    bool corollary2_applicable = false;
};

struct ResidualReport {
    bool applicable = false;
    std::vector<double> residuals;
};

namespace ldc {

inline constexpr double kTheorem1Tol = 1e-9;
inline constexpr double kCriterion1Tol = 1e-6;

/// Column prefix over the first T^(n) slots; rounds are truncated to n.
LdcCode prefix(const LdcCode& code, int n);

/// Real 2 L_r T^(n) x 2K matrix mapping (alpha_k, beta_k) = (Re s_k, Im s_k)
/// to [Re; Im] of vec(H X^(n)).
RMatrix real_equivalent_channel(const ChannelMatrix& h, const LdcCode& code, int n);

/// (1 / (2 T^(n))) log2 det(I + (snr/L_t) G G^T).
double ldc_mutual_info(const ChannelMatrix& h, const LdcCode& code, SnrPoint snr, int n);

/// U^(n) = [vec C_1^(n), ..., vec C_K^(n)], V^(n) likewise from D.
CMatrix u_matrix(const LdcCode& code, int n);
CMatrix v_matrix(const LdcCode& code, int n);

/// ||F F^H - I||_F per round with F = [U V; conj(V) conj(U)]. Residuals are
/// reported even when the hypothesis does not hold.
ResidualReport check_theorem1(const LdcCode& code, int lr);

/// ||U U^H - I||_F per round; not applicable when any D_k is nonzero.
ResidualReport check_corollary2(const LdcCode& code);

struct Criterion1Options {
    std::vector<double> snr_db{0.0, 10.0, 20.0};
    std::size_t mc = 200;
    double tol = kCriterion1Tol;
    std::uint64_t seed = kDefaultSeed;
};

OptimalityReport check_criterion1(const LdcCode& code, int lr, const Criterion1Options& opts = {});

PowerCheck check_power(const LdcCode& code, PowerLevel level, double tol = 1e-9);

/// Per-round weights T_{n+1} / (T^(n) T^(n+1)) with T^(N+1) = inf.
std::vector<double> round_weights(std::span<const int> round_lengths);

/// Objective sum_n w_n R P(T^(n) C_ld^(n) >= R) over shared channels using
/// the first n_max rounds of the code.
harq::ScalarRateProblem ldc_rate_problem(const LdcCode& code, std::span<const ChannelMatrix> channels,
                                         SnrPoint snr, int n_max);

/// Optimizes R when rate is empty, otherwise evaluates at the given R.
AvgRateResult avg_rate_ldc(const LdcCode& code, std::span<const ChannelMatrix> channels, SnrPoint snr, int n_max,
                           std::optional<double> rate = std::nullopt);
AvgRateResult avg_rate_ldc(const LdcCode& code, SnrPoint snr, int lr, int n_max, std::size_t mc, std::uint64_t seed,
                           std::optional<double> rate = std::nullopt);

/// Same objective with C_mimo in place of C_ld.
AvgRateResult optimal_ldc_avg_rate(std::span<const ChannelMatrix> channels, SnrPoint snr,
                                   std::span<const int> round_lengths);
AvgRateResult optimal_ldc_avg_rate(SnrPoint snr, int lt, int lr, std::span<const int> round_lengths,
                                   std::size_t mc, std::uint64_t seed);

/// All compositions of t_total into exactly n positive parts.
std::vector<std::vector<int>> round_partitions(int t_total, int n);

struct PartitionChoice {
    std::vector<int> round_lengths;
    AvgRateResult result;
};

/// Exhaustive search of optimal_ldc_avg_rate over round_partitions(t_total, n).
PartitionChoice best_round_partition(std::span<const ChannelMatrix> channels, SnrPoint snr, int t_total, int n);

// Built-in codes. Every one uses T_n = 1.
LdcCode alamouti();
LdcCode sm_repetition(int lt, int rounds);
LdcCode antenna_switching(int lt);
LdcCode cdd(int lt);
LdcCode golden();

/// Spatial multiplexing over a single slot, C_k = e_k.
LdcCode spatial_multiplexing(int lt);

/// Lookup by name; lt and rounds apply to the parameterized families.
/// Unknown names raise NotFound listing the known ones.
LdcCode zoo(const std::string& name, int lt = 2, int rounds = 2);
std::vector<std::string> zoo_names();

/// Text format:
///   name <label>
///   lt <L_t>
///   t <T>
///   k <K>
///   rounds <T_1> ... <T_N>
///   C <k>            followed by L_t rows of T "re,im" entries
///   D <k>            likewise
/// Lines starting with '#' and blank lines are ignored. Every C_k and D_k
/// must appear once. Numbers are written in shortest round-trip form.
void save_ldc(const LdcCode& code, std::ostream& out);
LdcCode load_ldc(std::istream& in);
LdcCode load_ldc_file(const std::string& path);

}  // namespace ldc
}  // namespace mimoarq
