#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mimoarq/rng.hpp"

namespace mimoarq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

/// "0,5,10" or "start:step:stop" (inclusive). Throws std::invalid_argument on
/// malformed, empty, or non-increasing grids.
std::vector<double> parse_snr_grid(const std::string& text);

/// Shortest representation that round-trips.
std::string format_double(double v);

/// Resolved parameters of one run, echoed as the first CSV line.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;
std::string config_line(const ConfigEcho& echo);

struct CapacityCdfOptions {
    int lt = 2;
    int lr = 1;
    std::vector<double> snr_db{10.0};
    std::size_t samples = 100'000;
    int points = 50;
    std::uint64_t seed = kDefaultSeed;
};
void cmd_capacity_cdf(const CapacityCdfOptions& opts, std::ostream& csv);

struct AvgRateOptions {
    int lt = 2;
    int lr = 1;
    int n_max = 4;
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::size_t samples = 100'000;
    /// ir, cc, ldc:<name>, ldc (code file), optimal-ldc, no-feedback, ergodic.
    std::vector<std::string> protocols{"ergodic", "ir", "optimal-ldc", "cc", "no-feedback"};
    std::string code_file;
    std::uint64_t seed = kDefaultSeed;
};
void cmd_avg_rate(const AvgRateOptions& opts, std::ostream& csv);

struct CodeSource {
    std::string name = "alamouti";
    std::string file;
    int lt = 2;
    int rounds = 2;
};

struct CheckLdcOptions {
    CodeSource code;
    int lr = 1;
    std::vector<double> snr_db{0.0, 10.0, 20.0};
    std::size_t audit = 200;
    std::uint64_t seed = kDefaultSeed;
};
void cmd_check_ldc(const CheckLdcOptions& opts, std::ostream& csv);

struct PwepOptions {
    CodeSource code;
    int lr = 1;
    int n_max = 2;
    std::vector<double> snr_db{8.0, 12.0, 16.0, 20.0};
    std::size_t h_samples = 200;
    std::size_t mc_per_h = 200;
    std::uint64_t budget = 100'000'000;
    std::uint64_t seed = kDefaultSeed;
};
void cmd_pwep(const PwepOptions& opts, std::ostream& csv);

struct LinksimOptions {
    CodeSource code;
    int lr = 1;
    int n_max = 2;
    std::vector<double> snr_db{0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
    bool coded = false;
    int packet_symbols = 100;
    std::uint64_t max_trials = 100'000;
    std::uint64_t min_errors = 100;
    int interleaver_rows = 10;
    int interleaver_cols = 20;
    std::uint64_t seed = kDefaultSeed;
};
void cmd_linksim(const LinksimOptions& opts, std::ostream& csv);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mimoarq::cli
