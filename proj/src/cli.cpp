#include "mimoarq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "mimoarq/channel.hpp"
#include "mimoarq/errors.hpp"
#include "mimoarq/errprob.hpp"
#include "mimoarq/harq.hpp"
#include "mimoarq/ldc.hpp"
#include "mimoarq/linksim.hpp"
#include "mimoarq/modulation.hpp"

namespace mimoarq::cli {
namespace {

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    while (begin < end && *begin == ' ') {
        ++begin;
    }
    while (end > begin && end[-1] == ' ') {
        --end;
    }
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
        throw std::invalid_argument("bad SNR value '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (const auto& s : items) {
        out += (out.empty() ? "" : sep) + s;
    }
    return out;
}

std::string grid_text(const std::vector<double>& grid) {
    std::vector<std::string> items;
    for (double v : grid) {
        items.push_back(format_double(v));
    }
    return join(items, ",");
}

LdcCode load_code(const CodeSource& src) {
    if (!src.file.empty()) {
        return ldc::load_ldc_file(src.file);
    }
    return ldc::zoo(src.name, src.lt, src.rounds);
}

void echo_code(ConfigEcho& echo, const CodeSource& src) {
    if (!src.file.empty()) {
        echo.emplace_back("code_file", src.file);
    } else {
        echo.emplace_back("code", src.name);
    }
    echo.emplace_back("lt", std::to_string(src.lt));
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw std::invalid_argument("SNR range must be start:step:stop");
        }
        const double start = parse_number(parts[0]);
        const double step = parse_number(parts[1]);
        const double stop = parse_number(parts[2]);
        if (!(step > 0.0)) {
            throw std::invalid_argument("SNR step must be positive");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            grid.push_back(start + static_cast<double>(i) * step);
        }
    } else {
        for (const auto& item : split(text, ',')) {
            if (!item.empty()) {
                grid.push_back(parse_number(item));
            }
        }
    }
    if (grid.empty()) {
        throw std::invalid_argument("SNR grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("SNR grid must be strictly increasing");
        }
    }
    return grid;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string config_line(const ConfigEcho& echo) {
    std::string line = "# config:";
    for (const auto& [key, value] : echo) {
        line += " " + key + "=" + value;
    }
    return line;
}

void cmd_capacity_cdf(const CapacityCdfOptions& opts, std::ostream& csv) {
    if (opts.points < 2) {
        throw std::invalid_argument("capacity-cdf needs at least 2 rate points");
    }
    if (opts.samples < 1) {
        throw std::invalid_argument("capacity-cdf needs at least 1 sample");
    }
    csv << config_line({{"command", "capacity-cdf"},
                        {"lt", std::to_string(opts.lt)},
                        {"lr", std::to_string(opts.lr)},
                        {"snr_db", grid_text(opts.snr_db)},
                        {"samples", std::to_string(opts.samples)},
                        {"points", std::to_string(opts.points)},
                        {"seed", std::to_string(opts.seed)}})
        << '\n';
    const bool miso = opts.lr == 1;
    csv << "snr_db,rate,empirical_cdf" << (miso ? ",closed_form_cdf" : "") << '\n';
    const auto channels = channel::sample_channels(opts.lt, opts.lr, opts.samples, opts.seed);
    for (double db : opts.snr_db) {
        const SnrPoint snr = SnrPoint::from_db(db);
        const auto samples = channel::capacity_samples(channels, snr);
        const double top = samples.values.back();
        for (int p = 0; p < opts.points; ++p) {
            const double rate = top * p / (opts.points - 1);
            csv << format_double(db) << ',' << format_double(rate) << ',' << format_double(samples.cdf(rate));
            if (miso) {
                csv << ',' << format_double(channel::miso_capacity_cdf(rate, snr, opts.lt));
            }
            csv << '\n';
        }
    }
}

void cmd_avg_rate(const AvgRateOptions& opts, std::ostream& csv) {
    if (opts.n_max < 1) {
        throw std::invalid_argument("--n-max must be >= 1");
    }
    // Resolve every protocol up front so that unknown names fail before any work.
    std::vector<std::optional<LdcCode>> codes;
    for (const auto& p : opts.protocols) {
        if (p.rfind("ldc:", 0) == 0) {
            codes.emplace_back(ldc::zoo(p.substr(4), opts.lt, opts.n_max));
        } else if (p == "ldc") {
            if (opts.code_file.empty()) {
                throw std::invalid_argument("protocol 'ldc' needs --code-file");
            }
            codes.emplace_back(ldc::load_ldc_file(opts.code_file));
        } else if (p == "ir" || p == "cc" || p == "optimal-ldc" || p == "no-feedback" || p == "ergodic") {
            codes.emplace_back(std::nullopt);
        } else {
            throw NotFound("unknown protocol '" + p +
                           "'; known protocols: ir, cc, ldc:<name>, ldc, optimal-ldc, no-feedback, ergodic");
        }
    }
    ConfigEcho echo{{"command", "avg-rate"},
                    {"lt", std::to_string(opts.lt)},
                    {"lr", std::to_string(opts.lr)},
                    {"n_max", std::to_string(opts.n_max)},
                    {"snr_db", grid_text(opts.snr_db)},
                    {"samples", std::to_string(opts.samples)},
                    {"protocols", join(opts.protocols, ",")}};
    if (!opts.code_file.empty()) {
        echo.emplace_back("code_file", opts.code_file);
    }
    echo.emplace_back("seed", std::to_string(opts.seed));
    csv << config_line(echo) << '\n';
    csv << "protocol,snr_db,avg_rate,std_error,r_star\n";

    const auto channels = channel::sample_channels(opts.lt, opts.lr, opts.samples, opts.seed);
    const std::vector<int> unit_rounds(static_cast<std::size_t>(opts.n_max), 1);
    for (double db : opts.snr_db) {
        const SnrPoint snr = SnrPoint::from_db(db);
        const auto samples = channel::capacity_samples(channels, snr);
        for (std::size_t i = 0; i < opts.protocols.size(); ++i) {
            const std::string& p = opts.protocols[i];
            std::string value;
            std::string err;
            std::string r_star;
            if (p == "ergodic") {
                const auto e = harq::ergodic_capacity(samples);
                value = format_double(e.capacity);
                err = format_double(e.std_error);
            } else {
                AvgRateResult r;
                if (p == "ir") {
                    r = harq::optimize_ir_rates(samples, opts.n_max);
                } else if (p == "no-feedback") {
                    r = harq::optimize_ir_rates(samples, 1);
                } else if (p == "cc") {
                    r = harq::optimize_cc_rate(channels, snr, opts.n_max);
                } else if (p == "optimal-ldc") {
                    r = ldc::optimal_ldc_avg_rate(channels, snr, unit_rounds);
                } else {
                    const LdcCode& code = *codes[i];
                    if (code.lt() != opts.lt) {
                        throw std::invalid_argument("code '" + code.name() + "' needs --lt " +
                                                    std::to_string(code.lt()));
                    }
                    r = ldc::avg_rate_ldc(code, channels, snr, std::min(opts.n_max, code.rounds()));
                }
                value = format_double(r.avg_rate);
                err = format_double(r.std_error);
                r_star = format_double(r.optimal_rates.rate(1));
            }
            csv << p << ',' << format_double(db) << ',' << value << ',' << err << ',' << r_star << '\n';
        }
    }
}

void cmd_check_ldc(const CheckLdcOptions& opts, std::ostream& csv) {
    const LdcCode code = load_code(opts.code);
    ConfigEcho echo{{"command", "check-ldc"}};
    echo_code(echo, opts.code);
    echo.emplace_back("rounds", std::to_string(code.rounds()));
    echo.emplace_back("lr", std::to_string(opts.lr));
    echo.emplace_back("snr_db", grid_text(opts.snr_db));
    echo.emplace_back("audit", std::to_string(opts.audit));
    echo.emplace_back("seed", std::to_string(opts.seed));
    csv << config_line(echo) << '\n';

    ldc::Criterion1Options c1;
    c1.snr_db = opts.snr_db;
    c1.mc = opts.audit;
    c1.seed = opts.seed;
    const auto report = ldc::check_criterion1(code, opts.lr, c1);
    const auto per_round = ldc::check_power(code, PowerLevel::PerRound);
    const auto per_symbol = ldc::check_power(code, PowerLevel::PerSymbol);
    const auto isotropic = ldc::check_power(code, PowerLevel::Isotropic);
    auto verdict = [](bool pass) { return std::string(pass ? "pass" : "fail"); };

    csv << "round,criterion1,mi_gap,theorem1,theorem1_residual,corollary2,corollary2_residual,"
           "power_per_round,power_per_symbol,power_isotropic\n";
    for (const auto& cert : report.per_round) {
        const bool thm_pass = cert.theorem1_residual < ldc::kTheorem1Tol;
        std::string cor = "not-applicable";
        std::string cor_res;
        if (cert.corollary2_residual) {
            cor_res = format_double(*cert.corollary2_residual);
            if (report.corollary2_applicable) {
                cor = verdict(*cert.corollary2_residual < ldc::kTheorem1Tol);
            }
        }
        csv << cert.round << ',' << verdict(cert.criterion1_pass) << ',' << format_double(cert.mi_gap) << ','
            << (report.theorem1_applicable ? verdict(thm_pass) : "not-applicable") << ','
            << format_double(cert.theorem1_residual) << ',' << cor << ',' << cor_res << ','
            << verdict(per_round.pass) << ',' << verdict(per_symbol.pass) << ',' << verdict(isotropic.pass) << '\n';
    }
}

void cmd_pwep(const PwepOptions& opts, std::ostream& csv) {
    const LdcCode code = load_code(opts.code);
    if (opts.n_max < 1 || opts.n_max > code.rounds()) {
        throw std::invalid_argument("--n-max must lie in [1, " + std::to_string(code.rounds()) + "]");
    }
    const SymbolSet symbols = modulation::qpsk_symbol_set(code.k());
    // Refuse before writing anything if the largest n is over budget.
    const auto work = errprob::union_bound_work(symbols.size(), opts.n_max, opts.h_samples);
    if (work > opts.budget) {
        throw WorkBudgetExceeded(work, opts.budget);
    }
    ConfigEcho echo{{"command", "pwep"}};
    echo_code(echo, opts.code);
    echo.emplace_back("lr", std::to_string(opts.lr));
    echo.emplace_back("n_max", std::to_string(opts.n_max));
    echo.emplace_back("snr_db", grid_text(opts.snr_db));
    echo.emplace_back("h_samples", std::to_string(opts.h_samples));
    echo.emplace_back("mc_per_h", std::to_string(opts.mc_per_h));
    echo.emplace_back("budget", std::to_string(opts.budget));
    echo.emplace_back("seed", std::to_string(opts.seed));
    csv << config_line(echo) << '\n';
    csv << "snr_db,n,union_bound,bound_stderr\n";
    errprob::UnionBoundOptions ub;
    ub.lr = opts.lr;
    ub.h_samples = opts.h_samples;
    ub.mc_per_h = opts.mc_per_h;
    ub.seed = opts.seed;
    ub.work_budget = opts.budget;
    for (double db : opts.snr_db) {
        for (int n = 1; n <= opts.n_max; ++n) {
            const auto r = errprob::union_bound(code, symbols, SnrPoint::from_db(db), n, ub);
            csv << format_double(db) << ',' << n << ',' << format_double(r.bound) << ',' << format_double(r.std_error)
                << '\n';
        }
    }
}

void cmd_linksim(const LinksimOptions& opts, std::ostream& csv) {
    LinkConfig config;
    config.code = load_code(opts.code);
    config.n_max = opts.n_max;
    config.lr = opts.lr;
    config.snr_db = opts.snr_db;
    config.packet_symbols = opts.packet_symbols;
    config.coded = opts.coded;
    config.max_trials = opts.max_trials;
    config.min_errors = opts.min_errors;
    config.seed = opts.seed;
    config.interleaver_rows = opts.interleaver_rows;
    config.interleaver_cols = opts.interleaver_cols;

    ConfigEcho echo{{"command", "linksim"}};
    echo_code(echo, opts.code);
    echo.emplace_back("mode", opts.coded ? "coded" : "uncoded");
    echo.emplace_back("lr", std::to_string(opts.lr));
    echo.emplace_back("n_max", std::to_string(opts.n_max));
    echo.emplace_back("snr_db", grid_text(opts.snr_db));
    echo.emplace_back("packet_symbols", std::to_string(opts.packet_symbols));
    echo.emplace_back("trials", std::to_string(opts.max_trials));
    echo.emplace_back("min_errors", std::to_string(opts.min_errors));
    if (opts.coded) {
        echo.emplace_back("interleaver",
                          std::to_string(opts.interleaver_rows) + "x" + std::to_string(opts.interleaver_cols));
    }
    echo.emplace_back("seed", std::to_string(opts.seed));
    csv << config_line(echo) << '\n';
    csv << "snr_db,per,per_stderr,avg_rate";
    for (int n = 1; n <= opts.n_max; ++n) {
        csv << ",round_" << n << "_frac";
    }
    csv << ",trials\n";
    for (const auto& p : linksim::run(config).points) {
        csv << format_double(p.snr_db) << ',' << format_double(p.per()) << ',' << format_double(p.per_stderr())
            << ',' << format_double(p.avg_rate());
        for (int n = 1; n <= opts.n_max; ++n) {
            csv << ',' << format_double(p.round_fraction(n));
        }
        csv << ',' << p.trials << '\n';
    }
}

namespace {

struct Output {
    std::string path;
    std::string title;
};

std::string gnuplot_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out += c == '\'' ? std::string("''") : std::string(1, c);
    }
    return out + "'";
}

void write_plot(const std::string& script, const std::string& command, const std::vector<Output>& outputs,
                const std::vector<std::string>& protocols) {
    std::ofstream out(script);
    if (!out) {
        throw std::invalid_argument("cannot write plot script '" + script + "'");
    }
    out << "set datafile separator ','\n";
    out << "set grid\n";
    out << "set key left top\n";
    std::vector<std::string> series;
    if (command == "capacity-cdf") {
        out << "set xlabel 'rate (bits/channel use)'\nset ylabel 'CDF'\n";
        series.push_back(gnuplot_quote(outputs[0].path) + " using 2:3 with lines title 'empirical'");
        series.push_back(gnuplot_quote(outputs[0].path) + " using 2:4 with lines title 'closed form'");
    } else if (command == "avg-rate") {
        out << "set xlabel 'SNR (dB)'\nset ylabel 'average rate (bits/channel use)'\n";
        for (const auto& p : protocols) {
            series.push_back(gnuplot_quote(outputs[0].path) + " using 2:(strcol(1) eq " + gnuplot_quote(p) +
                             " ? $3 : 1/0) with linespoints title " + gnuplot_quote(p));
        }
    } else if (command == "pwep") {
        out << "set logscale y\nset xlabel 'SNR (dB)'\nset ylabel 'union bound'\n";
        series.push_back(gnuplot_quote(outputs[0].path) + " using 1:3 with points title 'bound'");
    } else {
        out << "set logscale y\nset xlabel 'SNR (dB)'\nset ylabel 'PER'\n";
        for (const auto& o : outputs) {
            series.push_back(gnuplot_quote(o.path) + " using 1:2 with linespoints title " + gnuplot_quote(o.title));
        }
    }
    out << "plot " << join(series, ", \\\n     ") << '\n';
}

void add_common(CLI::App* sub, std::string& snr, std::uint64_t& seed, std::string& out, std::string& plot) {
    sub->add_option("--snr-db", snr, "SNR grid in dB: comma list or start:step:stop")->join(',');
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--out", out, "output CSV path (stdout when omitted)");
    sub->add_option("--plot", plot, "write a gnuplot script for the output");
}

void add_code(CLI::App* sub, CodeSource& code, std::string& codes) {
    sub->add_option("--code", codes, "built-in code name")->capture_default_str()->join(',');
    sub->add_option("--code-file", code.file, "code definition file");
    sub->add_option("--lt", code.lt, "transmit antennas")->capture_default_str();
}

template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty()) {
        fn(out);
        return;
    }
    std::ostringstream buffer;
    fn(buffer);
    std::ofstream file(path);
    if (!file) {
        throw std::invalid_argument("cannot write '" + path + "'");
    }
    file << buffer.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"MIMO hybrid-ARQ analysis and link simulation"};
    app.set_config("--config", "", "INI file with one section per subcommand; flags override it");
    app.require_subcommand(1);

    std::string snr;
    std::string out_path;
    std::string plot;
    std::string codes = "alamouti";
    std::uint64_t seed = kDefaultSeed;

    CapacityCdfOptions cdf;
    auto* cdf_cmd = app.add_subcommand("capacity-cdf", "empirical and closed-form CDF of the MIMO capacity");
    add_common(cdf_cmd, snr, seed, out_path, plot);
    cdf_cmd->add_option("--lt", cdf.lt, "transmit antennas")->capture_default_str();
    cdf_cmd->add_option("--lr", cdf.lr, "receive antennas")->capture_default_str();
    cdf_cmd->add_option("--trials", cdf.samples, "channel samples")->capture_default_str();
    cdf_cmd->add_option("--points", cdf.points, "rate grid points")->capture_default_str();

    AvgRateOptions avg;
    std::string protocols = join(avg.protocols, ",");
    auto* avg_cmd = app.add_subcommand("avg-rate", "optimal average rate per protocol");
    add_common(avg_cmd, snr, seed, out_path, plot);
    avg_cmd->add_option("--lt", avg.lt, "transmit antennas")->capture_default_str();
    avg_cmd->add_option("--lr", avg.lr, "receive antennas")->capture_default_str();
    avg_cmd->add_option("--n-max", avg.n_max, "ARQ deadline N")->capture_default_str();
    avg_cmd->add_option("--trials", avg.samples, "channel samples")->capture_default_str();
    avg_cmd->add_option("--protocol", protocols, "comma list: ir, cc, ldc:<name>, ldc, optimal-ldc, no-feedback, ergodic")
        ->capture_default_str()
        ->join(',');
    avg_cmd->add_option("--code-file", avg.code_file, "code file for protocol 'ldc'");

    CheckLdcOptions chk;
    auto* chk_cmd = app.add_subcommand("check-ldc", "criterion, theorem and power certificates of a code");
    add_common(chk_cmd, snr, seed, out_path, plot);
    add_code(chk_cmd, chk.code, codes);
    chk_cmd->add_option("--n-max", chk.code.rounds, "rounds for parameterized codes")->capture_default_str();
    chk_cmd->add_option("--lr", chk.lr, "receive antennas")->capture_default_str();
    chk_cmd->add_option("--trials", chk.audit, "channels in the criterion audit")->capture_default_str();

    PwepOptions pw;
    auto* pw_cmd = app.add_subcommand("pwep", "union bound on the n-th round error probability");
    add_common(pw_cmd, snr, seed, out_path, plot);
    add_code(pw_cmd, pw.code, codes);
    pw_cmd->add_option("--n-max", pw.n_max, "largest round n")->capture_default_str();
    pw_cmd->add_option("--lr", pw.lr, "receive antennas")->capture_default_str();
    pw_cmd->add_option("--trials", pw.h_samples, "channel samples")->capture_default_str();
    pw_cmd->add_option("--mc-per-h", pw.mc_per_h, "orthant samples per term")->capture_default_str();
    pw_cmd->add_option("--budget", pw.budget, "elementary term budget")->capture_default_str();

    LinksimOptions ls;
    std::string modes = "uncoded";
    std::string interleaver = "10x20";
    codes = "alamouti";
    auto* ls_cmd = app.add_subcommand("linksim", "packet-level HARQ simulation");
    add_common(ls_cmd, snr, seed, out_path, plot);
    add_code(ls_cmd, ls.code, codes);
    ls_cmd->add_option("--mode", modes, "comma list of uncoded, coded")->capture_default_str()->join(',');
    ls_cmd->add_option("--n-max", ls.n_max, "ARQ deadline N")->capture_default_str();
    ls_cmd->add_option("--lr", ls.lr, "receive antennas")->capture_default_str();
    ls_cmd->add_option("--trials", ls.max_trials, "trial cap per SNR point")->capture_default_str();
    ls_cmd->add_option("--min-errors", ls.min_errors, "stop after this many packet errors (0: never)")
        ->capture_default_str();
    ls_cmd->add_option("--packet-symbols", ls.packet_symbols, "QPSK symbols per packet")->capture_default_str();
    ls_cmd->add_option("--interleaver", interleaver, "ROWSxCOLS")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const auto grid = [&](std::vector<double> fallback) {
            return sub->count("--snr-db") == 0 ? fallback : parse_snr_grid(snr);
        };
        std::vector<Output> outputs;
        std::vector<std::string> protocol_list;
        const std::string& name = sub->get_name();
        if (name == "capacity-cdf") {
            cdf.snr_db = grid(cdf.snr_db);
            cdf.seed = seed;
            emit(out_path, out, [&](std::ostream& os) { cmd_capacity_cdf(cdf, os); });
        } else if (name == "avg-rate") {
            avg.snr_db = grid(avg.snr_db);
            avg.seed = seed;
            avg.protocols = split(protocols, ',');
            protocol_list = avg.protocols;
            emit(out_path, out, [&](std::ostream& os) { cmd_avg_rate(avg, os); });
        } else if (name == "check-ldc") {
            chk.snr_db = grid(chk.snr_db);
            chk.seed = seed;
            chk.code.name = codes;
            emit(out_path, out, [&](std::ostream& os) { cmd_check_ldc(chk, os); });
        } else if (name == "pwep") {
            pw.snr_db = grid(pw.snr_db);
            pw.seed = seed;
            pw.code.name = codes;
            emit(out_path, out, [&](std::ostream& os) { cmd_pwep(pw, os); });
        } else {
            ls.snr_db = grid(ls.snr_db);
            ls.seed = seed;
            const auto dims = split(interleaver, 'x');
            if (dims.size() != 2) {
                throw std::invalid_argument("--interleaver must be ROWSxCOLS");
            }
            ls.interleaver_rows = std::stoi(dims[0]);
            ls.interleaver_cols = std::stoi(dims[1]);
            const auto code_list = ls.code.file.empty() ? split(codes, ',') : std::vector<std::string>{"file"};
            const auto mode_list = split(modes, ',');
            for (const auto& m : mode_list) {
                if (m != "uncoded" && m != "coded") {
                    throw std::invalid_argument("unknown mode '" + m + "'; use uncoded or coded");
                }
            }
            for (const auto& c : code_list) {
                if (ls.code.file.empty()) {
                    ldc::zoo(c, ls.code.lt, ls.n_max);
                }
            }
            const bool many = code_list.size() * mode_list.size() > 1;
            for (const auto& c : code_list) {
                for (const auto& m : mode_list) {
                    LinksimOptions run_opts = ls;
                    run_opts.code.name = c;
                    run_opts.code.rounds = ls.n_max;
                    run_opts.coded = m == "coded";
                    std::string path = out_path;
                    if (many && !out_path.empty()) {
                        const std::filesystem::path base(out_path);
                        path = (base.parent_path() / (base.stem().string() + "_" + c + "_" + m +
                                                      base.extension().string()))
                                   .string();
                    }
                    outputs.push_back({path, c + " " + m});
                    emit(path, out, [&](std::ostream& os) { cmd_linksim(run_opts, os); });
                }
            }
        }
        if (!plot.empty()) {
            if (out_path.empty()) {
                throw std::invalid_argument("--plot needs --out so the script can reference the CSV");
            }
            if (outputs.empty()) {
                outputs.push_back({out_path, name});
            }
            write_plot(plot, name, outputs, protocol_list);
        }
    } catch (const WorkBudgetExceeded& e) {
        err << "refused: " << e.what() << '\n';
        return kExitBudget;
    } catch (const NotFound& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace mimoarq::cli
