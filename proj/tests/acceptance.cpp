// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mimoarq/channel.hpp"
#include "mimoarq/errprob.hpp"
#include "mimoarq/harq.hpp"
#include "mimoarq/ldc.hpp"
#include "mimoarq/linksim.hpp"
#include "mimoarq/modulation.hpp"
#include "mimoarq/orthant.hpp"

using namespace mimoarq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome miso_closed_form() {
    Outcome o;
    const auto hs = channel::sample_channels(2, 1, 100000, kDefaultSeed);
    double worst = 0.0;
    for (double db : {0.0, 10.0, 20.0}) {
        const auto snr = SnrPoint::from_db(db);
        const auto s = channel::capacity_samples(hs, snr);
        const auto ir = harq::optimize_ir_rates(s, 4);
        const double ir_cf = harq::miso_ir_avg_rate(ir.optimal_rates, snr, 2);
        const auto cc = harq::optimize_cc_rate(hs, snr, 4);
        const double cc_cf = harq::miso_cc_avg_rate(cc.optimal_rates.rate(1), 4, snr, 2);
        const double e_ir = std::abs(ir.avg_rate - ir_cf) / ir_cf;
        const double e_cc = std::abs(cc.avg_rate - cc_cf) / cc_cf;
        o.require(e_ir < 0.01, fmt("IR at %g dB off by %.3g", db, e_ir));
        o.require(e_cc < 0.01, fmt("CC at %g dB off by %.3g", db, e_cc));
        worst = std::max({worst, e_ir, e_cc});
    }
    o.note(fmt("max relative deviation %.2e", worst));
    return o;
}

Outcome capacity_cdf() {
    Outcome o;
    const auto hs = channel::sample_channels(2, 1, 100000, kDefaultSeed);
    const auto snr = SnrPoint::from_db(10.0);
    const auto s = channel::capacity_samples(hs, snr);
    const double ks = channel::kolmogorov_distance(s, [&](double r) { return channel::miso_capacity_cdf(r, snr, 2); });
    o.require(ks < 0.01, "Kolmogorov distance too large");
    o.note(fmt("Kolmogorov distance %.4g", ks));
    return o;
}

Outcome protocol_ordering() {
    Outcome o;
    const std::vector<int> slots(4, 1);
    for (int lr : {1, 2}) {
        const auto hs = channel::sample_channels(2, lr, 100000, kDefaultSeed);
        double tightest = 1e9;
        for (double db = 0.0; db <= 20.0; db += 4.0) {
            const auto snr = SnrPoint::from_db(db);
            const auto s = channel::capacity_samples(hs, snr);
            const auto erg = harq::ergodic_capacity(s);
            const auto ir = harq::optimize_ir_rates(s, 4);
            const auto opt = ldc::optimal_ldc_avg_rate(hs, snr, slots);
            const auto cc = harq::optimize_cc_rate(hs, snr, 4);
            const auto nf = harq::optimize_ir_rates(s, 1);
            const double v[5] = {erg.capacity, ir.avg_rate, opt.avg_rate, cc.avg_rate, nf.avg_rate};
            const double se[5] = {erg.std_error, ir.std_error, opt.std_error, cc.std_error, nf.std_error};
            const char* names[5] = {"ergodic", "IR", "optimal-LDC", "CC", "no-feedback"};
            for (int i = 0; i < 4; ++i) {
                const double gap = v[i] - v[i + 1];
                const double tol = 3.0 * std::hypot(se[i], se[i + 1]);
                o.require(gap >= -tol, std::string(names[i]) + " < " + names[i + 1] + fmt(" at %g dB, L_r=%g", db, lr));
                tightest = std::min(tightest, gap);
            }
        }
        const auto snr = SnrPoint::from_db(10.0);
        const auto s = channel::capacity_samples(hs, snr);
        const double erg = harq::ergodic_capacity(s).capacity;
        const double ir10 = harq::optimize_ir_rates(s, 10).avg_rate;
        const double shortfall = (erg - ir10) / erg;
        o.require(shortfall < 0.05, fmt("(2,%g): IR(N=10) not within 5%% of ergodic at 10 dB", lr));
        o.note(fmt("(2,%g) smallest adjacent gap %.3g, IR(10) shortfall at 10 dB %.2f%%", lr, tightest,
                   100.0 * shortfall));
    }
    return o;
}

Outcome certification() {
    Outcome o;
    const auto alam = ldc::check_criterion1(ldc::alamouti(), 1);
    for (const auto& r : alam.per_round) {
        o.require(r.criterion1_pass && r.mi_gap < 1e-6, fmt("alamouti round %g fails", r.round));
    }
    const auto golden = ldc::check_corollary2(ldc::golden());
    o.require(golden.applicable, "golden: corollary 2 not applicable");
    for (std::size_t n = 0; n < golden.residuals.size(); ++n) {
        o.require(golden.residuals[n] < 1e-9, fmt("golden round %g residual %.3g", n + 1.0, golden.residuals[n]));
    }
    const auto as = ldc::check_criterion1(ldc::antenna_switching(2), 1);
    o.require(!as.per_round[0].criterion1_pass && !as.per_round[1].criterion1_pass, "antenna switching passes a round");
    const auto sm = ldc::check_criterion1(ldc::sm_repetition(2, 2), 1);
    o.require(sm.per_round[0].criterion1_pass && !sm.per_round[1].criterion1_pass, "SM-repetition verdicts differ");
    const auto cdd = ldc::check_criterion1(ldc::cdd(2), 1);
    o.require(cdd.per_round[0].criterion1_pass && !cdd.per_round[1].criterion1_pass, "CDD verdicts differ");
    o.note(fmt("alamouti gap %.2e; golden residuals %.2e, %.2e", alam.per_round[1].mi_gap, golden.residuals[0],
               golden.residuals[1]));
    return o;
}

Outcome alamouti_rate() {
    Outcome o;
    const auto hs = channel::sample_channels(2, 1, 100000, kDefaultSeed);
    const std::vector<int> slots{1, 1};
    double worst = 0.0;
    for (double db = 0.0; db <= 20.0; db += 4.0) {
        const auto snr = SnrPoint::from_db(db);
        const auto a = ldc::avg_rate_ldc(ldc::alamouti(), hs, snr, 2);
        const auto opt = ldc::optimal_ldc_avg_rate(hs, snr, slots);
        const double z = std::abs(a.avg_rate - opt.avg_rate) / std::max(opt.std_error, 1e-300);
        o.require(z <= 3.0, fmt("differs by %.3g sigma at %g dB", z, db));
        worst = std::max(worst, z);
    }
    o.note(fmt("largest deviation %.3g sigma", worst));
    return o;
}

Outcome covariance_machinery() {
    Outcome o;
    const auto code = ldc::alamouti();
    const auto qpsk = modulation::qpsk_symbol_set(2);
    const int draws = 100000;
    int checks = 0;
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        CounterRng pick(kDefaultSeed, streams::kAudit, static_cast<std::uint64_t>(inst));
        const auto h = channel::sample_channel(2, 1, pick);
        const auto snr = SnrPoint::from_db(10.0 * pick.uniform());
        const auto j = static_cast<std::size_t>(pick.bits(4));
        std::vector<CVector> comp;
        for (int k = 0; k < 2; ++k) {
            std::size_t i = j;
            while (i == j) {
                i = static_cast<std::size_t>(pick.bits(4));
            }
            comp.push_back(qpsk.vectors[i]);
        }
        const auto cov = errprob::build_covariance(h, code, snr, qpsk.vectors[j], comp);
        const CMatrix d1 = errprob::difference_matrix(h, code, snr, comp[0], qpsk.vectors[j], 1);
        const CMatrix d2 = errprob::difference_matrix(h, code, snr, comp[1], qpsk.vectors[j], 2);
        double s[3] = {0, 0, 0};
        double s2[3] = {0, 0, 0};
        for (int d = 0; d < draws; ++d) {
            CounterRng rng(kDefaultSeed + 1, streams::kAudit,
                           static_cast<std::uint64_t>(inst) * draws + static_cast<std::uint64_t>(d));
            CMatrix z(1, 2);
            z(0, 0) = rng.complex_normal();
            z(0, 1) = rng.complex_normal();
            const double w1 = 2.0 * d1.cwiseProduct(z.leftCols(1).conjugate()).sum().real();
            const double w2 = 2.0 * d2.cwiseProduct(z.conjugate()).sum().real();
            const double p[3] = {w1 * w1, w1 * w2, w2 * w2};
            for (int e = 0; e < 3; ++e) {
                s[e] += p[e];
                s2[e] += p[e] * p[e];
            }
        }
        const double target[3] = {cov.r_w(0, 0), cov.r_w(0, 1), cov.r_w(1, 1)};
        for (int e = 0; e < 3; ++e) {
            const double mean = s[e] / draws;
            const double se = std::sqrt((s2[e] / draws - mean * mean) / draws);
            const double z = std::abs(mean - target[e]) / se;
            worst = std::max(worst, z);
            ++checks;
            o.require(z <= 3.0, fmt("instance %g entry %g off by %.3g sigma", inst, e, z));
        }
    }
    double worst_q = 0.0;
    for (double d2 : {0.1, 1.0, 10.0}) {
        PairwiseCovariance c;
        c.r_w = RMatrix::Constant(1, 1, 2.0 * d2);
        c.thresholds = Eigen::VectorXd::Constant(1, d2);
        const double exact = errprob::q_n(c, 1, kDefaultSeed).value;
        o.require(std::abs(exact - orthant::q_function(std::sqrt(d2 / 2.0))) < 1e-15, "q_1 is not the closed form");
        CounterRng rng(kDefaultSeed, streams::kOrthant, static_cast<std::uint64_t>(d2 * 10));
        const auto mc = orthant::below_indicator(c.r_w, -c.thresholds, 100000, rng);
        const double z = std::abs(mc.value - exact) / mc.std_error;
        worst_q = std::max(worst_q, z);
        o.require(z <= 3.0, fmt("q_1 at d2=%g off by %.3g sigma", d2, z));
    }
    o.note(fmt("%g covariance entries, worst %.2f sigma; q_1 worst %.2f sigma", checks, worst, worst_q));
    return o;
}

Outcome union_bound_validity() {
    Outcome o;
    const auto code = ldc::alamouti();
    const auto qpsk = modulation::qpsk_symbol_set(2);
    errprob::UnionBoundOptions ub_opts;
    ub_opts.h_samples = 3000;
    ub_opts.mc_per_h = 2;
    LinkConfig cfg;
    cfg.packet_symbols = 2;
    cfg.max_trials = 200000;
    cfg.min_errors = 0;
    double min_ratio = 1e300;
    for (double db = 8.0; db <= 20.0; db += 2.0) {
        const auto sim = linksim::simulate_point(cfg, db);
        for (int n = 1; n <= 2; ++n) {
            const auto ub = errprob::union_bound(code, qpsk, SnrPoint::from_db(db), n, ub_opts);
            const double pe = sim.pe(n);
            o.require(ub.bound > pe, fmt("n=%g at %g dB: bound below simulation", n, db));
            if (pe > 0.0) {
                min_ratio = std::min(min_ratio, ub.bound / pe);
            }
        }
    }
    o.note(fmt("smallest bound/simulation ratio %.3g", min_ratio));
    return o;
}

Outcome diversity_slopes() {
    Outcome o;
    const std::vector<double> grid{8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0};
    auto curve_for = [&](const LdcCode& code) {
        LinkConfig cfg;
        cfg.code = code;
        cfg.packet_symbols = code.k();
        cfg.min_errors = 100;
        std::vector<PerPoint> curve;
        for (double db : grid) {
            const bool tail = db >= grid.back() - 6.0;
            cfg.min_trials = tail ? 1'000'000 : 0;
            cfg.max_trials = tail ? 1'000'000 : 200'000;
            const auto p = linksim::simulate_point(cfg, db);
            curve.push_back({db, p.per()});
        }
        return errprob::diversity_estimate(curve);
    };
    const auto a = curve_for(ldc::alamouti());
    const auto s = curve_for(ldc::sm_repetition(2, 2));
    o.require(a.slope >= 1.7 && a.slope <= 2.3, "Alamouti slope outside [1.7, 2.3]");
    o.require(s.slope >= 0.7 && s.slope <= 1.3, "SM-repetition slope outside [0.7, 1.3]");
    o.note(fmt("Alamouti %.3f [%.3f, %.3f]", a.slope, a.ci_low, a.ci_high));
    o.note(fmt("SM-repetition %.3f [%.3f, %.3f]", s.slope, s.ci_low, s.ci_high));
    return o;
}

Outcome coding_contrast() {
    Outcome o;
    LinkConfig cfg;
    cfg.min_errors = 0;
    cfg.max_trials = 50000;
    cfg.coded = true;
    const auto cod = linksim::simulate_point(cfg, 10.0);
    cfg.coded = false;
    const auto unc_long = linksim::simulate_point(cfg, 10.0);
    cfg.packet_symbols = cfg.code.k();
    const auto unc = linksim::simulate_point(cfg, 10.0);
    const double fu = unc.success_then_fail_rate(2);
    const double fc = cod.success_then_fail_rate(2);
    o.require(unc.success_then_fail[1] > 0, "no uncoded events observed");
    o.require(fu > 10.0 * fc, "uncoded frequency not above 10x coded");
    o.note(fmt("uncoded %.3g (%g events)", fu, static_cast<double>(unc.success_then_fail[1])));
    o.note(fmt("coded %.3g (%g events)", fc, static_cast<double>(cod.success_then_fail[1])));
    o.note(fmt("uncoded 100-symbol packets %.3g", unc_long.success_then_fail_rate(2)));
    o.note(fmt("trials %g each", static_cast<double>(unc.trials)));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 MISO closed-form agreement", miso_closed_form},
        {"2 capacity CDF oracle", capacity_cdf},
        {"3 protocol ordering", protocol_ordering},
        {"4 LDC certification table", certification},
        {"5 Alamouti rate optimality", alamouti_rate},
        {"6 covariance machinery", covariance_machinery},
        {"7 union bound validity", union_bound_validity},
        {"8 diversity slopes", diversity_slopes},
        {"9 coded vs uncoded contrast", coding_contrast},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        const Outcome o = fn();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
