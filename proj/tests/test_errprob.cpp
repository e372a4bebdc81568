#include <doctest.h>

#include <cmath>
#include <vector>

#include "mimoarq/errors.hpp"
#include "mimoarq/errprob.hpp"

using namespace mimoarq;
using cd = std::complex<double>;

namespace {

CVector vec2(cd a, cd b) {
    CVector s(2);
    s << a, b;
    return s;
}

PairwiseCovariance one_dim(double d2) {
    PairwiseCovariance c;
    c.r_w = RMatrix::Constant(1, 1, 2.0 * d2);
    c.thresholds = Eigen::VectorXd::Constant(1, d2);
    return c;
}

}  // namespace

TEST_CASE("pairwise distance") {
    const auto code = ldc::alamouti();
    const auto snr = SnrPoint::from_linear(4.0);
    const auto hs = channel::sample_channels(2, 1, 50, 1);
    const auto qpsk = modulation::qpsk_symbol_set(2);
    CHECK(errprob::pairwise_distance(hs[0], code, snr, qpsk.vectors[3], qpsk.vectors[3], 2) == 0.0);
    for (const auto& h : hs) {
        for (int i = 0; i < qpsk.size(); ++i) {
            const double d1 = errprob::pairwise_distance(h, code, snr, qpsk.vectors[static_cast<std::size_t>(i)],
                                                         qpsk.vectors[0], 1);
            const double d2 = errprob::pairwise_distance(h, code, snr, qpsk.vectors[static_cast<std::size_t>(i)],
                                                         qpsk.vectors[0], 2);
            CHECK(d2 >= d1);
        }
    }
    CMatrix h(1, 2);
    h << 1.0, 0.0;
    const cd delta(0.6, -0.8);
    const auto s_i = vec2(delta, 0.0);
    const auto s_j = vec2(0.0, 0.0);
    CHECK(errprob::pairwise_distance(ChannelMatrix(h), code, snr, s_i, s_j, 1) ==
          doctest::Approx(2.0 * std::norm(delta)).epsilon(1e-12));
    // Antenna 1 carries -conj(s_2) in slot 2, so h = (1, 0) sees no extra distance.
    CHECK(errprob::pairwise_distance(ChannelMatrix(h), code, snr, s_i, s_j, 2) ==
          doctest::Approx(2.0 * std::norm(delta)).epsilon(1e-12));
    h << 1.0, 1.0;
    CHECK(errprob::pairwise_distance(ChannelMatrix(h), code, snr, s_i, s_j, 1) ==
          doctest::Approx(2.0 * std::norm(delta)).epsilon(1e-12));
    CHECK(errprob::pairwise_distance(ChannelMatrix(h), code, snr, s_i, s_j, 2) ==
          doctest::Approx(4.0 * std::norm(delta)).epsilon(1e-12));
}

TEST_CASE("covariance structure") {
    const auto code = ldc::alamouti();
    const auto snr = SnrPoint::from_db(6.0);
    const auto qpsk = modulation::qpsk_symbol_set(2);
    const auto hs = channel::sample_channels(2, 1, 20, 2);
    for (const auto& h : hs) {
        const std::vector<CVector> single{qpsk.vectors[5]};
        const auto c1 = errprob::build_covariance(h, code, snr, qpsk.vectors[0], single);
        const double d2 = errprob::pairwise_distance(h, code, snr, qpsk.vectors[5], qpsk.vectors[0], 1);
        CHECK(c1.n() == 1);
        CHECK(c1.r_w(0, 0) == doctest::Approx(2.0 * d2).epsilon(1e-12));
        CHECK(c1.thresholds(0) == doctest::Approx(d2).epsilon(1e-12));

        const std::vector<CVector> same{qpsk.vectors[5], qpsk.vectors[5]};
        const auto c2 = errprob::build_covariance(h, code, snr, qpsk.vectors[0], same);
        CHECK(c2.r_w(0, 1) == doctest::Approx(2.0 * d2).epsilon(1e-12));
        CHECK(c2.r_w(1, 0) == c2.r_w(0, 1));
        const double corr = c2.r_w(0, 1) / std::sqrt(c2.r_w(0, 0) * c2.r_w(1, 1));
        CHECK(corr <= 1.0 + 1e-12);

        for (int a = 1; a < qpsk.size(); a += 3) {
            for (int b = 1; b < qpsk.size(); b += 4) {
                const std::vector<CVector> comp{qpsk.vectors[static_cast<std::size_t>(a)],
                                                qpsk.vectors[static_cast<std::size_t>(b)]};
                const auto c = errprob::build_covariance(h, code, snr, qpsk.vectors[0], comp);
                CHECK((c.r_w - c.r_w.transpose()).norm() == 0.0);
                Eigen::SelfAdjointEigenSolver<RMatrix> es(c.r_w);
                CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()));
                for (int k = 0; k < 2; ++k) {
                    const double dk = errprob::pairwise_distance(h, code, snr, comp[static_cast<std::size_t>(k)],
                                                                 qpsk.vectors[0], k + 1);
                    CHECK(c.r_w(k, k) == doctest::Approx(2.0 * dk).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("covariance matches simulated decision metrics") {
    const auto code = ldc::alamouti();
    const auto snr = SnrPoint::from_db(3.0);
    const auto qpsk = modulation::qpsk_symbol_set(2);
    const auto hs = channel::sample_channels(2, 1, 3, 4);
    const int draws = 100000;
    for (std::size_t inst = 0; inst < hs.size(); ++inst) {
        const auto& h = hs[inst];
        const std::vector<CVector> comp{qpsk.vectors[1 + inst], qpsk.vectors[9 + inst]};
        const auto cov = errprob::build_covariance(h, code, snr, qpsk.vectors[0], comp);
        std::vector<CMatrix> diffs;
        for (int k = 0; k < 2; ++k) {
            diffs.push_back(errprob::difference_matrix(h, code, snr, comp[static_cast<std::size_t>(k)],
                                                       qpsk.vectors[0], k + 1));
        }
        // W^(k) = 2 Re tr(D^(k) Z^(k)H) with Z sharing its first columns across rounds.
        RMatrix acc = RMatrix::Zero(2, 2);
        RMatrix acc2 = RMatrix::Zero(2, 2);
        for (int d = 0; d < draws; ++d) {
            CounterRng rng(7, streams::kAudit, static_cast<std::uint64_t>(inst * draws + d));
            CMatrix z(1, 2);
            z(0, 0) = rng.complex_normal();
            z(0, 1) = rng.complex_normal();
            double w[2];
            for (int k = 0; k < 2; ++k) {
                const auto& dk = diffs[static_cast<std::size_t>(k)];
                w[k] = 2.0 * (dk.cwiseProduct(z.leftCols(dk.cols()).conjugate())).sum().real();
            }
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    acc(a, b) += w[a] * w[b];
                    acc2(a, b) += w[a] * w[a] * w[b] * w[b];
                }
            }
        }
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double mean = acc(a, b) / draws;
                const double var = acc2(a, b) / draws - mean * mean;
                const double se = std::sqrt(var / draws);
                // Family-wise threshold over the 12 entries checked here.
                CHECK(std::abs(mean - cov.r_w(a, b)) <= 4.0 * se + 1e-12);
            }
        }
    }
}

TEST_CASE("q_n at n = 1 is the Gaussian tail") {
    CHECK(errprob::q_n(one_dim(2.0), 1000, 1).value == doctest::Approx(0.158655).epsilon(1e-5));
    for (double d2 : {0.1, 1.0, 10.0}) {
        const auto exact = errprob::q_n(one_dim(d2), 1000, 1);
        CHECK(exact.value == doctest::Approx(orthant::q_function(std::sqrt(d2 / 2.0))).epsilon(1e-14));
        CounterRng rng(3, streams::kAudit, static_cast<std::uint64_t>(d2 * 10));
        Eigen::VectorXd upper(1);
        upper << -d2;
        const auto mc = orthant::below_indicator(RMatrix::Constant(1, 1, 2.0 * d2), upper, 200000, rng);
        CHECK(std::abs(mc.value - exact.value) <= 3.0 * mc.std_error);
    }
}

TEST_CASE("q_n at n = 2") {
    PairwiseCovariance ind;
    ind.r_w = RMatrix::Zero(2, 2);
    ind.r_w(0, 0) = 2.0;
    ind.r_w(1, 1) = 4.0;
    ind.thresholds = Eigen::Vector2d(1.0, 2.0);
    const auto est = errprob::q_n(ind, 200000, 5);
    const double product = orthant::q_function(1.0 / std::sqrt(2.0)) * orthant::q_function(2.0 / 2.0);
    CHECK(std::abs(est.value - product) <= 3.0 * est.std_error + 1e-12);

    // Perfect nesting: W^(2) is a scaled copy of W^(1).
    PairwiseCovariance nest;
    nest.r_w = RMatrix(2, 2);
    nest.r_w << 2.0, 4.0, 4.0, 8.0;
    nest.thresholds = Eigen::Vector2d(1.0, 3.0);
    const auto ghk = errprob::q_n(nest, 100000, 6);
    CounterRng rng(8, streams::kAudit, 0);
    const auto mc = orthant::below_indicator(nest.r_w, -nest.thresholds, 400000, rng);
    CHECK(std::abs(ghk.value - mc.value) <= 3.0 * std::hypot(ghk.std_error, mc.std_error));

    // Larger cutoffs never raise the estimate beyond noise.
    PairwiseCovariance corr;
    corr.r_w = RMatrix(2, 2);
    corr.r_w << 2.0, 1.0, 1.0, 3.0;
    corr.thresholds = Eigen::Vector2d(0.5, 0.5);
    double prev = 1.0;
    double prev_se = 0.0;
    for (double t : {0.5, 1.0, 2.0, 3.0}) {
        corr.thresholds(1) = t;
        const auto e = errprob::q_n(corr, 50000, 9);
        CHECK(e.value <= prev + 3.0 * std::hypot(e.std_error, prev_se));
        prev = e.value;
        prev_se = e.std_error;
    }
}

TEST_CASE("GHK agrees with indicator sampling on random covariances") {
    for (int trial = 0; trial < 10; ++trial) {
        CounterRng gen(10, streams::kAudit, static_cast<std::uint64_t>(trial));
        const int n = 2 + trial % 3;
        RMatrix a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                a(i, j) = gen.normal();
            }
        }
        const RMatrix cov = a * a.transpose() + 0.1 * RMatrix::Identity(n, n);
        Eigen::VectorXd upper(n);
        for (int i = 0; i < n; ++i) {
            upper(i) = -0.5 * gen.uniform();
        }
        CounterRng r1(11, streams::kOrthant, static_cast<std::uint64_t>(trial));
        CounterRng r2(12, streams::kOrthant, static_cast<std::uint64_t>(trial));
        const auto g = orthant::below_ghk(cov, upper, 50000, r1);
        const auto m = orthant::below_indicator(cov, upper, 200000, r2);
        CHECK(std::abs(g.value - m.value) <= 4.0 * std::hypot(g.std_error, m.std_error));
    }
}

TEST_CASE("semidefinite Cholesky pins degenerate directions") {
    RMatrix cov(3, 3);
    cov << 4.0, 2.0, 2.0, 2.0, 1.0, 1.0, 2.0, 1.0, 2.0;
    const RMatrix l = orthant::semidefinite_cholesky(cov);
    CHECK((l * l.transpose() - cov).norm() < 1e-12);
    CHECK(l(1, 1) == 0.0);
}

TEST_CASE("union bound at n = 1 is the classical space-time bound") {
    const auto code = ldc::alamouti();
    const auto qpsk = modulation::qpsk_symbol_set(2);
    const auto snr = SnrPoint::from_db(8.0);
    errprob::UnionBoundOptions opts;
    opts.h_samples = 50;
    opts.mc_per_h = 1;
    const auto ub = errprob::union_bound(code, qpsk, snr, 1, opts);
    double manual = 0.0;
    for (std::size_t t = 0; t < opts.h_samples; ++t) {
        CounterRng rng(opts.seed, streams::kUnionBoundChannel, t);
        const auto h = channel::sample_channel(2, 1, rng);
        for (int j = 0; j < qpsk.size(); ++j) {
            for (int i = 0; i < qpsk.size(); ++i) {
                if (i == j) {
                    continue;
                }
                const double d2 = errprob::pairwise_distance(h, code, snr, qpsk.vectors[static_cast<std::size_t>(i)],
                                                             qpsk.vectors[static_cast<std::size_t>(j)], 1);
                manual += orthant::q_function(std::sqrt(d2 / 2.0));
            }
        }
    }
    manual /= static_cast<double>(opts.h_samples) * qpsk.size();
    CHECK(ub.bound == doctest::Approx(manual).epsilon(1e-10));
    CHECK(ub.terms == errprob::union_bound_work(16, 1, opts.h_samples));
}

TEST_CASE("union bound for BPSK over Rayleigh fading matches the closed form") {
    const auto code = ldc::spatial_multiplexing(1);
    const auto bpsk = modulation::bpsk_symbol_set(1);
    for (double db : {0.0, 10.0}) {
        const auto snr = SnrPoint::from_db(db);
        errprob::UnionBoundOptions opts;
        opts.h_samples = 200000;
        opts.mc_per_h = 1;
        const auto ub = errprob::union_bound(code, bpsk, snr, 1, opts);
        // E[Q(sqrt(2 snr |h|^2))] for |h|^2 ~ Exp(1), by Simpson quadrature.
        const int steps = 40000;
        const double top = 50.0;
        const double step = top / steps;
        double quad = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double x = i * step;
            const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            quad += w * orthant::q_function(std::sqrt(2.0 * snr.linear() * x)) * std::exp(-x);
        }
        quad *= step / 3.0;
        CHECK(ub.bound == doctest::Approx(quad).epsilon(0.02));
    }
}

TEST_CASE("union bound work guard") {
    CHECK(errprob::union_bound_work(16, 2, 10) == 16ull * 16 * 15 * 10);
    errprob::UnionBoundOptions opts;
    opts.h_samples = 1000;
    opts.work_budget = 1000;
    CHECK_THROWS_AS(errprob::union_bound(ldc::alamouti(), modulation::qpsk_symbol_set(2), SnrPoint::from_db(10), 2, opts),
                    WorkBudgetExceeded);
    try {
        errprob::union_bound(ldc::alamouti(), modulation::qpsk_symbol_set(2), SnrPoint::from_db(10), 2, opts);
    } catch (const WorkBudgetExceeded& e) {
        CHECK(e.required() == errprob::union_bound_work(16, 2, 1000));
    }
}

TEST_CASE("optimal diversity") {
    CHECK(errprob::optimal_diversity(2, 1, 1) == 1);
    CHECK(errprob::optimal_diversity(2, 1, 2) == 2);
    CHECK(errprob::optimal_diversity(4, 2, 3) == 6);
}

TEST_CASE("diversity estimate on synthetic curves") {
    std::vector<PerPoint> curve2;
    std::vector<PerPoint> curve1;
    for (double db = 0.0; db <= 20.0; db += 2.0) {
        const double snr = std::pow(10.0, db / 10.0);
        curve2.push_back({db, 0.3 / (snr * snr)});
        curve1.push_back({db, 0.3 / snr});
    }
    const auto f2 = errprob::diversity_estimate(curve2);
    CHECK(f2.slope == doctest::Approx(2.0).epsilon(0.005));
    CHECK(f2.points_used == 4);
    CHECK(f2.ci_low <= 2.0);
    CHECK(f2.ci_high >= 2.0);
    CHECK(errprob::diversity_estimate(curve1).slope == doctest::Approx(1.0).epsilon(0.005));

    auto zero = curve2;
    zero.back().per = 0.0;
    CHECK_THROWS_AS(errprob::diversity_estimate(zero), std::domain_error);
    const std::vector<PerPoint> short_curve{{0.0, 0.1}, {20.0, 0.001}};
    CHECK_THROWS_AS(errprob::diversity_estimate(short_curve), std::invalid_argument);
}
