#pragma once

#include <cstddef>
#include <span>

#include "mimoarq/channel.hpp"
#include "mimoarq/rng.hpp"

namespace mimoarq {

struct ProbabilityEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace orthant {

double normal_cdf(double x);
double normal_quantile(double p);
/// Gaussian tail Q(x) = P(N(0,1) > x).
double q_function(double x);

/// Sum in a fixed binary-tree order, independent of how the terms were produced.
double pairwise_sum(std::span<const double> values);

/// Lower-triangular L with L L^T = cov for positive semidefinite cov. A pivot
/// whose remaining variance falls below rel_tol * max diag is pinned to zero
/// together with the rest of its column.
RMatrix semidefinite_cholesky(const RMatrix& cov, double rel_tol = 1e-12);

inline constexpr int kMaxSmallDim = 8;

/// Same factorization on row-major n x n buffers, n <= kMaxSmallDim.
void semidefinite_cholesky(const double* cov, double* l, int n, double rel_tol = 1e-12);

/// One GHK weight for the row-major factor l.
double ghk_weight(const double* l, const double* upper, int n, CounterRng& rng);

/// P(W < upper componentwise) for W ~ N(0, cov) by sequential conditioning on
/// the triangular factor (GHK). Pinned coordinates are compared exactly.
ProbabilityEstimate below_ghk(const RMatrix& cov, const Eigen::VectorXd& upper, std::size_t mc, CounterRng& rng);

/// Same probability by plain indicator sampling of W = L z.
ProbabilityEstimate below_indicator(const RMatrix& cov, const Eigen::VectorXd& upper, std::size_t mc,
                                    CounterRng& rng);

}  // namespace orthant
}  // namespace mimoarq
