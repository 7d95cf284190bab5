#pragma once

#include <vector>

namespace volpot {

struct QuadRule1D {
    std::vector<double> x, w;
    int size() const { return static_cast<int>(x.size()); }
};

// n-point Gauss-Legendre rule on [-1, 1], cached.  n in [1, 200].
const QuadRule1D& gauss_legendre(int n);

// Same rule mapped to [a, b].
QuadRule1D gauss_legendre_on(int n, double a, double b);

// Composite graded rule on [0, 1] for integrands phi(t) log t + psi(t):
// Gauss-Legendre panels between breakpoints {1, sigma, sigma^2, ..., s_N}
// with s_N <= tail, plus a final panel pair on [0, s_N].
QuadRule1D graded_log_rule(double tail, double sigma = 0.25, int points = 16);

// Deep shared rule (tail 1e-14, sigma 1/4, 16 points per panel); integrates
// phi(t) log t + psi(t) on [0, 1] to ~1e-13 for smooth phi, psi.
const QuadRule1D& singular_log_rule();

// Rule on [0, 1] for phi(t) log(t + d) + psi(t): graded toward 0 until the
// panel length drops below d, then uniform panels.  Cached per decade bucket
// of d (the bucket's rule is built for its lower edge, so it serves every d
// in [10^(-q-1), 10^(-q))).
const QuadRule1D& near_log_rule(double d);

// Shallower variants for integrands carrying an extra factor of t (the ray
// reduction folds the Jacobian factor t into the smooth part, so the tail
// below the last breakpoint only contributes O(tail^2 log tail)).
const QuadRule1D& ray_singular_rule();
const QuadRule1D& ray_near_rule(double d_eff);

// n-point Gauss rules on [0, 1] for the weights t and -t log t.  Splitting
// a log-class kernel along a ray into a -log t part and a smooth part lets
// these integrate both factors with full Gaussian exactness at a fraction
// of the composite rule's node count.  n in [1, 60], cached.
const QuadRule1D& gauss_weight_t(int n);
const QuadRule1D& gauss_weight_tlog(int n);

}  // namespace volpot
