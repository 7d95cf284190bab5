#include "volpot/quad1d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace volpot {

namespace {

// Nodes are roots of P_n found by Newton from the Chebyshev-like initial
// guess; weights via w = 2 / ((1 - x^2) P_n'(x)^2).
QuadRule1D build_gauss_legendre(int n) {
    QuadRule1D rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double x = std::cos(M_PI * (i + 0.75L) / (n + 0.5L));
        long double dp = 0;
        for (int it = 0; it < 100; ++it) {
            long double p0 = 1, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n, p0 = P_{n-1}
            dp = n * (x * p1 - p0) / (x * x - 1);
            long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        long double w = 2.0L / ((1 - x * x) * dp * dp);
        rule.x[i] = static_cast<double>(-x);  // ascending order
        rule.w[i] = static_cast<double>(w);
        rule.x[n - 1 - i] = static_cast<double>(x);
        rule.w[n - 1 - i] = static_cast<double>(w);
    }
    if (n == 1) {
        rule.x[0] = 0;
        rule.w[0] = 2;
    }
    return rule;
}

std::mutex g_gl_mutex;
std::map<int, QuadRule1D> g_gl_cache;

void append_panel(QuadRule1D& rule, const QuadRule1D& base, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < base.size(); ++i) {
        rule.x.push_back(mid + half * base.x[i]);
        rule.w.push_back(half * base.w[i]);
    }
}

// Graded panels [s_{k+1}, s_k] with s_k = sigma^k while s_k > cutoff, then
// the remaining [0, s_N] split into two equal panels.  With the log
// singularity at t = 0 (or at distance >= cutoff for near rules), each
// panel sees an analytic integrand whose derivatives are controlled by the
// fixed ratio of panel length to distance-from-singularity, so the P-point
// error per panel is uniformly small and the total is ~ N * eps_panel.
QuadRule1D build_graded(double cutoff, double sigma, int points) {
    const QuadRule1D& base = gauss_legendre(points);
    QuadRule1D rule;
    double hi = 1.0;
    while (hi > cutoff) {
        double lo = hi * sigma;
        if (lo <= cutoff) lo = 0;
        if (lo == 0) {
            // Final stretch: two equal panels keep the last panel short so
            // the (integrable) endpoint behavior is resolved.
            append_panel(rule, base, hi * 0.5, hi);
            append_panel(rule, base, 0, hi * 0.5);
        } else {
            append_panel(rule, base, lo, hi);
        }
        hi = lo;
    }
    if (rule.x.empty()) {
        append_panel(rule, base, 0.5, 1.0);
        append_panel(rule, base, 0, 0.5);
    }
    return rule;
}

std::mutex g_near_mutex;
std::map<std::pair<int, int>, QuadRule1D> g_near_cache;  // (bucket, shallow)

const QuadRule1D& near_rule_impl(double d, bool shallow, double floor_tail) {
    if (!(d > 0) || d > 16.0)
        throw std::invalid_argument("near_log_rule: d out of range");
    // Decade bucket: d in [10^(-q-1), 10^(-q)).  The rule is graded down to
    // the bucket's lower edge (or the floor tail, whichever is larger).
    int q = static_cast<int>(std::floor(-std::log10(d)));
    double lower = std::pow(10.0, -q - 1);
    double cutoff = std::max(lower, floor_tail);
    if (cutoff >= 1.0) cutoff = 0.999;  // d >= 1: no grading needed
    std::lock_guard<std::mutex> lock(g_near_mutex);
    auto key = std::make_pair(q, shallow ? 1 : 0);
    auto it = g_near_cache.find(key);
    if (it == g_near_cache.end())
        it = g_near_cache.emplace(key, build_graded(cutoff, 0.25, 16)).first;
    return it->second;
}

}  // namespace

const QuadRule1D& gauss_legendre(int n) {
    if (n < 1 || n > 200)
        throw std::invalid_argument("gauss_legendre: n out of range");
    std::lock_guard<std::mutex> lock(g_gl_mutex);
    auto it = g_gl_cache.find(n);
    if (it == g_gl_cache.end())
        it = g_gl_cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

QuadRule1D gauss_legendre_on(int n, double a, double b) {
    const QuadRule1D& base = gauss_legendre(n);
    QuadRule1D rule;
    append_panel(rule, base, a, b);
    return rule;
}

QuadRule1D graded_log_rule(double tail, double sigma, int points) {
    if (!(tail > 0 && tail < 1) || !(sigma > 0 && sigma < 1) || points < 2)
        throw std::invalid_argument("graded_log_rule: bad parameters");
    return build_graded(tail, sigma, points);
}

const QuadRule1D& singular_log_rule() {
    static const QuadRule1D rule = build_graded(1e-14, 0.25, 16);
    return rule;
}

const QuadRule1D& near_log_rule(double d) {
    return near_rule_impl(d, false, 1e-14);
}

const QuadRule1D& ray_singular_rule() {
    static const QuadRule1D rule = build_graded(3e-8, 0.25, 16);
    return rule;
}

const QuadRule1D& ray_near_rule(double d_eff) {
    return near_rule_impl(d_eff, true, 3e-8);
}

namespace {

// Gauss rule for a positive weight w on [0, 1] via the Stieltjes recurrence
// evaluated on a deep auxiliary discretization, then Golub-Welsch on the
// resulting Jacobi matrix.  The auxiliary rule uses 48 points per graded
// panel, so products of polynomials up to degree ~2n stay exact against
// both weights of interest here (t and -t log t).
QuadRule1D build_weighted_gauss(int n, bool log_weight) {
    static const QuadRule1D aux = build_graded(1e-15, 0.25, 48);
    const int m = aux.size();
    std::vector<long double> x(m), W(m);
    for (int i = 0; i < m; ++i) {
        const long double xi = aux.x[i];
        x[i] = xi;
        W[i] = aux.w[i] * (log_weight ? -xi * std::log(xi) : xi);
    }

    std::vector<long double> alpha(n), beta(n), pk(m, 1.0L), pk1(m, 0.0L);
    long double mu0 = 0;
    for (int i = 0; i < m; ++i) mu0 += W[i];
    long double nrm_prev = 0;
    for (int k = 0; k < n; ++k) {
        long double nrm = 0, xav = 0;
        for (int i = 0; i < m; ++i) {
            const long double q = W[i] * pk[i] * pk[i];
            nrm += q;
            xav += q * x[i];
        }
        alpha[k] = xav / nrm;
        beta[k] = k == 0 ? mu0 : nrm / nrm_prev;
        for (int i = 0; i < m; ++i) {
            const long double next =
                (x[i] - alpha[k]) * pk[i] - (k == 0 ? 0.0L : beta[k] * pk1[i]);
            pk1[i] = pk[i];
            pk[i] = next;
        }
        nrm_prev = nrm;
    }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        J(k, k) = static_cast<double>(alpha[k]);
        if (k + 1 < n) {
            const double b = std::sqrt(static_cast<double>(beta[k + 1]));
            J(k, k + 1) = b;
            J(k + 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadRule1D rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.w[i] = static_cast<double>(mu0) * v0 * v0;
    }
    return rule;
}

std::mutex g_wg_mutex;
std::map<std::pair<int, int>, QuadRule1D> g_wg_cache;

const QuadRule1D& weighted_gauss(int n, bool log_weight) {
    if (n < 1 || n > 60)
        throw std::invalid_argument("weighted gauss rule: n out of range");
    std::lock_guard<std::mutex> lock(g_wg_mutex);
    auto key = std::make_pair(n, log_weight ? 1 : 0);
    auto it = g_wg_cache.find(key);
    if (it == g_wg_cache.end())
        it = g_wg_cache.emplace(key, build_weighted_gauss(n, log_weight)).first;
    return it->second;
}

}  // namespace

const QuadRule1D& gauss_weight_t(int n) { return weighted_gauss(n, false); }

const QuadRule1D& gauss_weight_tlog(int n) { return weighted_gauss(n, true); }

}  // namespace volpot
