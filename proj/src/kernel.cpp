#include "volpot/kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace volpot {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// ---------------------------------------------------------------------------
// Small-argument power series (x <= 2).

double k0_series(double x) {
    double q = 0.25 * x * x;
    double b = 1.0;       // (x^2/4)^k / (k!)^2
    double i0 = 1.0;      // I0 partial sum
    double s = 0.0;       // sum of b_k * H_k
    double hk = 0.0;
    for (int k = 1; k < 40; ++k) {
        b *= q / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        i0 += b;
        s += b * hk;
        if (b < 1e-19 * i0) break;
    }
    return -(std::log(0.5 * x) + kEulerGamma) * i0 + s;
}

double k1_series(double x) {
    double q = 0.25 * x * x;
    double c = 1.0;       // (x^2/4)^k / (k! (k+1)!)
    double i1s = 1.0;     // sum of c_k (I1 = x/2 * i1s)
    double s = 1.0;       // sum of (H_k + H_{k+1}) c_k, k=0 term: H_0+H_1 = 1
    double hk = 0.0, hk1 = 1.0;
    for (int k = 1; k < 40; ++k) {
        c *= q / (static_cast<double>(k) * (k + 1));
        hk += 1.0 / k;
        hk1 += 1.0 / (k + 1);
        i1s += c;
        s += (hk + hk1) * c;
        if (c < 1e-19 * i1s) break;
    }
    double i1 = 0.5 * x * i1s;
    return (std::log(0.5 * x) + kEulerGamma) * i1 + 1.0 / x - 0.25 * x * s;
}

// ---------------------------------------------------------------------------
// Large-argument evaluation via Chebyshev fits of g(x) = K(x) e^x sqrt(x)
// on dyadic intervals, with nodal values computed once from the integral
// representations K0(x) = int_0^inf exp(-x cosh t) dt and
// K1(x) = int_0^inf exp(-x cosh t) cosh t dt.

long double integral_rep(long double x, bool order1) {
    // Truncate where the integrand has decayed by a factor ~1e-26.
    long double arg = (x + 62.0L) / x;
    long double T = std::log(arg + std::sqrt(arg * arg - 1.0L));  // acosh
    // Composite Gauss-Legendre, panels doubled until converged.
    static const long double gx[10] = {
        -0.9739065285171717L, -0.8650633666889845L, -0.6794095682990244L,
        -0.4333953941292472L, -0.1488743389816312L, 0.1488743389816312L,
        0.4333953941292472L,  0.6794095682990244L,  0.8650633666889845L,
        0.9739065285171717L};
    static const long double gw[10] = {
        0.0666713443086881L, 0.1494513491505806L, 0.2190863625159820L,
        0.2692667193099963L, 0.2955242247147529L, 0.2955242247147529L,
        0.2692667193099963L, 0.2190863625159820L, 0.1494513491505806L,
        0.0666713443086881L};
    long double prev = 0.0L;
    for (int np = 8; np <= 1024; np *= 2) {
        long double sum = 0.0L;
        long double hp = T / np;
        for (int p = 0; p < np; ++p) {
            long double a = p * hp;
            for (int i = 0; i < 10; ++i) {
                long double t = a + 0.5L * hp * (gx[i] + 1.0L);
                long double ch = std::cosh(t);
                long double v = std::exp(-x * (ch - 1.0L));  // scaled by e^x
                if (order1) v *= ch;
                sum += gw[i] * v;
            }
        }
        sum *= 0.5L * hp;
        if (np > 8 && std::fabs(sum - prev) <= 1e-20L * std::fabs(sum)) return sum;
        prev = sum;
    }
    return prev;
}

struct ChebFit {
    // Intervals [2,4], [4,8], ..., [512,1024] in x; degree-24 fits of
    // K(x) e^x sqrt(x) per interval.
    static constexpr int kIntervals = 9;
    static constexpr int kDeg = 25;  // number of coefficients
    std::array<std::array<double, kDeg>, kIntervals> c0{}, c1{};

    ChebFit() {
        for (int iv = 0; iv < kIntervals; ++iv) {
            long double a = std::pow(2.0L, iv + 1);
            long double b = 2.0L * a;
            std::array<long double, kDeg> f0{}, f1{};
            for (int j = 0; j < kDeg; ++j) {
                long double theta = std::numbers::pi_v<long double> * (j + 0.5L) / kDeg;
                long double xj = 0.5L * (a + b) + 0.5L * (b - a) * std::cos(theta);
                long double sq = std::sqrt(xj);
                // integral_rep returns e^x K(x); multiply by sqrt(x).
                f0[j] = integral_rep(xj, false) * sq;
                f1[j] = integral_rep(xj, true) * sq;
            }
            for (int k = 0; k < kDeg; ++k) {
                long double s0 = 0.0L, s1 = 0.0L;
                for (int j = 0; j < kDeg; ++j) {
                    long double theta = std::numbers::pi_v<long double> * (j + 0.5L) / kDeg;
                    long double ck = std::cos(k * theta);
                    s0 += f0[j] * ck;
                    s1 += f1[j] * ck;
                }
                c0[iv][k] = static_cast<double>(2.0L * s0 / kDeg);
                c1[iv][k] = static_cast<double>(2.0L * s1 / kDeg);
            }
        }
    }

    double eval(const std::array<double, kDeg>& c, double u) const {
        // Clenshaw on [-1, 1]; c[0] counted with weight 1/2.
        double b1 = 0.0, b2 = 0.0;
        for (int k = kDeg - 1; k >= 1; --k) {
            double b0 = 2.0 * u * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return u * b1 - b2 + 0.5 * c[0];
    }

    double scaled(double x, bool order1) const {
        int iv = 0;
        double lo = 2.0;
        while (iv + 1 < kIntervals && x > 2.0 * lo) {
            lo *= 2.0;
            ++iv;
        }
        double hi = 2.0 * lo;
        double u = (2.0 * x - (lo + hi)) / (hi - lo);
        return eval(order1 ? c1[iv] : c0[iv], u);
    }
};

const ChebFit& cheb_fit() {
    static const ChebFit fit;
    return fit;
}

double k_large(double x, bool order1, bool* underflow) {
    double ex = std::exp(-x);
    if (ex == 0.0) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    return cheb_fit().scaled(x, order1) * ex / std::sqrt(x);
}

}  // namespace

double bessel_k0(double x, bool* underflow) {
    if (underflow) *underflow = false;
    if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be positive");
    if (x <= 2.0) return k0_series(x);
    return k_large(x, false, underflow);
}

double bessel_k1(double x, bool* underflow) {
    if (underflow) *underflow = false;
    if (!(x > 0.0)) throw std::domain_error("bessel_k1: argument must be positive");
    if (x <= 2.0) return k1_series(x);
    return k_large(x, true, underflow);
}

double Kernel::radial_r2(double r2) const {
    if (family == KernelFamily::Laplace) {
        return -0.25 / std::numbers::pi * std::log(r2);
    }
    return 0.5 / std::numbers::pi * bessel_k0(lambda * std::sqrt(r2));
}

double Kernel::operator()(Vec2 r, Vec2 r0) const {
    double r2 = (r - r0).norm2();
    if (r2 == 0.0) throw std::domain_error("Kernel: coincident evaluation point");
    return radial_r2(r2);
}

Kernel make_kernel(KernelFamily family, double lambda) {
    if (family == KernelFamily::ModifiedHelmholtz && !(lambda > 0.0))
        throw std::invalid_argument("make_kernel: modified Helmholtz needs lambda > 0");
    Kernel k;
    k.family = family;
    k.lambda = lambda;
    return k;
}

}  // namespace volpot
