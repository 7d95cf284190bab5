#pragma once

#include "volpot/common.hpp"

namespace volpot {

// Modified Bessel functions of the second kind, orders 0 and 1.
// Relative accuracy ~1e-14 for x in [1e-8, 700].  For x large enough that
// exp(-x) underflows the result is 0 and *underflow (if given) is set.
// x <= 0 throws std::domain_error.
double bessel_k0(double x, bool* underflow = nullptr);
double bessel_k1(double x, bool* underflow = nullptr);

enum class KernelFamily { Laplace, ModifiedHelmholtz };

// Free-space Green functions for -Lu = f with L = Laplacian (Laplace) and
// Lu = Laplacian u - lambda^2 u (modified Helmholtz):
//   Laplace:            G(r, r0) = -(1/2pi) log |r - r0|
//   modified Helmholtz: G(r, r0) =  (1/2pi) K0(lambda |r - r0|)
struct Kernel {
    KernelFamily family = KernelFamily::Laplace;
    double lambda = 0.0;  // decay rate; the PDE coefficient is lambda^2

    // Value from the squared distance; the preferred hot-path entry
    // (Laplace avoids the square root entirely).
    double radial_r2(double r2) const;
    // Value from the distance r > 0.
    double radial(double r) const { return radial_r2(r * r); }
    // Checked evaluation; coincident points throw std::domain_error.
    double operator()(Vec2 r, Vec2 r0) const;
};

Kernel make_kernel(KernelFamily family, double lambda = 0.0);

}  // namespace volpot
