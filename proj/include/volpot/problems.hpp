#pragma once

#include <functional>
#include <string>

#include "volpot/common.hpp"
#include "volpot/kernel.hpp"

namespace volpot {

// A named Dirichlet test problem: source term, boundary data, and the
// exact solution when one is known (null function otherwise).
struct Problem {
    std::string name;
    KernelFamily family = KernelFamily::Laplace;
    double lambda = 0.0;  // set for modified Helmholtz problems
    std::function<double(Vec2)> f;
    std::function<double(Vec2)> g;
    std::function<double(Vec2)> u_exact;
};

// Built-in problems by id:
//   poisson-mfg1    trigonometric manufactured field with -lap(u) = f,
//                   boundary data g = u; works on any domain
//   const-rhs-disk  f = 1, g = 0; the exact solution (1 - r^2)/4 assumes
//                   the unit disk
//   modhelm-mfg1    the same u with f = -lap(u) + lambda^2 u
// lambda is used by modhelm-mfg1 only.  Unknown ids throw.
Problem make_problem(const std::string& id, double lambda = 10.0);

// Parameterized sources with g = 0 and no reference solution.
Problem constant_problem(double value);
Problem gaussian_problem(Vec2 center, double sigma, double amplitude);

}  // namespace volpot
