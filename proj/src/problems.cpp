#include "volpot/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace volpot {

namespace {

// Trigonometric manufactured pair: every term of u is matched by the
// corresponding term of f = -lap(u), so the pair is exact in double
// precision term by term.
double mfg_u(Vec2 r) {
    return std::sin(6 * r.x) / 6 + std::cos(8 * (r.y + 0.1)) / 8 +
           std::sin(4 * r.x * r.y) / 4 + std::cos(3 * r.x) * std::sin(3 * r.y) / 6;
}

double mfg_f(Vec2 r) {
    return 6 * std::sin(6 * r.x) + 8 * std::cos(8 * (r.y + 0.1)) +
           4 * (r.x * r.x + r.y * r.y) * std::sin(4 * r.x * r.y) +
           3 * std::cos(3 * r.x) * std::sin(3 * r.y);
}

}  // namespace

Problem make_problem(const std::string& id, double lambda) {
    Problem p;
    p.name = id;
    if (id == "poisson-mfg1") {
        p.family = KernelFamily::Laplace;
        p.f = mfg_f;
        p.g = mfg_u;
        p.u_exact = mfg_u;
        return p;
    }
    if (id == "const-rhs-disk") {
        p.family = KernelFamily::Laplace;
        p.f = [](Vec2) { return 1.0; };
        p.g = [](Vec2) { return 0.0; };
        p.u_exact = [](Vec2 r) { return (1.0 - r.norm2()) / 4.0; };
        return p;
    }
    if (id == "modhelm-mfg1") {
        if (!(lambda > 0))
            throw std::invalid_argument("modhelm-mfg1 needs lambda > 0");
        p.family = KernelFamily::ModifiedHelmholtz;
        p.lambda = lambda;
        p.f = [lambda](Vec2 r) { return mfg_f(r) + lambda * lambda * mfg_u(r); };
        p.g = mfg_u;
        p.u_exact = mfg_u;
        return p;
    }
    throw std::invalid_argument("unknown problem id: " + id);
}

Problem constant_problem(double value) {
    Problem p;
    p.name = "constant";
    p.f = [value](Vec2) { return value; };
    p.g = [](Vec2) { return 0.0; };
    return p;
}

Problem gaussian_problem(Vec2 center, double sigma, double amplitude) {
    if (!(sigma > 0)) throw std::invalid_argument("gaussian needs sigma > 0");
    Problem p;
    p.name = "gaussian";
    p.f = [center, sigma, amplitude](Vec2 r) {
        return amplitude * std::exp(-(r - center).norm2() / (2 * sigma * sigma));
    };
    p.g = [](Vec2) { return 0.0; };
    return p;
}

}  // namespace volpot
