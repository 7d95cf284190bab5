#include "volpot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volpot/quad1d.hpp"

namespace volpot {

Vec2 Curve::outward_normal(double t) const {
    Vec2 tau = unit_tangent(t);
    return Vec2{tau.y, -tau.x};
}

double Curve::curvature(double t) const {
    Vec2 d1 = deriv(t), d2 = deriv2(t);
    double sp = d1.norm();
    return cross(d1, d2) / (sp * sp * sp);
}

double Curve::arclength(double t0, double t1) const {
    // Composite Gauss-Legendre with panel doubling until two consecutive
    // refinements agree.
    const QuadRule1D& base = gauss_legendre(16);
    double prev = 0;
    for (int panels = 1; panels <= 4096; panels *= 2) {
        double sum = 0;
        const double dt = (t1 - t0) / panels;
        for (int p = 0; p < panels; ++p) {
            const double a = t0 + p * dt;
            for (int i = 0; i < base.size(); ++i)
                sum += 0.5 * std::abs(dt) * base.w[i] *
                       speed(a + 0.5 * dt * (1 + base.x[i]));
        }
        if (panels > 1 && std::abs(sum - prev) <= 1e-13 * (1 + std::abs(sum)))
            return (t1 >= t0 ? sum : -sum);
        prev = sum;
    }
    return (t1 >= t0 ? prev : -prev);
}

double Curve::total_arclength() const { return arclength(0, 2 * M_PI); }

void Curve::bounding_box(Vec2& lo, Vec2& hi) const {
    const int n = 2048;
    lo = Vec2{1e300, 1e300};
    hi = Vec2{-1e300, -1e300};
    for (int i = 0; i < n; ++i) {
        Vec2 p = pos(2 * M_PI * i / n);
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    // Sampling misses extrema by O(1/n^2); pad generously.
    Vec2 pad = 1e-4 * (hi - lo);
    lo = lo - pad;
    hi = hi + pad;
}

Circle::Circle(Vec2 center, double radius) : c_(center), r_(radius) {
    if (!(radius > 0)) throw std::invalid_argument("Circle: radius <= 0");
}

Vec2 Circle::pos(double t) const { return c_ + r_ * Vec2{std::cos(t), std::sin(t)}; }
Vec2 Circle::deriv(double t) const { return r_ * Vec2{-std::sin(t), std::cos(t)}; }
Vec2 Circle::deriv2(double t) const { return r_ * Vec2{-std::cos(t), -std::sin(t)}; }
Vec2 Circle::deriv3(double t) const { return r_ * Vec2{std::sin(t), -std::cos(t)}; }
bool Circle::contains(Vec2 p) const { return dist(p, c_) < r_; }

Ellipse::Ellipse(Vec2 center, double a, double b, double angle)
    : c_(center), a_(a), b_(b), cs_(std::cos(angle)), sn_(std::sin(angle)) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("Ellipse: bad semiaxes");
}

Vec2 Ellipse::pos(double t) const {
    const double u = a_ * std::cos(t), v = b_ * std::sin(t);
    return c_ + Vec2{cs_ * u - sn_ * v, sn_ * u + cs_ * v};
}
Vec2 Ellipse::deriv(double t) const {
    const double u = -a_ * std::sin(t), v = b_ * std::cos(t);
    return Vec2{cs_ * u - sn_ * v, sn_ * u + cs_ * v};
}
Vec2 Ellipse::deriv2(double t) const {
    const double u = -a_ * std::cos(t), v = -b_ * std::sin(t);
    return Vec2{cs_ * u - sn_ * v, sn_ * u + cs_ * v};
}
Vec2 Ellipse::deriv3(double t) const {
    const double u = a_ * std::sin(t), v = -b_ * std::cos(t);
    return Vec2{cs_ * u - sn_ * v, sn_ * u + cs_ * v};
}
bool Ellipse::contains(Vec2 p) const {
    Vec2 d = p - c_;
    const double u = (cs_ * d.x + sn_ * d.y) / a_;
    const double v = (-sn_ * d.x + cs_ * d.y) / b_;
    return u * u + v * v < 1;
}

StarCurve::StarCurve(Vec2 center, double r0, double amp, int arms, double phase)
    : c_(center), r0_(r0), amp_(amp), phase_(phase), arms_(arms) {
    if (!(r0 > 0) || std::abs(amp) >= 1 || arms < 1)
        throw std::invalid_argument("StarCurve: bad parameters");
}

Vec2 StarCurve::pos(double t) const {
    const double rho = r0_ * (1 + amp_ * std::cos(arms_ * t + phase_));
    return c_ + rho * Vec2{std::cos(t), std::sin(t)};
}
Vec2 StarCurve::deriv(double t) const {
    const double k = arms_;
    const double rho = r0_ * (1 + amp_ * std::cos(k * t + phase_));
    const double drho = -r0_ * amp_ * k * std::sin(k * t + phase_);
    const Vec2 u{std::cos(t), std::sin(t)}, up{-std::sin(t), std::cos(t)};
    return drho * u + rho * up;
}
Vec2 StarCurve::deriv2(double t) const {
    const double k = arms_;
    const double rho = r0_ * (1 + amp_ * std::cos(k * t + phase_));
    const double drho = -r0_ * amp_ * k * std::sin(k * t + phase_);
    const double d2rho = -r0_ * amp_ * k * k * std::cos(k * t + phase_);
    const Vec2 u{std::cos(t), std::sin(t)}, up{-std::sin(t), std::cos(t)};
    return (d2rho - rho) * u + 2 * drho * up;
}
Vec2 StarCurve::deriv3(double t) const {
    const double k = arms_;
    const double rho = r0_ * (1 + amp_ * std::cos(k * t + phase_));
    const double drho = -r0_ * amp_ * k * std::sin(k * t + phase_);
    const double d2rho = -r0_ * amp_ * k * k * std::cos(k * t + phase_);
    const double d3rho = r0_ * amp_ * k * k * k * std::sin(k * t + phase_);
    const Vec2 u{std::cos(t), std::sin(t)}, up{-std::sin(t), std::cos(t)};
    return (d3rho - 3 * drho) * u + (3 * d2rho - rho) * up;
}
bool StarCurve::contains(Vec2 p) const {
    Vec2 d = p - c_;
    const double r = d.norm();
    if (r == 0) return true;
    const double theta = std::atan2(d.y, d.x);
    return r < r0_ * (1 + amp_ * std::cos(arms_ * theta + phase_));
}

bool Domain::contains(Vec2 p) const {
    if (!outer->contains(p)) return false;
    for (const auto& hole : holes)
        if (hole->contains(p)) return false;
    return true;
}

void Domain::bounding_box(Vec2& lo, Vec2& hi) const { outer->bounding_box(lo, hi); }

double Domain::diameter() const {
    Vec2 lo, hi;
    bounding_box(lo, hi);
    return (hi - lo).norm();
}

Vec2 Domain::region_outward_normal(int i, double t) const {
    Vec2 n = curve(i).outward_normal(t);
    return i == 0 ? n : -1.0 * n;
}

namespace {

constexpr double kBlendTaylorCut = 1e-5;

// Curved-edge correction phi(xi) = (lambda(xi) - (1-xi) v0 - xi v1)/(1-xi)
// with lambda(xi) = curve(ta + xi (tb - ta)).  Near xi = 1 the quotient is
// evaluated by its Taylor form in s = 1 - xi.
void blend_terms(const Cell& c, double xi, Vec2& phi, Vec2& dphi) {
    const double dt = c.tb - c.ta;
    const double s = 1 - xi;
    const Vec2 base = c.v[1] - c.v[0];
    if (s >= kBlendTaylorCut) {
        const double t = c.ta + xi * dt;
        const Vec2 lam = c.curve->pos(t);
        const Vec2 dlam = dt * c.curve->deriv(t);
        const Vec2 num = lam - (1 - xi) * c.v[0] - xi * c.v[1];
        phi = (1.0 / s) * num;
        dphi = (1.0 / s) * (dlam - base + phi);
    } else {
        const Vec2 d1 = dt * c.curve->deriv(c.tb);
        const Vec2 d2 = (dt * dt) * c.curve->deriv2(c.tb);
        const Vec2 d3 = (dt * dt * dt) * c.curve->deriv3(c.tb);
        phi = -1.0 * (d1 - base) + (s / 2) * d2 - (s * s / 6) * d3;
        dphi = -0.5 * d2 + (s / 3) * d3;
    }
}

}  // namespace

Vec2 Cell::map(Vec2 zeta) const {
    Vec2 x, dxi, deta;
    double jac;
    map_deriv(zeta, x, dxi, deta, jac);
    return x;
}

void Cell::map_deriv(Vec2 zeta, Vec2& x, Vec2& dxi, Vec2& deta, double& jac) const {
    switch (type) {
        case CellType::Box:
            x = center + (h / 2) * zeta;
            dxi = Vec2{h / 2, 0};
            deta = Vec2{0, h / 2};
            jac = h * h / 4;
            return;
        case CellType::StraightTri:
            dxi = v[1] - v[0];
            deta = v[2] - v[0];
            x = v[0] + zeta.x * dxi + zeta.y * deta;
            jac = cross(dxi, deta);
            return;
        case CellType::CurvedTri: {
            Vec2 phi, dphi;
            blend_terms(*this, zeta.x, phi, dphi);
            const double blend = 1 - zeta.x - zeta.y;
            dxi = (v[1] - v[0]) - phi + blend * dphi;
            deta = (v[2] - v[0]) - phi;
            x = v[0] + zeta.x * (v[1] - v[0]) + zeta.y * (v[2] - v[0]) + blend * phi;
            jac = cross(dxi, deta);
            return;
        }
    }
}

double Cell::jacobian(Vec2 zeta) const {
    Vec2 x, dxi, deta;
    double jac;
    map_deriv(zeta, x, dxi, deta, jac);
    return jac;
}

Vec2 Cell::invert(Vec2 x) const {
    if (type == CellType::Box) return (2 / h) * (x - center);
    const Vec2 e1 = v[1] - v[0], e2 = v[2] - v[0];
    const double det = cross(e1, e2);
    const Vec2 r0 = x - v[0];
    Vec2 zeta{(r0.x * e2.y - r0.y * e2.x) / det, (e1.x * r0.y - e1.y * r0.x) / det};
    if (type == CellType::StraightTri) return zeta;
    const double scale = e1.norm() + e2.norm();
    for (int it = 0; it < 40; ++it) {
        Vec2 X, dxi, deta;
        double jac;
        map_deriv(zeta, X, dxi, deta, jac);
        const Vec2 r = x - X;
        if (r.norm() <= 1e-15 * scale) break;
        const Vec2 step{(r.x * deta.y - r.y * deta.x) / jac,
                        (dxi.x * r.y - dxi.y * r.x) / jac};
        zeta = zeta + step;
        if (std::abs(zeta.x) > 20 || std::abs(zeta.y) > 20) break;
    }
    return zeta;
}

bool Cell::ref_contains(Vec2 zeta, double pad) const {
    if (type == CellType::Box)
        return std::abs(zeta.x) <= 1 + pad && std::abs(zeta.y) <= 1 + pad;
    return zeta.x >= -pad && zeta.y >= -pad && zeta.x + zeta.y <= 1 + pad;
}

double Cell::area() const {
    switch (type) {
        case CellType::Box:
            return h * h;
        case CellType::StraightTri:
            return 0.5 * cross(v[1] - v[0], v[2] - v[0]);
        case CellType::CurvedTri: {
            // Collapsed tensor quadrature of the Jacobian over the simplex.
            const QuadRule1D g = gauss_legendre_on(16, 0, 1);
            double sum = 0;
            for (int iv = 0; iv < g.size(); ++iv)
                for (int iu = 0; iu < g.size(); ++iu) {
                    const double eta = g.x[iv];
                    const double xi = g.x[iu] * (1 - eta);
                    sum += g.w[iv] * g.w[iu] * (1 - eta) *
                           jacobian(Vec2{xi, eta});
                }
            return sum;
        }
    }
    return 0;
}

void Cell::bounding_box(Vec2& lo, Vec2& hi) const {
    lo = Vec2{1e300, 1e300};
    hi = Vec2{-1e300, -1e300};
    for (Vec2 p : outline(type == CellType::CurvedTri ? 32 : 2)) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
}

Vec2 Cell::ref_corner(int i) const {
    if (type == CellType::Box) {
        static const Vec2 corners[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
        return corners[i & 3];
    }
    static const Vec2 corners[3] = {{0, 0}, {1, 0}, {0, 1}};
    return corners[i % 3];
}

std::vector<Vec2> Cell::outline(int per_edge) const {
    std::vector<Vec2> pts;
    const int nc = num_corners();
    pts.reserve(nc * per_edge);
    for (int e = 0; e < nc; ++e) {
        const Vec2 a = ref_corner(e), b = ref_corner((e + 1) % nc);
        for (int j = 0; j < per_edge; ++j) {
            const double s = static_cast<double>(j) / per_edge;
            pts.push_back(map(a + s * (b - a)));
        }
    }
    return pts;
}

namespace {

double edge_dist2(const Cell& cell, Vec2 a, Vec2 b, double s, Vec2 x) {
    Vec2 p = cell.map(a + s * (b - a));
    return (p - x).norm2();
}

}  // namespace

Vec2 nearest_reference_point(const Cell& cell, Vec2 x, double* distance) {
    Vec2 zeta = cell.invert(x);
    if (cell.ref_contains(zeta, 1e-10)) {
        Vec2 p = cell.map(zeta);
        if (distance) *distance = dist(p, x);
        if (dist(p, x) < 1e-9 * (1 + std::abs(x.x) + std::abs(x.y))) return zeta;
    }
    // Exterior point (or inversion failed): minimize over the boundary,
    // edge by edge, with a sampling pass plus golden-section refinement.
    const int nc = cell.num_corners();
    double best = 1e300;
    Vec2 best_zeta{0, 0};
    const double gr = (std::sqrt(5.0) - 1) / 2;
    for (int e = 0; e < nc; ++e) {
        const Vec2 a = cell.ref_corner(e), b = cell.ref_corner((e + 1) % nc);
        const int ns = 32;
        int imin = 0;
        double dmin = 1e300;
        for (int i = 0; i <= ns; ++i) {
            const double d2 = edge_dist2(cell, a, b, static_cast<double>(i) / ns, x);
            if (d2 < dmin) {
                dmin = d2;
                imin = i;
            }
        }
        double lo = std::max(0.0, (imin - 1.0) / ns);
        double hi = std::min(1.0, (imin + 1.0) / ns);
        double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        double f1 = edge_dist2(cell, a, b, c1, x), f2 = edge_dist2(cell, a, b, c2, x);
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            if (f1 < f2) {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - gr * (hi - lo);
                f1 = edge_dist2(cell, a, b, c1, x);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + gr * (hi - lo);
                f2 = edge_dist2(cell, a, b, c2, x);
            }
        }
        const double s = 0.5 * (lo + hi);
        const double d2 = edge_dist2(cell, a, b, s, x);
        if (d2 < best) {
            best = d2;
            best_zeta = a + s * (b - a);
        }
    }
    if (distance) *distance = std::sqrt(best);
    return best_zeta;
}

}  // namespace volpot
