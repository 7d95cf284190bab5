#include "volpot/singular.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "volpot/basis.hpp"

namespace volpot {

namespace {

constexpr double kInvTwoPi = 0.15915494309189533577;
constexpr double kEulerGamma = 0.57721566490153286061;

// Boundary parameters live on [0, nc) with corners at the integers.
double wrap_param(double t, int nc) {
    double r = std::fmod(t, static_cast<double>(nc));
    if (r < 0) r += nc;
    if (r >= nc) r = 0;
    return r;
}

double cyclic_dist(double a, double b, int nc) {
    double d = std::abs(a - b);
    return std::min(d, nc - d);
}

Cell reference_cell(RefCell kind) {
    Cell c;
    if (kind == RefCell::Simplex) {
        c.type = CellType::StraightTri;
        c.v[0] = {0, 0};
        c.v[1] = {1, 0};
        c.v[2] = {0, 1};
    } else {
        c.type = CellType::Box;
        c.center = {0, 0};
        c.h = 2.0;
    }
    return c;
}

void eval_basis(RefCell kind, int p, Vec2 zeta, double* out) {
    if (kind == RefCell::Box)
        chebyshev2d_eval(p, zeta.x, zeta.y, out);
    else
        koornwinder_eval(p, zeta.x, zeta.y, out);
}

}  // namespace

RefCell ref_cell_of(CellType type) {
    return type == CellType::Box ? RefCell::Box : RefCell::Simplex;
}

int ref_edge_count(RefCell kind) { return kind == RefCell::Box ? 4 : 3; }

Vec2 ref_cell_corner(RefCell kind, int i) {
    if (kind == RefCell::Simplex) {
        static const Vec2 c[3] = {{0, 0}, {1, 0}, {0, 1}};
        return c[((i % 3) + 3) % 3];
    }
    static const Vec2 c[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    return c[((i % 4) + 4) % 4];
}

double ref_cell_area(RefCell kind) { return kind == RefCell::Box ? 4.0 : 0.5; }

Vec2 ref_boundary_point(RefCell kind, double t) {
    const int nc = ref_edge_count(kind);
    t = wrap_param(t, nc);
    int e = std::min(nc - 1, static_cast<int>(std::floor(t)));
    const double s = t - e;
    const Vec2 a = ref_cell_corner(kind, e);
    const Vec2 b = ref_cell_corner(kind, e + 1);
    return a + s * (b - a);
}

double nearest_boundary_param(RefCell kind, Vec2 z, double* dist) {
    const int nc = ref_edge_count(kind);
    double best_t = 0, best_d = std::numeric_limits<double>::infinity();
    for (int e = 0; e < nc; ++e) {
        const Vec2 a = ref_cell_corner(kind, e);
        const Vec2 ab = ref_cell_corner(kind, e + 1) - a;
        const double s =
            std::clamp((z - a).dot(ab) / ab.norm2(), 0.0, 1.0);
        const double d = (z - (a + s * ab)).norm();
        if (d < best_d) {
            best_d = d;
            best_t = e + s;
        }
    }
    if (dist) *dist = best_d;
    return wrap_param(best_t, nc);
}

BoundaryDiscretization boundary_discretization(RefCell kind, Vec2 zeta_star) {
    const int nc = ref_edge_count(kind);
    const double tol = 1e-9;

    BoundaryDiscretization bd;
    bd.kind = kind;
    bd.zeta_star = zeta_star;

    const double t1 = nearest_boundary_param(kind, zeta_star, nullptr);
    bd.t1 = t1;

    std::vector<double> pts;
    pts.reserve(4 * nc + 24);
    for (int e = 0; e < nc; ++e)
        for (int j = 0; j < 4; ++j) pts.push_back(e + 0.25 * j);

    // Refine toward the boundary point nearest the star.  The grading window
    // is the base panel bracketing t1; when t1 sits on the base grid it is
    // the pair of panels either side.
    const double grid = std::round(t1 * 4.0) * 0.25;
    const bool on_grid = cyclic_dist(t1, wrap_param(grid, nc), nc) <= tol;
    if (!on_grid) pts.push_back(t1);
    double step = on_grid ? 0.5 : 0.25;
    for (int j = 1; j <= 5; ++j) {
        step *= 0.25;
        pts.push_back(wrap_param(t1 + step, nc));
        pts.push_back(wrap_param(t1 - step, nc));
    }

    // A star near a corner sees, on the edges meeting there, an integrand
    // that varies on the scale of the star-corner gap.  The t1 grading only
    // covers the single nearest edge (and for a star on the boundary that
    // edge is silenced entirely, its cross factor vanishing), so refine
    // toward every corner within reach of the star.
    const double reach = (kind == RefCell::Simplex) ? 0.5 : 1.0;
    for (int c = 0; c < nc; ++c) {
        const double dc = (zeta_star - ref_cell_corner(kind, c)).norm();
        if (dc > reach) continue;
        double cstep = 0.25;
        for (int j = 1; j <= 5; ++j) {
            cstep *= 0.25;
            pts.push_back(wrap_param(c + cstep, nc));
            pts.push_back(wrap_param(c - cstep, nc));
        }
    }

    // Snap near-grid values onto the grid so corners survive deduplication
    // exactly and no panel straddles one.
    for (double& u : pts) {
        const double q = std::round(u * 4.0) * 0.25;
        if (std::abs(u - q) <= tol) u = wrap_param(q, nc);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double>& ep = bd.endpoints;
    for (double u : pts)
        if (ep.empty() || u - ep.back() > tol) ep.push_back(u);
    if (ep.size() > 1 && ep.front() + nc - ep.back() <= tol) ep.pop_back();

    const QuadRule1D& gl = gauss_legendre(16);
    const int np = static_cast<int>(ep.size());
    bd.panels_total = np;
    bd.nodes.reserve(static_cast<size_t>(np) * gl.size());
    for (int k = 0; k < np; ++k) {
        const double a = ep[k];
        const double b = (k + 1 < np) ? ep[k + 1] : ep[0] + nc;
        int e = static_cast<int>(std::floor(a + tol));
        if (e >= nc) e -= nc;
        const Vec2 A = ref_cell_corner(kind, e);
        const Vec2 E = ref_cell_corner(kind, e + 1) - A;
        const double sa = a - e, sb = b - e;

        // Collinear panel: the cross factor vanishes along all of it.
        const double elen = E.norm();
        if (std::abs(cross(A + sa * E - zeta_star, E)) <= 1e-11 * elen &&
            std::abs(cross(A + sb * E - zeta_star, E)) <= 1e-11 * elen) {
            ++bd.panels_dropped;
            continue;
        }

        const double half = 0.5 * (sb - sa);
        const double mid = 0.5 * (sa + sb);
        for (int l = 0; l < gl.size(); ++l) {
            const double s = mid + half * gl.x[l];
            BoundaryNode node;
            node.zeta = A + s * E;
            node.t = e + s;
            node.factor = cross(node.zeta - zeta_star, E) * (gl.w[l] * half);
            bd.nodes.push_back(node);
        }
    }
    return bd;
}

int RayQuadrature::num_nodes() const {
    int n = 0;
    for (const Ray& ray : rays) n += ray.inner->size();
    return n;
}

std::vector<Vec2> RayQuadrature::nodes() const {
    std::vector<Vec2> out;
    out.reserve(num_nodes());
    for_each_node([&](Vec2 chi, double) { out.push_back(chi); });
    return out;
}

std::vector<double> RayQuadrature::weights() const {
    std::vector<double> out;
    out.reserve(num_nodes());
    for_each_node([&](Vec2, double w) { out.push_back(w); });
    return out;
}

double RayQuadrature::weight_checksum() const {
    double s = 0;
    for_each_node([&](Vec2, double w) { s += w; });
    return s;
}

namespace {

bool is_self_target(Vec2 zeta0, Vec2 zeta_star) {
    return dist(zeta_star, zeta0) <= 1e-12 * (1.0 + zeta0.norm());
}

RayQuadrature assemble_rays(const Cell& cell, Vec2 zeta0, Vec2 zeta_star,
                            Vec2 r0, const BoundaryDiscretization& bd) {
    RayQuadrature rq;
    rq.kind = bd.kind;
    rq.zeta0 = zeta0;
    rq.zeta_star = zeta_star;
    rq.singular = is_self_target(zeta0, zeta_star);
    rq.rays.reserve(bd.nodes.size());

    bool all_singular = rq.singular;
    if (!rq.singular) {
        Vec2 lo, hi;
        cell.bounding_box(lo, hi);
        rq.d = dist(r0, cell.map(zeta_star));
        // Below roundoff of the cell size the near grading cannot tell the
        // target from the star; the endpoint-singular rule serves both.
        all_singular = rq.d <= 1e-14 * (hi - lo).norm();
    }

    if (all_singular) {
        const QuadRule1D* inner = &ray_singular_rule();
        for (const BoundaryNode& n : bd.nodes)
            rq.rays.push_back({n.zeta, n.factor, inner});
    } else {
        const Vec2 rstar = cell.map(zeta_star);
        for (const BoundaryNode& n : bd.nodes) {
            const double len = dist(cell.map(n.zeta), rstar);
            const double deff =
                std::clamp(rq.d / std::max(len, 1e-300), 1e-9, 16.0);
            rq.rays.push_back({n.zeta, n.factor, &ray_near_rule(deff)});
        }
    }

    const double pad = 1e-12;
    rq.for_each_node([&](Vec2 chi, double) {
        const bool inside =
            rq.kind == RefCell::Box
                ? std::abs(chi.x) <= 1 + pad && std::abs(chi.y) <= 1 + pad
                : chi.x >= -pad && chi.y >= -pad && chi.x + chi.y <= 1 + pad;
        if (!inside)
            throw std::logic_error("ray node left the reference cell");
        if (chi.x == zeta0.x && chi.y == zeta0.y)
            throw std::logic_error("ray node coincides with the target");
    });
    return rq;
}

}  // namespace

RayQuadrature reduce_to_rays(const Cell& cell, Vec2 zeta0, Vec2 zeta_star,
                             const Kernel& kernel) {
    return reduce_to_rays(cell, zeta0, zeta_star, kernel, cell.map(zeta0));
}

RayQuadrature reduce_to_rays(const Cell& cell, Vec2 zeta0, Vec2 zeta_star,
                             const Kernel& kernel, Vec2 r0) {
    kernel_singularity_class(kernel.family);
    const BoundaryDiscretization bd =
        boundary_discretization(ref_cell_of(cell.type), zeta_star);
    return assemble_rays(cell, zeta0, zeta_star, r0, bd);
}

int basis_size(RefCell kind, int p) {
    return kind == RefCell::Box ? p * p : tri_dof_count(p);
}

Eigen::VectorXd apply_ray_quadrature(const RayQuadrature& rq, const Cell& cell,
                                     int p, const Kernel& kernel, Vec2 r0) {
    const int nb = basis_size(rq.kind, p);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nb);
    std::vector<double> phi(nb);
    rq.for_each_node([&](Vec2 chi, double w) {
        Vec2 x, dxi, deta;
        double jac;
        cell.map_deriv(chi, x, dxi, deta, jac);
        const double c = w * jac * kernel.radial_r2((x - r0).norm2());
        eval_basis(rq.kind, p, chi, phi.data());
        for (int n = 0; n < nb; ++n) row[n] += c * phi[n];
    });
    return row;
}

Eigen::VectorXd apply_ray_quadrature(const RayQuadrature& rq, const Cell& cell,
                                     int p,
                                     const std::function<double(Vec2, Vec2)>& g,
                                     Vec2 r0) {
    const int nb = basis_size(rq.kind, p);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nb);
    std::vector<double> phi(nb);
    rq.for_each_node([&](Vec2 chi, double w) {
        Vec2 x, dxi, deta;
        double jac;
        cell.map_deriv(chi, x, dxi, deta, jac);
        const double c = w * jac * g(x, r0);
        eval_basis(rq.kind, p, chi, phi.data());
        for (int n = 0; n < nb; ++n) row[n] += c * phi[n];
    });
    return row;
}

namespace {

// I0(x) and T(x) = K0(x) + log(x/2) I0(x) from the shared ascending series;
// every term is positive, so both sums are stable.  Used for x = lambda r
// up to ~8, past which the split row falls back to the composite rule.
void i0_and_t(double x, double& i0, double& tser) {
    const double u = 0.25 * x * x;
    double term = 1.0, hk = 0.0;
    i0 = 1.0;
    double hsum = 0.0;
    for (int k = 1; k <= 80; ++k) {
        term *= u / (static_cast<double>(k) * k);
        hk += 1.0 / k;
        i0 += term;
        hsum += hk * term;
        if (term * (hk + 1.0) <= 1e-18 * (i0 + hsum)) break;
    }
    tser = hsum - kEulerGamma * i0;
}

double cell_diameter(const Cell& cell) {
    Vec2 lo, hi;
    cell.bounding_box(lo, hi);
    return (hi - lo).norm();
}

}  // namespace

SingularTargetRule::SingularTargetRule(RefCell kind, int p, Vec2 zeta0)
    : kind_(kind), p_(p), zeta0_(zeta0) {
    const BoundaryDiscretization bd = boundary_discretization(kind, zeta0);
    const QuadRule1D& qlog = gauss_weight_tlog(20);
    const QuadRule1D& qt = gauss_weight_t(20);
    nodes_.reserve(bd.nodes.size() * (qlog.size() + qt.size()));
    for (const BoundaryNode& bn : bd.nodes) {
        const Vec2 dir = bn.zeta - zeta0;
        for (int l = 0; l < qlog.size(); ++l)
            nodes_.push_back({zeta0 + qlog.x[l] * dir, qlog.x[l],
                              qlog.w[l] * bn.factor, true});
        for (int l = 0; l < qt.size(); ++l)
            nodes_.push_back({zeta0 + qt.x[l] * dir, qt.x[l],
                              qt.w[l] * bn.factor, false});
    }
    const int nb = basis_size(kind, p);
    basis_.resize(static_cast<Eigen::Index>(nodes_.size()), nb);
    std::vector<double> phi(nb);
    for (size_t i = 0; i < nodes_.size(); ++i) {
        eval_basis(kind, p, nodes_[i].chi, phi.data());
        for (int n = 0; n < nb; ++n)
            basis_(static_cast<Eigen::Index>(i), n) = phi[n];
    }
}

Eigen::VectorXd SingularTargetRule::row(const Cell& cell, const Kernel& kernel,
                                        Vec2 r0) const {
    const bool helmholtz = kernel.family == KernelFamily::ModifiedHelmholtz;
    if (helmholtz && kernel.lambda * cell_diameter(cell) > 8.0) {
        // The entire-series split loses digits once lambda r is large; the
        // graded composite rule has no such limit.
        RayQuadrature rq = reduce_to_rays(cell, zeta0_, zeta0_, kernel, r0);
        return apply_ray_quadrature(rq, cell, p_, kernel, r0);
    }

    Eigen::VectorXd kap(static_cast<Eigen::Index>(nodes_.size()));
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& nd = nodes_[i];
        Vec2 x, dxi, deta;
        double jac;
        cell.map_deriv(nd.chi, x, dxi, deta, jac);
        const double r = dist(x, r0);
        double c;
        if (!helmholtz) {
            c = nd.log_part ? kInvTwoPi : -kInvTwoPi * std::log(r / nd.t);
        } else {
            double i0, tser;
            i0_and_t(kernel.lambda * r, i0, tser);
            c = nd.log_part
                    ? kInvTwoPi * i0
                    : kInvTwoPi *
                          (tser -
                           i0 * std::log(kernel.lambda * r / (2.0 * nd.t)));
        }
        kap[static_cast<Eigen::Index>(i)] = nd.w * jac * c;
    }
    return basis_.transpose() * kap;
}

Eigen::VectorXd reference_potential_row(const Cell& cell, int p, Vec2 r0,
                                        Vec2 zeta0, Vec2 zeta_star,
                                        const Kernel& kernel) {
    if (is_self_target(zeta0, zeta_star)) {
        SingularTargetRule rule(ref_cell_of(cell.type), p, zeta0);
        return rule.row(cell, kernel, r0);
    }
    RayQuadrature rq = reduce_to_rays(cell, zeta0, zeta_star, kernel, r0);
    return apply_ray_quadrature(rq, cell, p, kernel, r0);
}

Eigen::VectorXd smooth_potential_row(const Cell& cell, int p, int q, Vec2 r0,
                                     const Kernel& kernel) {
    const RefCell kind = ref_cell_of(cell.type);
    const int nb = basis_size(kind, p);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nb);
    std::vector<double> phi(nb);
    auto add = [&](Vec2 chi, double wq) {
        Vec2 x, dxi, deta;
        double jac;
        cell.map_deriv(chi, x, dxi, deta, jac);
        const double r2 = (x - r0).norm2();
        // A source node exactly on the target contributes nothing; the
        // summation loops skip the same pairing.
        if (r2 == 0.0) return;
        const double c = wq * jac * kernel.radial_r2(r2);
        eval_basis(kind, p, chi, phi.data());
        for (int n = 0; n < nb; ++n) row[n] += c * phi[n];
    };
    if (kind == RefCell::Box) {
        const BoxSourceRule& sr = box_source_rule(q);
        for (Eigen::Index s = 0; s < sr.nodes.rows(); ++s)
            add({sr.nodes(s, 0), sr.nodes(s, 1)}, sr.w[s]);
    } else {
        const TriangleSourceRule& sr = triangle_source_rule(q);
        for (Eigen::Index s = 0; s < sr.nodes.rows(); ++s)
            add({sr.nodes(s, 0), sr.nodes(s, 1)}, sr.w[s]);
    }
    return row;
}

Eigen::VectorXd cell_correction_row(const Cell& cell, int p, int q, Vec2 r0,
                                    Vec2 zeta0, Vec2 zeta_star, bool is_self,
                                    const Kernel& kernel) {
    Eigen::VectorXd acc;
    if (is_self) {
        SingularTargetRule rule(ref_cell_of(cell.type), p, zeta0);
        acc = rule.row(cell, kernel, r0);
    } else {
        RayQuadrature rq = reduce_to_rays(cell, zeta0, zeta_star, kernel, r0);
        acc = apply_ray_quadrature(rq, cell, p, kernel, r0);
    }
    return acc - smooth_potential_row(cell, p, q, r0, kernel);
}

SingularityClass kernel_singularity_class(KernelFamily family) {
    switch (family) {
        case KernelFamily::Laplace:
        case KernelFamily::ModifiedHelmholtz:
            return SingularityClass::Logarithmic;
    }
    throw std::invalid_argument("unknown kernel family");
}

namespace {

// Reference log moments over [-1,1]^2 for the 5x5 offset stencil.  The
// centered block uses the split self rule; the touching ring uses the near
// reduction; the outer ring is far enough for a plain tensor rule.
std::vector<Eigen::MatrixXd> build_box_log(int p) {
    const BoxBasisTable& bt = box_table(p);
    const Cell box = reference_cell(RefCell::Box);
    const Kernel lap = make_kernel(KernelFamily::Laplace);
    const int nb = p * p;
    const int nt = bt.n;

    std::vector<Eigen::MatrixXd> out(25);
    for (int oy = -2; oy <= 2; ++oy) {
        for (int ox = -2; ox <= 2; ++ox) {
            Eigen::MatrixXd m(nt, nb);
            const int ring = std::max(std::abs(ox), std::abs(oy));
            for (int i = 0; i < nt; ++i) {
                const Vec2 node{bt.nodes(i, 0), bt.nodes(i, 1)};
                const Vec2 z0{node.x + 2.0 * ox, node.y + 2.0 * oy};
                Eigen::VectorXd row;
                if (ring == 0) {
                    SingularTargetRule rule(RefCell::Box, p, z0);
                    row = rule.row(box, lap, z0);
                } else if (ring == 1) {
                    const Vec2 zs = nearest_reference_point(box, z0, nullptr);
                    row = apply_ray_quadrature(
                        reduce_to_rays(box, z0, zs, lap, z0), box, p, lap, z0);
                } else {
                    row = smooth_potential_row(box, p, 30, z0, lap);
                }
                // log moments carry no kernel prefactor
                m.row(i) = row.transpose() / -kInvTwoPi;
            }
            out[(oy + 2) * 5 + (ox + 2)] = std::move(m);
        }
    }
    return out;
}

}  // namespace

ReferenceCorrectionTables build_reference_tables(int p, SingularityClass cls) {
    if (p < 1 || p > 12)
        throw std::invalid_argument("reference tables: order out of range");
    ReferenceCorrectionTables tb;
    tb.p = p;
    tb.cls = cls;

    const TriangleBasisTable& tt = triangle_table(p);
    const Cell tri = reference_cell(RefCell::Simplex);
    const Kernel lap = make_kernel(KernelFamily::Laplace);
    tb.simplex_self.reserve(tt.n);
    for (int i = 0; i < tt.n; ++i) {
        const Vec2 z{tt.nodes(i, 0), tt.nodes(i, 1)};
        tb.simplex_self.push_back(reduce_to_rays(tri, z, z, lap));
    }

    const int ns = 3 * tb.stars_per_edge;
    tb.near_stars.reserve(ns);
    for (int k = 0; k < ns; ++k) {
        ReferenceCorrectionTables::NearStar star;
        star.t = static_cast<double>(k) / tb.stars_per_edge;
        star.zeta = ref_boundary_point(RefCell::Simplex, star.t);
        star.layout = boundary_discretization(RefCell::Simplex, star.zeta);
        tb.near_stars.push_back(std::move(star));
    }

    tb.box_log = build_box_log(p);
    return tb;
}

const ReferenceCorrectionTables& reference_tables(int p,
                                                  SingularityClass cls) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>,
                    std::unique_ptr<ReferenceCorrectionTables>>
        cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(p, static_cast<int>(cls));
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache
                 .emplace(key, std::make_unique<ReferenceCorrectionTables>(
                                   build_reference_tables(p, cls)))
                 .first;
    return *it->second;
}

const ReferenceCorrectionTables::NearStar& nearest_star(
    const ReferenceCorrectionTables& tables, double t) {
    const int n = static_cast<int>(tables.near_stars.size());
    const double u = wrap_param(t, 3);
    const long k = std::lround(u * tables.stars_per_edge);
    return tables.near_stars[static_cast<size_t>(k % n)];
}

Eigen::VectorXd near_potential_row_on_star(
    const Cell& cell, int p, Vec2 r0, Vec2 zeta0,
    const ReferenceCorrectionTables::NearStar& star, const Kernel& kernel) {
    kernel_singularity_class(kernel.family);
    RayQuadrature rq = assemble_rays(cell, zeta0, star.zeta, r0, star.layout);
    return apply_ray_quadrature(rq, cell, p, kernel, r0);
}

std::vector<Eigen::MatrixXd> box_correction_table(int p, const Kernel& kernel,
                                                  double h) {
    const ReferenceCorrectionTables& tb =
        reference_tables(p, kernel_singularity_class(kernel.family));
    const int nb = p * p;
    std::vector<Eigen::MatrixXd> out(25);

    if (kernel.family == KernelFamily::Laplace) {
        // Rescaling [-1,1]^2 onto an h-box shifts every log moment by
        // log(h/2) times the plain basis moment and scales areas by
        // (h/2)^2.
        Eigen::VectorXd beta(nb);
        auto cheb_moment = [](int k) {
            return k % 2 ? 0.0 : 2.0 / (1.0 - static_cast<double>(k) * k);
        };
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                beta[a * p + b] = cheb_moment(a) * cheb_moment(b);
        const double area = 0.25 * h * h;
        const double shift = std::log(0.5 * h);
        for (int o = 0; o < 25; ++o) {
            const Eigen::MatrixXd& L = tb.box_log[o];
            out[o] = -kInvTwoPi * area *
                     (L + Eigen::VectorXd::Ones(L.rows()) *
                              (shift * beta.transpose()));
        }
        return out;
    }

    const BoxBasisTable& bt = box_table(p);
    Cell box = reference_cell(RefCell::Box);
    box.h = h;
    const double half = 0.5 * h;
    for (int oy = -2; oy <= 2; ++oy) {
        for (int ox = -2; ox <= 2; ++ox) {
            Eigen::MatrixXd m(bt.n, nb);
            const int ring = std::max(std::abs(ox), std::abs(oy));
            for (int i = 0; i < bt.n; ++i) {
                const Vec2 z0{bt.nodes(i, 0) + 2.0 * ox,
                              bt.nodes(i, 1) + 2.0 * oy};
                const Vec2 r0{half * z0.x, half * z0.y};
                if (ring == 0) {
                    SingularTargetRule rule(RefCell::Box, p, z0);
                    m.row(i) = rule.row(box, kernel, r0).transpose();
                } else if (ring == 1) {
                    const Vec2 zs = nearest_reference_point(box, r0, nullptr);
                    m.row(i) = apply_ray_quadrature(
                                   reduce_to_rays(box, z0, zs, kernel, r0),
                                   box, p, kernel, r0)
                                   .transpose();
                } else {
                    m.row(i) =
                        smooth_potential_row(box, p, 30, r0, kernel)
                            .transpose();
                }
            }
            out[(oy + 2) * 5 + (ox + 2)] = std::move(m);
        }
    }
    return out;
}

void dump_reference_tables(std::ostream& os,
                           const ReferenceCorrectionTables& tables) {
    os << std::setprecision(16);
    os << "reference tables p=" << tables.p
       << " stars_per_edge=" << tables.stars_per_edge << "\n";
    for (size_t i = 0; i < tables.simplex_self.size(); ++i) {
        const RayQuadrature& rq = tables.simplex_self[i];
        os << "self " << i << " target (" << rq.zeta0.x << ", " << rq.zeta0.y
           << ") star (" << rq.zeta_star.x << ", " << rq.zeta_star.y
           << ") nodes " << rq.num_nodes() << " checksum "
           << rq.weight_checksum() << "\n";
    }
    for (size_t k = 0; k < tables.near_stars.size(); ++k) {
        const ReferenceCorrectionTables::NearStar& ns = tables.near_stars[k];
        double checksum = 0;
        for (const BoundaryNode& n : ns.layout.nodes) checksum += n.factor;
        os << "near " << k << " t " << ns.t << " star (" << ns.zeta.x << ", "
           << ns.zeta.y << ") panels " << ns.layout.panels_total << "/"
           << ns.layout.panels_dropped << " nodes " << ns.layout.nodes.size()
           << " checksum " << checksum << "\n";
    }
    for (int oy = -2; oy <= 2; ++oy)
        for (int ox = -2; ox <= 2; ++ox) {
            const Eigen::MatrixXd& m = tables.box_log[(oy + 2) * 5 + (ox + 2)];
            os << "box (" << ox << ", " << oy << ") targets " << m.rows()
               << " basis " << m.cols() << " checksum " << m.sum() << "\n";
        }
}

}  // namespace volpot
