#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

#include "volpot/geometry.hpp"
#include "volpot/kernel.hpp"
#include "volpot/quad1d.hpp"

namespace volpot {

// Reference cells the ray reduction integrates over: the unit simplex for
// triangle cells (straight or curved) and [-1, 1]^2 for boxes.
enum class RefCell { Simplex, Box };

RefCell ref_cell_of(CellType type);
int ref_edge_count(RefCell kind);
Vec2 ref_cell_corner(RefCell kind, int i);
double ref_cell_area(RefCell kind);

// Boundary point at global parameter t; edge e covers [e, e+1) with the
// within-edge fraction linear between its corners.
Vec2 ref_boundary_point(RefCell kind, double t);
// Parameter of the boundary point nearest z (dist receives the distance).
double nearest_boundary_param(RefCell kind, Vec2 z, double* dist = nullptr);

// One Gauss-Legendre node of the outer boundary rule.  factor packs the
// whole per-ray boundary weight ((zeta - zeta_star) x tau) ds, so a ray
// quadrature only multiplies it by the inner rule's t w values.
struct BoundaryNode {
    Vec2 zeta;
    double t = 0;
    double factor = 0;
};

// Panel layout on the reference-cell boundary: M0 = 4 uniform panels per
// edge, refined by endpoints graded (ratio 1/4, five levels) toward the
// boundary point nearest zeta_star.  Panels collinear with zeta_star have
// an identically zero cross factor and are dropped from the node list; for
// a star on the boundary that removes its whole edge (both edges when the
// star sits on a corner).
struct BoundaryDiscretization {
    RefCell kind = RefCell::Simplex;
    Vec2 zeta_star;
    double t1 = 0;  // boundary parameter nearest zeta_star
    std::vector<double> endpoints;
    std::vector<BoundaryNode> nodes;
    int panels_total = 0;
    int panels_dropped = 0;
};

BoundaryDiscretization boundary_discretization(RefCell kind, Vec2 zeta_star);

// Iterated-integral quadrature for the reference-cell potential
//   V-hat[rho](zeta0) = sum_i G(R(chi_i), r0) J(chi_i) rho(chi_i) omega_i,
// stored factored: an outer boundary node list and an inner rule along each
// ray zeta_star + t (zeta_j - zeta_star).  The flat (chi_i, omega_i) view
// with omega = t_l v_l factor_j is materialized on demand.
struct RayQuadrature {
    RefCell kind = RefCell::Simplex;
    Vec2 zeta0, zeta_star;
    bool singular = true;
    double d = 0;  // physical distance from the target to R(zeta_star)
    struct Ray {
        Vec2 zeta;
        double factor = 0;
        const QuadRule1D* inner = nullptr;
    };
    std::vector<Ray> rays;

    int num_nodes() const;
    template <typename F>
    void for_each_node(F&& f) const {
        for (const Ray& ray : rays) {
            const Vec2 dir = ray.zeta - zeta_star;
            for (int l = 0; l < ray.inner->size(); ++l) {
                const double t = ray.inner->x[l];
                f(Vec2{zeta_star.x + t * dir.x, zeta_star.y + t * dir.y},
                  t * ray.inner->w[l] * ray.factor);
            }
        }
    }
    std::vector<Vec2> nodes() const;
    std::vector<double> weights() const;
    double weight_checksum() const;
};

// Composes the boundary rule around zeta_star with the singular inner rule
// (star coincides with the target) or the near inner rule bucketed per
// decade of d over each ray's physical length.  Verifies that every node
// lies in the closed reference cell away from the target and throws
// std::logic_error otherwise.  The overload without r0 maps zeta0 through
// the cell; pass the exact physical target when one exists.
RayQuadrature reduce_to_rays(const Cell& cell, Vec2 zeta0, Vec2 zeta_star,
                             const Kernel& kernel);
RayQuadrature reduce_to_rays(const Cell& cell, Vec2 zeta0, Vec2 zeta_star,
                             const Kernel& kernel, Vec2 r0);

// Number of basis elements the potential rows carry: p(p+1)/2 orthonormal
// simplex polynomials for triangles, p^2 tensor Chebyshev for boxes.
int basis_size(RefCell kind, int p);

// Applies the flattened rule: accurate reference potentials of every basis
// element at the quadrature's target.  The second overload substitutes an
// arbitrary kernel g(x, r0) (testing hook; g == 1 recovers plain moments).
Eigen::VectorXd apply_ray_quadrature(const RayQuadrature& rq, const Cell& cell,
                                     int p, const Kernel& kernel, Vec2 r0);
Eigen::VectorXd apply_ray_quadrature(const RayQuadrature& rq, const Cell& cell,
                                     int p,
                                     const std::function<double(Vec2, Vec2)>& g,
                                     Vec2 r0);

// Self-target engine.  For a fixed reference target the boundary layout,
// the split inner rules, the node set, and the basis values are shared by
// every cell of the same kind, so they are built once; row() evaluates only
// the mapped kernel.  Along each ray the inner integrand splits as
//   t G = sigma(t) (-t log t) + g_reg(t) t
// with sigma and g_reg smooth for both supported kernels (the physical
// distance r(t) factors as t times a smooth positive function), and the two
// parts are integrated by Gauss rules for the weights -t log t and t.
class SingularTargetRule {
  public:
    SingularTargetRule(RefCell kind, int p, Vec2 zeta0);

    // Accurate V-hat row at the stored target for this cell and kernel.
    Eigen::VectorXd row(const Cell& cell, const Kernel& kernel, Vec2 r0) const;

    RefCell kind() const { return kind_; }
    Vec2 target() const { return zeta0_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const Eigen::MatrixXd& basis() const { return basis_; }

  private:
    struct Node {
        Vec2 chi;
        double t = 0;
        double w = 0;  // gauss weight times boundary factor
        bool log_part = false;
    };
    RefCell kind_;
    int p_;
    Vec2 zeta0_;
    std::vector<Node> nodes_;
    Eigen::MatrixXd basis_;  // num_nodes x basis_size
};

// Accurate reference potentials at one target: the split self rule when the
// star coincides with the target, the composed near rule otherwise.
Eigen::VectorXd reference_potential_row(const Cell& cell, int p, Vec2 r0,
                                        Vec2 zeta0, Vec2 zeta_star,
                                        const Kernel& kernel);

// This cell's contribution row under the oversampled smooth rule of source
// order q: sum_s w_s J(x_s) G(x_s, r0) basis(x_s).  The summation module
// applies exactly this rule, so corrections cancel it term by term.
Eigen::VectorXd smooth_potential_row(const Cell& cell, int p, int q, Vec2 r0,
                                     const Kernel& kernel);

// correction = accurate - smooth.  Adding the correction to a smooth global
// sum replaces this cell's inaccurate near-field contribution.
Eigen::VectorXd cell_correction_row(const Cell& cell, int p, int q, Vec2 r0,
                                    Vec2 zeta0, Vec2 zeta_star, bool is_self,
                                    const Kernel& kernel);

// Endpoint singularity class of a kernel along reduction rays; both
// supported Green functions are logarithmic.
enum class SingularityClass { Logarithmic };
SingularityClass kernel_singularity_class(KernelFamily family);

// Quadrature geometry reused across cells and meshes: composed self rules
// at every simplex interpolation node, near boundary layouts for a fixed
// grid of star points along the simplex outline, and reference log-kernel
// box moments on the 5x5 lattice stencil.
struct ReferenceCorrectionTables {
    int p = 0;
    int stars_per_edge = 64;
    SingularityClass cls = SingularityClass::Logarithmic;

    std::vector<RayQuadrature> simplex_self;  // one per triangle_table(p) node

    struct NearStar {
        double t = 0;
        Vec2 zeta;
        BoundaryDiscretization layout;
    };
    std::vector<NearStar> near_stars;  // 3 * stars_per_edge, parameter order

    // box_log[(oy+2)*5 + (ox+2)](i, j) = integral over [-1,1]^2 of
    // log|zeta - zeta0_i| T_j(zeta), with target i the i-th box node offset
    // by (2 ox, 2 oy); h- and kernel-independent.
    std::vector<Eigen::MatrixXd> box_log;
};

ReferenceCorrectionTables build_reference_tables(int p, SingularityClass cls);
// Cached per p (the singularity class keys identically for both kernels).
const ReferenceCorrectionTables& reference_tables(
    int p, SingularityClass cls = SingularityClass::Logarithmic);

// Near-star entry nearest to boundary parameter t (cyclic).
const ReferenceCorrectionTables::NearStar& nearest_star(
    const ReferenceCorrectionTables& tables, double t);

// Near row built on a table star's layout instead of the exact star (the
// grid is fine enough that rows move by less than the quadrature error).
Eigen::VectorXd near_potential_row_on_star(
    const Cell& cell, int p, Vec2 r0, Vec2 zeta0,
    const ReferenceCorrectionTables::NearStar& star, const Kernel& kernel);

// Potential rows for the lattice box stencil: entry [(oy+2)*5 + (ox+2)]
// holds, per target node i of the box offset by (ox h, oy h), the V-hat row
// over the tensor Chebyshev basis.  Laplace entries derive exactly from the
// reference log table; modified Helmholtz integrates with the physical
// kernel.
std::vector<Eigen::MatrixXd> box_correction_table(int p, const Kernel& kernel,
                                                  double h);

// Text audit dump: one line per table entry with target, star, node count,
// and a weight checksum.
void dump_reference_tables(std::ostream& os,
                           const ReferenceCorrectionTables& tables);

}  // namespace volpot
