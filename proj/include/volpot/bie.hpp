#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "volpot/geometry.hpp"
#include "volpot/kernel.hpp"
#include "volpot/mesh.hpp"
#include "volpot/potential.hpp"

namespace volpot {

// Nystrom discretization of the double-layer operator
//   D[phi](x) = int_Gamma dG(y, x)/dn(y) phi(y) ds(y)
// with n the outward normal of the region enclosed by each curve.  The
// Dirichlet system is (s_i I + D) phi = rhs with s_i = -1/2 on the outer
// curve (the domain lies inside it) and +1/2 on hole curves.  The Laplace
// kernel is smooth on a smooth curve and gets plain trapezoidal weights;
// the modified Helmholtz kernel carries a log singularity and is split
// against log(4 sin^2((t - tau)/2)) with spectral product weights.
//
// On a multiply connected domain the double layer alone cannot produce the
// log-capacity part of a harmonic field around a hole, so for Laplace the
// representation is completed with one log source per hole,
//   u_H = D[phi] + sum_k a_k G(x, c_k),
// and the square system is augmented with the moment conditions
// int_{C_k} phi ds = 0.  The solution vector is phi followed by the a_k.
struct BoundarySystem {
    struct CurveBlock {
        const Curve* curve = nullptr;
        double sign = -0.5;  // -1/2 outer curve, +1/2 holes
        int n = 0;
        int offset = 0;  // first row/column in the global system
        double length = 0;
        double diam = 0;
        std::vector<double> t;
        std::vector<Vec2> x;
        std::vector<Vec2> normal;  // outward from the enclosed region
        std::vector<double> speed;
        std::vector<double> curv;
        // 8x refined geometry for close evaluation
        std::vector<Vec2> fine_x;
        std::vector<Vec2> fine_normal;
        std::vector<double> fine_speed;
        Vec2 log_center;  // completion source location (holes)
    };

    const Domain* domain = nullptr;
    Kernel kernel;
    std::vector<CurveBlock> curves;
    int n_density = 0;
    int n_aux = 0;  // log-completion coefficients (Laplace with holes)
    Eigen::MatrixXd matrix;

    int size() const { return n_density + n_aux; }
    // All density nodes in system order (concatenated curve blocks).
    std::vector<Vec2> nodes() const;
};

// n_per_curve: one entry per curve (outer first, holes after), or a single
// entry broadcast to all curves.  Every count must be even and >= 16.
BoundarySystem assemble_nystrom(const Domain& dom, const Kernel& kernel,
                                const std::vector<int>& n_per_curve);

struct SolveReport {
    int iterations = 0;
    bool dense_direct = false;
    std::vector<double> residual_history;  // relative residuals
};

// Solves the assembled system to relative residual <= tol: LU for small
// systems, full-basis GMRES otherwise (force_iterative skips the LU path).
// Throws with the residual history if GMRES has not converged after 500
// iterations.
std::vector<double> solve_density(const BoundarySystem& sys,
                                  const std::vector<double>& rhs,
                                  double tol = 1e-14,
                                  SolveReport* report = nullptr,
                                  bool force_iterative = false);

// u_H at interior targets: trapezoidal sums, switching to the 8x upsampled
// density and geometry within 5 node spacings of a curve.  Targets closer
// to a curve than 0.02 of its diameter are rejected unless allow_close is
// set (the upsampled rule keeps full accuracy well inside that collar for
// the default boundary resolutions, but the contract is conservative).
std::vector<double> eval_layer_potential(const BoundarySystem& sys,
                                         const std::vector<double>& coeffs,
                                         const std::vector<Vec2>& targets,
                                         bool allow_close = false);

struct BvpOptions {
    int n_boundary = 0;       // per-curve node count, 0 picks automatically
    double gmres_tol = 1e-14;
    double epsilon = 1e-12;   // far-field summation accuracy
};

struct BvpResult {
    std::vector<double> u;         // full solution at the requested targets
    std::vector<double> u_nodes;   // solution at mesh nodes (mesh_nodes order)
    std::vector<double> up_nodes;  // particular part at mesh nodes
    std::vector<double> density;   // phi plus any completion coefficients
    std::vector<int> n_per_curve;
    SolveReport solve;
    OperatorStats op_stats;
    ApplyTimings apply_timings;
};

// Inhomogeneous Dirichlet solve: u_P = V[f] from the volume operator, the
// density from (s I + D) phi = g - u_P on the boundary nodes, and
// u = u_H + u_P returned at the targets.  f_samples live at
// mesh_nodes(mesh, p).  Node values of u inside the close-evaluation collar
// carry the boundary-evaluation error of the upsampled rule.
BvpResult solve_bvp(const HybridMesh& mesh, const Kernel& kernel, int p, int q,
                    const std::vector<double>& f_samples,
                    const std::function<double(Vec2)>& g,
                    const std::vector<Vec2>& targets,
                    const BvpOptions& opts = {});

}  // namespace volpot
