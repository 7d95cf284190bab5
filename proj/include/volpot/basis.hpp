#pragma once

#include <Eigen/Dense>

namespace volpot {

inline int tri_dof_count(int p) { return p * (p + 1) / 2; }

// Orthonormal polynomial basis on the reference simplex T = {xi, eta >= 0,
// xi + eta <= 1}, normalized so that int_T K_i K_j = delta_ij.  Ordering is
// degree-major: index(n, m) = n(n+1)/2 + m with 0 <= m <= n < p.  Writes
// tri_dof_count(p) values.
void koornwinder_eval(int p, double xi, double eta, double* out);

// Interpolation table on the simplex: nodes, Vandermonde V(i,j) = K_j(x_i),
// its inverse C (values -> coefficients), and the interpolatory quadrature
// weights w = C^T m (m = basis integrals).  Nodes are chosen so that V is
// well conditioned and the weights are strictly positive for p = 1..12.
struct TriangleBasisTable {
    int p = 0;
    int n = 0;
    Eigen::MatrixX2d nodes;
    Eigen::MatrixXd V;
    Eigen::MatrixXd C;
    Eigen::VectorXd w;
    double cond2 = 0;  // 2-norm condition number of V
};

const TriangleBasisTable& triangle_table(int p);

// Source rule used by the oversampled smooth quadrature on the simplex.
// For q <= 12 this is the interpolatory rule of triangle_table(q); larger q
// falls back to a collapsed tensor Gauss/Gauss-Jacobi rule with positive
// weights and polynomial exactness >= q.
struct TriangleSourceRule {
    int q = 0;
    Eigen::MatrixX2d nodes;
    Eigen::VectorXd w;
};

const TriangleSourceRule& triangle_source_rule(int q);

// Maps values at the p-node set to values at the q source nodes.
const Eigen::MatrixXd& triangle_oversample(int p, int q);

// Tensor Chebyshev basis T_a(zx) T_b(zy) on the reference box [-1, 1]^2,
// collocated at the tensor grid of Chebyshev roots with Fejer first-rule
// weights.  Ordering: index(a, b) = a*p + b, nodes likewise x-major.
struct BoxBasisTable {
    int p = 0;
    int n = 0;  // p^2
    Eigen::VectorXd nodes1d, w1d;
    Eigen::MatrixX2d nodes;
    Eigen::VectorXd w;
    Eigen::MatrixXd V;
    Eigen::MatrixXd C;  // values -> tensor Chebyshev coefficients
};

const BoxBasisTable& box_table(int p);

void chebyshev2d_eval(int p, double zx, double zy, double* out);

struct BoxSourceRule {
    int q = 0;
    Eigen::MatrixX2d nodes;
    Eigen::VectorXd w;
};

const BoxSourceRule& box_source_rule(int q);

const Eigen::MatrixXd& box_oversample(int p, int q);

}  // namespace volpot
