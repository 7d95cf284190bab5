#!/usr/bin/env python3
"""Offline generator for the embedded triangle interpolation node tables.

Produces src/triangle_node_data.cpp with interpolation nodes on the unit
simplex {(xi, eta) : xi, eta >= 0, xi + eta <= 1} for orders p = 1..12
(total-degree space of degree p-1, p(p+1)/2 nodes per order).

Construction: collapsed Gauss grid.  Row eta-levels are the p Gauss-Legendre
points of [0, 1]; the j-th level (ascending eta) carries p-j Gauss-Legendre
points stretched across the slice [0, 1-eta].  The resulting set is
unisolvent, strictly interior, and for every order here satisfies the two
acceptance predicates enforced below:

  * cond_2 of the orthonormal-basis Vandermonde <= 100,
  * strictly positive interpolatory quadrature weights (moment solve
    against the orthonormal basis integrals).

Run from the repository root:  python3 tools/gen_triangle_nodes.py
"""

import numpy as np
from scipy.special import eval_jacobi, roots_legendre


def koornwinder_all(p, xi, eta):
    """Orthonormal total-degree basis on the unit simplex, one column per
    (n, m), 0 <= m <= n <= p-1, ordered n-major."""
    cols = []
    one_eta = 1.0 - eta
    for n in range(p):
        for m in range(n + 1):
            # (1-eta)^m P_m(2 xi/(1-eta) - 1) via a stable polynomial
            # recurrence in (xi, eta); no division by (1-eta).
            q = np.ones_like(xi)
            qm1 = np.zeros_like(xi)
            for k in range(m):
                qn = ((2 * k + 1) * (2.0 * xi - one_eta) * q
                      - k * one_eta ** 2 * qm1) / (k + 1)
                qm1, q = q, qn
            jac = eval_jacobi(n - m, 0.0, 2 * m + 1, 1.0 - 2.0 * eta)
            cols.append(np.sqrt(2.0 * (2 * m + 1) * (n + 1)) * jac * q)
    return np.column_stack(cols)


def collapsed_nodes(p):
    u_eta, _ = roots_legendre(p)
    eta_rows = np.sort((u_eta + 1.0) / 2.0)
    xs, ys = [], []
    for j, eta in enumerate(eta_rows):
        u, _ = roots_legendre(p - j)
        xi = (1.0 - eta) * (u + 1.0) / 2.0
        xs.extend(xi)
        ys.extend([eta] * (p - j))
    return np.column_stack([np.array(xs), np.array(ys)])


def check_tables():
    out = {}
    for p in range(1, 13):
        nodes = collapsed_nodes(p)
        V = koornwinder_all(p, nodes[:, 0], nodes[:, 1])
        cond = np.linalg.cond(V)
        m = np.zeros(V.shape[1])
        m[0] = 0.5 * np.sqrt(2.0)  # integral of the constant basis element
        w = np.linalg.solve(V.T, m)
        print(f"p={p:2d}  N={len(nodes):3d}  cond(V)={cond:8.3f}  "
              f"min w={w.min():+.3e}  sum w={w.sum():.15f}")
        assert cond <= 100.0, f"cond(V) too large at p={p}"
        assert w.min() > 0.0, f"non-positive weight at p={p}"
        assert abs(w.sum() - 0.5) < 1e-13
        out[p] = nodes
    return out


def emit_cpp(tables, path):
    lines = []
    lines.append("// Embedded triangle interpolation node tables (unit simplex),")
    lines.append("// orders 1..12.  Generated offline by tools/gen_triangle_nodes.py;")
    lines.append("// do not edit by hand.")
    lines.append("")
    lines.append("namespace volpot::detail {")
    lines.append("")
    for p, nodes in tables.items():
        lines.append(f"static const double tri_nodes_p{p}[] = {{")
        for (x, y) in nodes:
            lines.append(f"    {x:.17e}, {y:.17e},")
        lines.append("};")
    lines.append("")
    lines.append("const double* triangle_node_table(int p) {")
    lines.append("    switch (p) {")
    for p in tables:
        lines.append(f"    case {p}: return tri_nodes_p{p};")
    lines.append("    default: return nullptr;")
    lines.append("    }")
    lines.append("}")
    lines.append("")
    lines.append("} // namespace volpot::detail")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    tables = check_tables()
    emit_cpp(tables, "src/triangle_node_data.cpp")
