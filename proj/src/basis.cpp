#include "volpot/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "volpot/quad1d.hpp"

namespace volpot {

namespace detail {
const double* triangle_node_table(int p);
}

namespace {

constexpr int kMaxTriOrder = 12;
constexpr int kMaxBoxOrder = 16;

// Auxiliary polynomials Q_m(xi, eta) of the simplex basis,
//   Q_0 = 1,  Q_1 = 2 xi - (1 - eta),
//   (m+1) Q_{m+1} = (2m+1) (2 xi - (1 - eta)) Q_m - m (1 - eta)^2 Q_{m-1},
// which evaluates (1-eta)^m P_m((2 xi - (1-eta))/(1-eta)) without dividing
// by (1 - eta), so the eta -> 1 corner is regular.
void eval_q(int p, double xi, double eta, double* q) {
    const double s = 2 * xi - (1 - eta);
    const double z2 = (1 - eta) * (1 - eta);
    q[0] = 1;
    if (p > 1) q[1] = s;
    for (int m = 1; m + 1 < p; ++m)
        q[m + 1] = ((2 * m + 1) * s * q[m] - m * z2 * q[m - 1]) / (m + 1);
}

double jacobi_next(int k, double beta, double x, double pk, double pkm1) {
    // Three-term recurrence for P_{k+1}^{(0, beta)}.
    const double a1 = 2 * (k + 1) * (k + beta + 1) * (2 * k + beta);
    const double a2 = (2 * k + beta + 1) * (-beta * beta);
    const double a3 = (2 * k + beta) * (2 * k + beta + 1) * (2 * k + beta + 2);
    const double a4 = 2 * (k + beta) * k * (2 * k + beta + 2);
    return ((a2 + a3 * x) * pk - a4 * pkm1) / a1;
}

std::mutex g_tri_mutex;
std::unique_ptr<TriangleBasisTable> g_tri_tables[kMaxTriOrder + 1];

TriangleBasisTable build_triangle_table(int p) {
    TriangleBasisTable t;
    t.p = p;
    t.n = tri_dof_count(p);
    const double* raw = detail::triangle_node_table(p);
    if (!raw) throw std::logic_error("missing triangle node table");
    t.nodes.resize(t.n, 2);
    for (int i = 0; i < t.n; ++i) {
        t.nodes(i, 0) = raw[2 * i];
        t.nodes(i, 1) = raw[2 * i + 1];
    }
    t.V.resize(t.n, t.n);
    std::vector<double> row(t.n);
    for (int i = 0; i < t.n; ++i) {
        koornwinder_eval(p, t.nodes(i, 0), t.nodes(i, 1), row.data());
        for (int j = 0; j < t.n; ++j) t.V(i, j) = row[j];
    }
    t.C = t.V.inverse();
    // Basis integrals: only the constant mode K_00 = sqrt(2) has a nonzero
    // integral over the simplex, 1/2 * sqrt(2) = 1/sqrt(2).
    Eigen::VectorXd m = Eigen::VectorXd::Zero(t.n);
    m(0) = 1.0 / std::sqrt(2.0);
    t.w = t.C.transpose() * m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(t.V);
    t.cond2 = svd.singularValues()(0) / svd.singularValues()(t.n - 1);
    return t;
}

std::mutex g_tri_src_mutex;
std::map<int, TriangleSourceRule> g_tri_src_cache;

// Collapsed tensor rule: with eta = v, xi = u (1 - v) the simplex integral
// becomes int_0^1 int_0^1 f(u(1-v), v) (1-v) du dv, handled by a
// Gauss-Legendre rule in u and a Gauss-Jacobi rule with weight (1-v) in v.
TriangleSourceRule build_collapsed_rule(int q) {
    const int m = (q + 1) / 2 + 1;  // exact for total degree <= 2m - 1 > q
    const QuadRule1D gl = gauss_legendre_on(m, 0, 1);
    // Gauss-Jacobi (alpha = 1, beta = 0) via the symmetric Jacobi matrix.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    const double alpha = 1, beta = 0;
    for (int k = 0; k < m; ++k) {
        double ab = 2 * k + alpha + beta;
        J(k, k) = (beta * beta - alpha * alpha) / ((ab + 2) * (ab == 0 ? 1 : ab));
        if (k + 1 < m) {
            double kk = k + 1;
            double num = 4 * kk * (kk + alpha) * (kk + beta) * (kk + alpha + beta);
            double ab2 = 2 * kk + alpha + beta;
            double den = ab2 * ab2 * (ab2 + 1) * (ab2 - 1);
            double b = std::sqrt(num / den);
            J(k, k + 1) = b;
            J(k + 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // mu_0 = int_{-1}^{1} (1-x) dx = 2
    Eigen::VectorXd gj_x = es.eigenvalues();
    Eigen::VectorXd gj_w(m);
    for (int k = 0; k < m; ++k) {
        double v0 = es.eigenvectors()(0, k);
        gj_w(k) = 2.0 * v0 * v0;
    }
    TriangleSourceRule r;
    r.q = q;
    r.nodes.resize(m * m, 2);
    r.w.resize(m * m);
    for (int iv = 0; iv < m; ++iv) {
        // Map x in [-1,1] with weight (1-x) to v in [0,1] with weight (1-v):
        // v = (1+x)/2, dv = dx/2, (1-v) = (1-x)/2, so dV-weight = gj_w / 4.
        const double v = 0.5 * (1 + gj_x(iv));
        const double wv = 0.25 * gj_w(iv);
        for (int iu = 0; iu < m; ++iu) {
            const int idx = iv * m + iu;
            r.nodes(idx, 0) = gl.x[iu] * (1 - v);
            r.nodes(idx, 1) = v;
            r.w(idx) = wv * gl.w[iu];
        }
    }
    return r;
}

std::mutex g_tri_over_mutex;
std::map<std::pair<int, int>, Eigen::MatrixXd> g_tri_over_cache;

std::mutex g_box_mutex;
std::unique_ptr<BoxBasisTable> g_box_tables[kMaxBoxOrder + 1];

void cheb1d(int p, double z, double* t) {
    t[0] = 1;
    if (p > 1) t[1] = z;
    for (int k = 2; k < p; ++k) t[k] = 2 * z * t[k - 1] - t[k - 2];
}

// Fejer first rule: interpolatory weights at the Chebyshev roots
// z_i = cos((2i+1) pi / (2p)), w_i = (2/p) (1 - 2 sum_k cos(2k theta_i) / (4k^2 - 1)).
void fejer1(int p, Eigen::VectorXd& z, Eigen::VectorXd& w) {
    z.resize(p);
    w.resize(p);
    for (int i = 0; i < p; ++i) {
        const double theta = (2 * i + 1) * M_PI / (2 * p);
        double s = 0;
        for (int k = 1; k <= p / 2; ++k)
            s += std::cos(2 * k * theta) / (4.0 * k * k - 1.0);
        z(i) = -std::cos(theta);  // ascending
        w(i) = (2.0 / p) * (1 - 2 * s);
    }
    // z from cos is descending in i; flip to keep nodes ascending while the
    // weights stay symmetric.
}

BoxBasisTable build_box_table(int p) {
    BoxBasisTable t;
    t.p = p;
    t.n = p * p;
    fejer1(p, t.nodes1d, t.w1d);
    t.nodes.resize(t.n, 2);
    t.w.resize(t.n);
    for (int ix = 0; ix < p; ++ix)
        for (int iy = 0; iy < p; ++iy) {
            const int idx = ix * p + iy;
            t.nodes(idx, 0) = t.nodes1d(ix);
            t.nodes(idx, 1) = t.nodes1d(iy);
            t.w(idx) = t.w1d(ix) * t.w1d(iy);
        }
    t.V.resize(t.n, t.n);
    std::vector<double> row(t.n);
    for (int i = 0; i < t.n; ++i) {
        chebyshev2d_eval(p, t.nodes(i, 0), t.nodes(i, 1), row.data());
        for (int j = 0; j < t.n; ++j) t.V(i, j) = row[j];
    }
    t.C = t.V.inverse();
    return t;
}

std::mutex g_box_src_mutex;
std::map<int, BoxSourceRule> g_box_src_cache;

std::mutex g_box_over_mutex;
std::map<std::pair<int, int>, Eigen::MatrixXd> g_box_over_cache;

}  // namespace

void koornwinder_eval(int p, double xi, double eta, double* out) {
    if (p < 1) throw std::invalid_argument("koornwinder_eval: p < 1");
    std::vector<double> q(p);
    eval_q(p, xi, eta, q.data());
    const double x = 1 - 2 * eta;  // Jacobi argument
    for (int m = 0; m < p; ++m) {
        const double beta = 2 * m + 1;
        double pkm1 = 0, pk = 1;
        for (int n = m; n < p; ++n) {
            const int k = n - m;
            if (k > 0) {
                double pk1;
                if (k == 1) {
                    pk1 = ((beta + 2) * x - beta) / 2;
                } else {
                    pk1 = jacobi_next(k - 1, beta, x, pk, pkm1);
                }
                pkm1 = pk;
                pk = pk1;
            }
            const double gamma = std::sqrt(2 * (2 * m + 1) * (n + 1.0));
            out[n * (n + 1) / 2 + m] = gamma * pk * q[m];
        }
    }
}

const TriangleBasisTable& triangle_table(int p) {
    if (p < 1 || p > kMaxTriOrder)
        throw std::invalid_argument("triangle_table: order out of range");
    std::lock_guard<std::mutex> lock(g_tri_mutex);
    if (!g_tri_tables[p])
        g_tri_tables[p] = std::make_unique<TriangleBasisTable>(build_triangle_table(p));
    return *g_tri_tables[p];
}

const TriangleSourceRule& triangle_source_rule(int q) {
    if (q < 1 || q > 2 * kMaxTriOrder)
        throw std::invalid_argument("triangle_source_rule: order out of range");
    std::lock_guard<std::mutex> lock(g_tri_src_mutex);
    auto it = g_tri_src_cache.find(q);
    if (it == g_tri_src_cache.end()) {
        TriangleSourceRule r;
        if (q <= kMaxTriOrder) {
            const TriangleBasisTable& t = triangle_table(q);
            r.q = q;
            r.nodes = t.nodes;
            r.w = t.w;
        } else {
            r = build_collapsed_rule(q);
        }
        it = g_tri_src_cache.emplace(q, std::move(r)).first;
    }
    return it->second;
}

const Eigen::MatrixXd& triangle_oversample(int p, int q) {
    std::lock_guard<std::mutex> lock(g_tri_over_mutex);
    auto key = std::make_pair(p, q);
    auto it = g_tri_over_cache.find(key);
    if (it == g_tri_over_cache.end()) {
        const TriangleBasisTable& tp = triangle_table(p);
        const TriangleSourceRule& sq = triangle_source_rule(q);
        const int nq = static_cast<int>(sq.nodes.rows());
        Eigen::MatrixXd B(nq, tp.n);
        std::vector<double> row(tp.n);
        for (int i = 0; i < nq; ++i) {
            koornwinder_eval(p, sq.nodes(i, 0), sq.nodes(i, 1), row.data());
            for (int j = 0; j < tp.n; ++j) B(i, j) = row[j];
        }
        it = g_tri_over_cache.emplace(key, B * tp.C).first;
    }
    return it->second;
}

void chebyshev2d_eval(int p, double zx, double zy, double* out) {
    std::vector<double> tx(p), ty(p);
    cheb1d(p, zx, tx.data());
    cheb1d(p, zy, ty.data());
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) out[a * p + b] = tx[a] * ty[b];
}

const BoxBasisTable& box_table(int p) {
    if (p < 1 || p > kMaxBoxOrder)
        throw std::invalid_argument("box_table: order out of range");
    std::lock_guard<std::mutex> lock(g_box_mutex);
    if (!g_box_tables[p])
        g_box_tables[p] = std::make_unique<BoxBasisTable>(build_box_table(p));
    return *g_box_tables[p];
}

const BoxSourceRule& box_source_rule(int q) {
    if (q < 1 || q > 2 * kMaxBoxOrder)
        throw std::invalid_argument("box_source_rule: order out of range");
    std::lock_guard<std::mutex> lock(g_box_src_mutex);
    auto it = g_box_src_cache.find(q);
    if (it == g_box_src_cache.end()) {
        Eigen::VectorXd z, w;
        fejer1(q, z, w);
        BoxSourceRule r;
        r.q = q;
        r.nodes.resize(q * q, 2);
        r.w.resize(q * q);
        for (int ix = 0; ix < q; ++ix)
            for (int iy = 0; iy < q; ++iy) {
                const int idx = ix * q + iy;
                r.nodes(idx, 0) = z(ix);
                r.nodes(idx, 1) = z(iy);
                r.w(idx) = w(ix) * w(iy);
            }
        it = g_box_src_cache.emplace(q, std::move(r)).first;
    }
    return it->second;
}

const Eigen::MatrixXd& box_oversample(int p, int q) {
    std::lock_guard<std::mutex> lock(g_box_over_mutex);
    auto key = std::make_pair(p, q);
    auto it = g_box_over_cache.find(key);
    if (it == g_box_over_cache.end()) {
        const BoxBasisTable& tp = box_table(p);
        const BoxSourceRule& sq = box_source_rule(q);
        const int nq = static_cast<int>(sq.nodes.rows());
        Eigen::MatrixXd B(nq, tp.n);
        std::vector<double> row(tp.n);
        for (int i = 0; i < nq; ++i) {
            chebyshev2d_eval(p, sq.nodes(i, 0), sq.nodes(i, 1), row.data());
            for (int j = 0; j < tp.n; ++j) B(i, j) = row[j];
        }
        it = g_box_over_cache.emplace(key, B * tp.C).first;
    }
    return it->second;
}

}  // namespace volpot
