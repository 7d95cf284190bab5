#include "volpot/bie.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "volpot/common.hpp"

namespace volpot {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kFineFactor = 8;     // close-evaluation upsampling
constexpr double kFineReach = 5.0; // switch to the fine rule within 5 h_Gamma
constexpr double kCollarFraction = 0.02;
constexpr int kDenseCutoff = 1200;
constexpr int kGmresMaxIter = 500;

// Modified Bessel I1 by its ascending series.  Every term is positive, so
// there is no cancellation; long double keeps the ~1e5-term ratio between
// the peak term and the unit leading term harmless.  Arguments stay below
// lambda * diam <= 60, enforced at assembly.
double bessel_i1(double z) {
    const long double u = (long double)z * z * 0.25L;
    long double term = 1.0L, s = 1.0L;
    for (int k = 1; k <= 240; ++k) {
        term *= u / ((long double)k * k);
        s += term / (k + 1);
        if (term < 1e-24L * s) break;
    }
    return (double)(0.5L * (long double)z * s);
}

// dG(y, x)/dn(y) |gamma'(y)| for source point y with unit normal ny.
// Smooth for Laplace on a single smooth curve; log-singular for modified
// Helmholtz (handled by the split below).  K1 underflow at large lambda*r
// correctly yields 0.
double dlp_entry(const Kernel& k, Vec2 x, Vec2 y, Vec2 ny, double speed) {
    const Vec2 d = y - x;
    const double r2 = d.norm2();
    const double dn = dot(d, ny);
    if (k.family == KernelFamily::Laplace) return -dn / (kTwoPi * r2) * speed;
    const double r = std::sqrt(r2);
    return -(k.lambda / kTwoPi) * bessel_k1(k.lambda * r) * (dn / r) * speed;
}

// Coincident-limit value of dlp_entry along a curve.
double dlp_diagonal(double curvature, double speed) {
    return -curvature * speed / (4.0 * kPi);
}

// Smooth factor multiplying log(4 sin^2((t - tau)/2)) in the modified
// Helmholtz double-layer kernel, from K1(z) = 1/z + log(z/2) I1(z) + .
// Vanishes at tau = t like (t - tau)^2.
double dlp_log_factor(const Kernel& k, Vec2 x, Vec2 y, Vec2 ny, double speed) {
    const Vec2 d = y - x;
    const double r2 = d.norm2();
    const double r = std::sqrt(r2);
    return -(k.lambda / (4.0 * kPi)) * (dot(d, ny) / r2) *
           (r * bessel_i1(k.lambda * r)) * speed;
}

// Difference between the spectral product-quadrature weights for the
// log(4 sin^2((t_i - t_j)/2)) kernel and the plain trapezoidal weights of
// that log.  Assembling entries as (2pi/n) K + A * bracket instead of the
// textbook A/B split keeps every term small (the two weight families agree
// to O(1/n^2)), which matters when A grows like I1(lambda r).  Long double
// because the bracket is itself a difference of O(1) sums.
std::vector<double> kress_log_brackets(int n) {
    constexpr long double pi = 3.14159265358979323846264338327950288L;
    const int half = n / 2;
    std::vector<double> br(n);
    br[0] = 0.0;  // unused: the log factor vanishes on the diagonal
    for (int d = 1; d < n; ++d) {
        const long double th = 2.0L * pi * d / n;
        long double s = 0.0L;
        for (int m = 1; m < half; ++m) s += std::cos(m * th) / m;
        const long double R = -(2.0L * pi / half) * s -
                              (pi / ((long double)half * half)) * std::cos(half * th);
        const long double sn = 2.0L * std::sin(0.5L * th);
        br[d] = (double)(R - (2.0L * pi / n) * std::log(sn * sn));
    }
    return br;
}

// Area centroid of the region enclosed by a curve, from a dense polygon of
// samples.  Used to place the completion log source of each hole; any
// interior point works, the centroid just keeps it away from the boundary.
Vec2 curve_centroid(const Curve& c) {
    const int m = 512;
    double a2 = 0.0;
    Vec2 s{0.0, 0.0};
    Vec2 prev = c.pos(0.0);
    for (int j = 1; j <= m; ++j) {
        const Vec2 q = c.pos(kTwoPi * j / m);
        const double w = cross(prev, q);
        a2 += w;
        s += (prev + q) * w;
        prev = q;
    }
    return s / (3.0 * a2);
}

// Trigonometric interpolation of n = even uniform periodic samples onto
// factor*n uniform points (zero-padded Fourier series; exact at the
// original nodes).
std::vector<double> trig_upsample(const std::vector<double>& f, int factor) {
    const int n = (int)f.size();
    const int half = n / 2;
    std::vector<double> a(half + 1, 0.0), b(half, 0.0);
    for (int m = 0; m <= half; ++m) {
        double ca = 0.0, cb = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ang = kTwoPi * m * j / n;
            ca += f[j] * std::cos(ang);
            cb += f[j] * std::sin(ang);
        }
        a[m] = 2.0 * ca / n;
        if (m >= 1 && m < half) b[m] = 2.0 * cb / n;
    }
    a[0] *= 0.5;
    a[half] *= 0.5;
    std::vector<double> out(n * factor);
    for (int j = 0; j < n * factor; ++j) {
        const double t = kTwoPi * j / (n * factor);
        double s = a[0] + a[half] * std::cos(half * t);
        for (int m = 1; m < half; ++m)
            s += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
        out[j] = s;
    }
    return out;
}

std::string format_history(const std::vector<double>& hist) {
    std::string s;
    char buf[32];
    for (double r : hist) {
        std::snprintf(buf, sizeof buf, " %.3e", r);
        s += buf;
    }
    return s;
}

}  // namespace

std::vector<Vec2> BoundarySystem::nodes() const {
    std::vector<Vec2> out;
    out.reserve(n_density);
    for (const auto& blk : curves) out.insert(out.end(), blk.x.begin(), blk.x.end());
    return out;
}

BoundarySystem assemble_nystrom(const Domain& dom, const Kernel& kernel,
                                const std::vector<int>& n_per_curve) {
    const int nc = dom.num_curves();
    std::vector<int> counts;
    if ((int)n_per_curve.size() == 1) {
        counts.assign(nc, n_per_curve[0]);
    } else if ((int)n_per_curve.size() == nc) {
        counts = n_per_curve;
    } else {
        throw std::invalid_argument(
            "assemble_nystrom: need one node count, or one per curve");
    }
    for (int n : counts)
        if (n < 16 || n % 2 != 0)
            throw std::invalid_argument(
                "assemble_nystrom: node counts must be even and >= 16");
    if (kernel.family == KernelFamily::ModifiedHelmholtz &&
        kernel.lambda * dom.diameter() > 60.0)
        throw std::invalid_argument(
            "assemble_nystrom: lambda * diameter > 60 overflows the "
            "log-split quadrature factors");

    BoundarySystem sys;
    sys.domain = &dom;
    sys.kernel = kernel;
    sys.curves.resize(nc);
    int off = 0;
    for (int c = 0; c < nc; ++c) {
        auto& blk = sys.curves[c];
        blk.curve = &dom.curve(c);
        blk.sign = (c == 0) ? -0.5 : 0.5;
        blk.n = counts[c];
        blk.offset = off;
        off += blk.n;
        const int n = blk.n;
        blk.t.resize(n);
        blk.x.resize(n);
        blk.normal.resize(n);
        blk.speed.resize(n);
        blk.curv.resize(n);
        for (int j = 0; j < n; ++j) {
            const double t = kTwoPi * j / n;
            blk.t[j] = t;
            blk.x[j] = blk.curve->pos(t);
            blk.normal[j] = blk.curve->outward_normal(t);
            blk.speed[j] = blk.curve->speed(t);
            blk.curv[j] = blk.curve->curvature(t);
        }
        const int nf = kFineFactor * n;
        blk.fine_x.resize(nf);
        blk.fine_normal.resize(nf);
        blk.fine_speed.resize(nf);
        for (int j = 0; j < nf; ++j) {
            const double t = kTwoPi * j / nf;
            blk.fine_x[j] = blk.curve->pos(t);
            blk.fine_normal[j] = blk.curve->outward_normal(t);
            blk.fine_speed[j] = blk.curve->speed(t);
        }
        blk.length = blk.curve->total_arclength();
        double d2max = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                d2max = std::max(d2max, (blk.x[a] - blk.x[b]).norm2());
        blk.diam = std::sqrt(d2max);
        if (c > 0) blk.log_center = curve_centroid(*blk.curve);
    }
    sys.n_density = off;
    sys.n_aux = (kernel.family == KernelFamily::Laplace) ? nc - 1 : 0;

    // Distinct curves must not touch; a coincident node pair would place a
    // kernel singularity in a supposedly smooth block.
    for (int a = 0; a < nc; ++a)
        for (int b = a + 1; b < nc; ++b)
            for (const Vec2& xa : sys.curves[a].x)
                for (const Vec2& xb : sys.curves[b].x)
                    if ((xa - xb).norm2() == 0.0)
                        throw std::invalid_argument(
                            "assemble_nystrom: boundary curves touch");

    const bool modhelm = kernel.family == KernelFamily::ModifiedHelmholtz;
    std::vector<std::vector<double>> brackets(nc);
    if (modhelm)
        for (int c = 0; c < nc; ++c) brackets[c] = kress_log_brackets(counts[c]);

    const int size = sys.n_density + sys.n_aux;
    sys.matrix = Eigen::MatrixXd::Zero(size, size);
    for (int tb = 0; tb < nc; ++tb) {
        const auto& T = sys.curves[tb];
        parallel_for(T.n, [&](std::int64_t ii) {
            const int i = (int)ii;
            const int row = T.offset + i;
            const Vec2 x = T.x[i];
            for (int sb = 0; sb < nc; ++sb) {
                const auto& S = sys.curves[sb];
                const double w = kTwoPi / S.n;
                if (sb != tb) {
                    for (int j = 0; j < S.n; ++j)
                        sys.matrix(row, S.offset + j) =
                            w * dlp_entry(kernel, x, S.x[j], S.normal[j], S.speed[j]);
                    continue;
                }
                for (int j = 0; j < S.n; ++j) {
                    double e;
                    if (j == i) {
                        e = w * dlp_diagonal(S.curv[i], S.speed[i]);
                    } else if (!modhelm) {
                        e = w * dlp_entry(kernel, x, S.x[j], S.normal[j], S.speed[j]);
                    } else {
                        const int d = (i - j + S.n) % S.n;
                        e = w * dlp_entry(kernel, x, S.x[j], S.normal[j], S.speed[j]) +
                            brackets[sb][d] *
                                dlp_log_factor(kernel, x, S.x[j], S.normal[j], S.speed[j]);
                    }
                    sys.matrix(row, S.offset + j) = e;
                }
            }
            sys.matrix(row, row) += T.sign;
            for (int k = 0; k < sys.n_aux; ++k) {
                const Vec2 d = x - sys.curves[k + 1].log_center;
                sys.matrix(row, sys.n_density + k) = -std::log(d.norm()) / kTwoPi;
            }
        });
    }
    // Moment conditions closing the completed system: each hole density
    // integrates to zero.
    for (int k = 0; k < sys.n_aux; ++k) {
        const auto& S = sys.curves[k + 1];
        for (int j = 0; j < S.n; ++j)
            sys.matrix(sys.n_density + k, S.offset + j) = (kTwoPi / S.n) * S.speed[j];
    }
    return sys;
}

std::vector<double> solve_density(const BoundarySystem& sys,
                                  const std::vector<double>& rhs, double tol,
                                  SolveReport* report, bool force_iterative) {
    const int n = sys.size();
    if ((int)rhs.size() != n)
        throw std::invalid_argument("solve_density: rhs length mismatch");
    SolveReport local;
    SolveReport& rep = report ? *report : local;
    rep = SolveReport{};

    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        rep.residual_history = {0.0};
        return std::vector<double>(n, 0.0);
    }
    if (!force_iterative && n <= kDenseCutoff) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
        Eigen::VectorXd x = lu.solve(b);
        rep.dense_direct = true;
        rep.residual_history = {(sys.matrix * x - b).norm() / bnorm};
        return std::vector<double>(x.data(), x.data() + n);
    }

    // Full-basis GMRES with modified Gram-Schmidt and one
    // reorthogonalization pass; Givens rotations track the residual.
    const int maxit = std::min(kGmresMaxIter, n);
    Eigen::MatrixXd V(n, maxit + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(maxit + 1, maxit);
    std::vector<double> cs(maxit, 0.0), sn(maxit, 0.0);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(maxit + 1);
    V.col(0) = b / bnorm;
    g[0] = bnorm;
    int k = 0;
    bool converged = false;
    while (k < maxit) {
        Eigen::VectorXd w = sys.matrix * V.col(k);
        for (int i = 0; i <= k; ++i) {
            const double hik = w.dot(V.col(i));
            H(i, k) = hik;
            w -= hik * V.col(i);
        }
        for (int i = 0; i <= k; ++i) {
            const double c = w.dot(V.col(i));
            H(i, k) += c;
            w -= c * V.col(i);
        }
        H(k + 1, k) = w.norm();
        const bool breakdown = H(k + 1, k) < 1e-300;
        if (!breakdown) V.col(k + 1) = w / H(k + 1, k);
        for (int i = 0; i < k; ++i) {
            const double tmp = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
            H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
            H(i, k) = tmp;
        }
        const double denom = std::hypot(H(k, k), H(k + 1, k));
        if (denom == 0.0)
            throw std::runtime_error("solve_density: singular system");
        cs[k] = H(k, k) / denom;
        sn[k] = H(k + 1, k) / denom;
        H(k, k) = denom;
        H(k + 1, k) = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k] * g[k];
        rep.residual_history.push_back(std::abs(g[k + 1]) / bnorm);
        ++k;
        if (rep.residual_history.back() <= tol || breakdown) {
            converged = true;
            break;
        }
    }
    rep.iterations = k;
    if (!converged && rep.residual_history.back() > tol) {
        char head[128];
        std::snprintf(head, sizeof head,
                      "solve_density: gmres stalled at relative residual %.3e "
                      "after %d iterations; history:",
                      rep.residual_history.back(), k);
        throw std::runtime_error(head + format_history(rep.residual_history));
    }
    Eigen::VectorXd y(k);
    for (int i = k - 1; i >= 0; --i) {
        double s = g[i];
        for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
        y[i] = s / H(i, i);
    }
    Eigen::VectorXd x = V.leftCols(k) * y;
    return std::vector<double>(x.data(), x.data() + n);
}

namespace {

std::vector<double> eval_layer_impl(const BoundarySystem& sys,
                                    const std::vector<double>& coeffs,
                                    const std::vector<Vec2>& targets,
                                    bool allow_close) {
    if ((int)coeffs.size() != sys.size())
        throw std::invalid_argument("eval_layer_potential: coefficient length mismatch");
    const int nc = (int)sys.curves.size();
    std::vector<std::vector<double>> fine_phi(nc);
    for (int c = 0; c < nc; ++c) {
        const auto& B = sys.curves[c];
        std::vector<double> phi(coeffs.begin() + B.offset,
                                coeffs.begin() + B.offset + B.n);
        fine_phi[c] = trig_upsample(phi, kFineFactor);
    }

    std::vector<double> out(targets.size(), 0.0);
    // 0 fine, 1 inside the collar, 2 on the boundary
    std::atomic<int> reject{0};
    parallel_for((std::int64_t)targets.size(), [&](std::int64_t ti) {
        const Vec2 x = targets[ti];
        double acc = 0.0;
        for (int c = 0; c < nc; ++c) {
            const auto& B = sys.curves[c];
            const double h_gamma = B.length / B.n;
            const double collar = allow_close ? 0.0 : kCollarFraction * B.diam;
            // coarse distance, then the refined one only when it could
            // change the outcome (node gaps hide at most ~half a spacing)
            double d2 = 1e300;
            for (const Vec2& y : B.x) d2 = std::min(d2, (x - y).norm2());
            double d = std::sqrt(d2);
            bool fine = false;
            if (d - 0.75 * h_gamma <= std::max(collar, kFineReach * h_gamma)) {
                d2 = 1e300;
                for (const Vec2& y : B.fine_x) d2 = std::min(d2, (x - y).norm2());
                d = std::sqrt(d2);
                if (d == 0.0) {
                    reject.store(2);
                    return;
                }
                if (d < collar) {
                    reject.store(1);
                    return;
                }
                fine = d <= kFineReach * h_gamma;
            }
            if (fine) {
                const int nf = B.n * kFineFactor;
                const double w = kTwoPi / nf;
                const std::vector<double>& phi = fine_phi[c];
                for (int j = 0; j < nf; ++j)
                    acc += w * phi[j] *
                           dlp_entry(sys.kernel, x, B.fine_x[j], B.fine_normal[j],
                                     B.fine_speed[j]);
            } else {
                const double w = kTwoPi / B.n;
                for (int j = 0; j < B.n; ++j)
                    acc += w * coeffs[B.offset + j] *
                           dlp_entry(sys.kernel, x, B.x[j], B.normal[j], B.speed[j]);
            }
        }
        for (int k = 0; k < sys.n_aux; ++k) {
            const Vec2 d = x - sys.curves[k + 1].log_center;
            acc += coeffs[sys.n_density + k] * (-std::log(d.norm()) / kTwoPi);
        }
        out[ti] = acc;
    });
    const int r = reject.load();
    if (r == 2)
        throw std::invalid_argument(
            "eval_layer_potential: target lies on a boundary node");
    if (r == 1)
        throw std::invalid_argument(
            "eval_layer_potential: target inside the close-evaluation collar "
            "(0.02 of the curve diameter); refine the boundary grid and "
            "evaluate with solve_bvp, or move the target");
    return out;
}

}  // namespace

std::vector<double> eval_layer_potential(const BoundarySystem& sys,
                                         const std::vector<double>& coeffs,
                                         const std::vector<Vec2>& targets,
                                         bool allow_close) {
    return eval_layer_impl(sys, coeffs, targets, allow_close);
}

BvpResult solve_bvp(const HybridMesh& mesh, const Kernel& kernel, int p, int q,
                    const std::vector<double>& f_samples,
                    const std::function<double(Vec2)>& g,
                    const std::vector<Vec2>& targets, const BvpOptions& opts) {
    if (!mesh.domain) throw std::invalid_argument("solve_bvp: mesh has no domain");
    const Domain& dom = *mesh.domain;
    const int nc = dom.num_curves();
    std::vector<int> counts(nc);
    for (int c = 0; c < nc; ++c) {
        if (opts.n_boundary > 0) {
            counts[c] = opts.n_boundary + opts.n_boundary % 2;
        } else {
            const double len = dom.curve(c).total_arclength();
            // 40 nodes per unit arclength keeps the 8x-upsampled close rule
            // spectrally converged down to the 0.02-diameter collar; the
            // lambda term resolves the kernel's decay scale.
            double want = std::max(64.0, 40.0 * len);
            if (kernel.family == KernelFamily::ModifiedHelmholtz)
                want = std::max(want, 0.5 * kernel.lambda * len);
            int n = (int)std::ceil(want);
            counts[c] = n + n % 2;
        }
    }
    BoundarySystem sys = assemble_nystrom(dom, kernel, counts);

    // One volume operator serves every point we need: mesh nodes first
    // (source samples live there), then boundary collocation nodes, then
    // the caller's targets.
    std::vector<Vec2> pts = mesh_nodes(mesh, p);
    const int n_mesh = (int)pts.size();
    if ((int)f_samples.size() != n_mesh)
        throw std::invalid_argument("solve_bvp: f_samples length mismatch");
    const std::vector<Vec2> bnodes = sys.nodes();
    const int n_bdry = (int)bnodes.size();
    pts.insert(pts.end(), bnodes.begin(), bnodes.end());
    pts.insert(pts.end(), targets.begin(), targets.end());

    VolumePotentialOperator op(mesh, kernel, p, q, pts, opts.epsilon);
    BvpResult res;
    res.n_per_curve = counts;
    const std::vector<double> up = op.apply(f_samples, &res.apply_timings);
    res.op_stats = op.stats();

    std::vector<double> rhs(sys.size(), 0.0);
    for (int j = 0; j < n_bdry; ++j) rhs[j] = g(bnodes[j]) - up[n_mesh + j];
    res.density = solve_density(sys, rhs, opts.gmres_tol, &res.solve);

    // Mesh nodes approach the boundary well inside the public collar, so
    // evaluate without the rejection; node values there carry the close-
    // evaluation error documented on u_nodes.
    std::vector<Vec2> evalpts(pts.begin(), pts.begin() + n_mesh);
    evalpts.insert(evalpts.end(), targets.begin(), targets.end());
    const std::vector<double> uh =
        eval_layer_impl(sys, res.density, evalpts, /*allow_close=*/true);

    res.up_nodes.assign(up.begin(), up.begin() + n_mesh);
    res.u_nodes.resize(n_mesh);
    for (int i = 0; i < n_mesh; ++i) res.u_nodes[i] = up[i] + uh[i];
    const int nt = (int)targets.size();
    res.u.resize(nt);
    for (int i = 0; i < nt; ++i)
        res.u[i] = uh[n_mesh + i] + up[n_mesh + n_bdry + i];
    return res;
}

}  // namespace volpot
