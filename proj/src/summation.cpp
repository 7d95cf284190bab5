#include "volpot/summation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace volpot {

namespace {

constexpr double kInvTwoPi = 0.15915494309189533577;

// Plain complex value type.  The builtin complex multiply emits a NaN
// recovery branch and division calls out to libgcc; the expansions here
// never produce non-finite intermediates, so the naive forms are safe and
// stay inline.
struct Cplx {
    double re = 0.0, im = 0.0;
};
inline Cplx operator+(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
inline Cplx operator*(Cplx a, Cplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Cplx operator*(double s, Cplx a) { return {s * a.re, s * a.im}; }
inline Cplx& operator+=(Cplx& a, Cplx b) {
    a.re += b.re;
    a.im += b.im;
    return a;
}
inline Cplx inverse(Cplx a) {
    const double d = a.re * a.re + a.im * a.im;
    return {a.re / d, -a.im / d};
}
inline Cplx log_c(Cplx a) {
    return {0.5 * std::log(a.re * a.re + a.im * a.im),
            std::atan2(a.im, a.re)};
}

// Morton box ids: descendants of a box occupy a contiguous id range, which
// keeps per-box source lists contiguous at every level.
inline std::uint32_t spread_bits(std::uint32_t v) {
    v = (v | (v << 8)) & 0x00FF00FFu;
    v = (v | (v << 4)) & 0x0F0F0F0Fu;
    v = (v | (v << 2)) & 0x33333333u;
    v = (v | (v << 1)) & 0x55555555u;
    return v;
}
inline std::uint32_t morton_id(std::uint32_t ix, std::uint32_t iy) {
    return spread_bits(ix) | (spread_bits(iy) << 1);
}
inline std::uint32_t compact_bits(std::uint32_t v) {
    v &= 0x55555555u;
    v = (v | (v >> 1)) & 0x33333333u;
    v = (v | (v >> 2)) & 0x0F0F0F0Fu;
    v = (v | (v >> 4)) & 0x00FF00FFu;
    v = (v | (v >> 8)) & 0x0000FFFFu;
    return v;
}

struct Tree {
    int levels = 0;  // leaf level; level l holds 4^l Morton-indexed boxes
    double x0 = 0.0, y0 = 0.0, side = 1.0;
    // Leaf occupancy as CSR over Morton leaf ids, plus per-level counts.
    std::vector<int> src_off, src_ids, tgt_off, tgt_ids;
    std::vector<std::vector<int>> src_cnt, tgt_cnt;

    double box_side(int level) const {
        return side / static_cast<double>(1 << level);
    }
    Vec2 center(int level, std::uint32_t id) const {
        const double s = box_side(level);
        return {x0 + (compact_bits(id) + 0.5) * s,
                y0 + (compact_bits(id >> 1) + 0.5) * s};
    }
};

void bin_points(const Tree& tr, const std::vector<Vec2>& pts,
                std::vector<int>& off, std::vector<int>& ids) {
    const int n = 1 << tr.levels;
    const std::size_t nbox = std::size_t(n) * n;
    auto leaf_of = [&](Vec2 p) {
        int ix = static_cast<int>((p.x - tr.x0) / tr.side * n);
        int iy = static_cast<int>((p.y - tr.y0) / tr.side * n);
        ix = std::clamp(ix, 0, n - 1);
        iy = std::clamp(iy, 0, n - 1);
        return morton_id(static_cast<std::uint32_t>(ix),
                         static_cast<std::uint32_t>(iy));
    };
    off.assign(nbox + 1, 0);
    for (const Vec2& p : pts) ++off[leaf_of(p) + 1];
    for (std::size_t b = 0; b < nbox; ++b) off[b + 1] += off[b];
    ids.resize(pts.size());
    std::vector<int> cursor(off.begin(), off.end() - 1);
    for (std::size_t j = 0; j < pts.size(); ++j)
        ids[cursor[leaf_of(pts[j])]++] = static_cast<int>(j);
}

std::vector<std::vector<int>> count_levels(const Tree& tr,
                                           const std::vector<int>& off) {
    std::vector<std::vector<int>> cnt(tr.levels + 1);
    const int L = tr.levels;
    cnt[L].resize(std::size_t(1) << (2 * L));
    for (std::size_t b = 0; b < cnt[L].size(); ++b)
        cnt[L][b] = off[b + 1] - off[b];
    for (int l = L - 1; l >= 0; --l) {
        cnt[l].assign(std::size_t(1) << (2 * l), 0);
        for (std::size_t b = 0; b < cnt[l].size(); ++b)
            for (int c = 0; c < 4; ++c) cnt[l][b] += cnt[l + 1][(b << 2) | c];
    }
    return cnt;
}

Tree build_tree(const std::vector<Vec2>& src, const std::vector<Vec2>& tgt,
                int levels, double x0, double y0, double side) {
    Tree tr;
    tr.levels = levels;
    tr.x0 = x0;
    tr.y0 = y0;
    tr.side = side;
    bin_points(tr, src, tr.src_off, tr.src_ids);
    bin_points(tr, tgt, tr.tgt_off, tr.tgt_ids);
    tr.src_cnt = count_levels(tr, tr.src_off);
    tr.tgt_cnt = count_levels(tr, tr.tgt_off);
    return tr;
}

// Multipole and local expansions are kept in box-scaled variables: a box of
// side s centered at c represents multipoles in w = s/(z - c) and locals in
// u = (z - c)/s, so coefficient magnitudes stay O(total charge) at every
// level and the translation operators depend only on integer offsets.
struct LaplaceOps {
    int P = 0;
    std::array<std::vector<Cplx>, 4> m2m, l2l;
    std::array<std::vector<Cplx>, 49> m2l;  // offset (dx+3) + 7*(dy+3)
};

void matvec_acc(const std::vector<Cplx>& M, const Cplx* x, Cplx* y, int n) {
    for (int r = 0; r < n; ++r) {
        const Cplx* row = M.data() + std::size_t(r) * n;
        Cplx acc;
        for (int c = 0; c < n; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

LaplaceOps build_laplace_ops(double eps) {
    LaplaceOps ops;
    // Interaction-list separation gives a worst-case convergence ratio of
    // about 1.83 (nearest target corner at distance 2s - s/sqrt(2) against
    // source radius s/sqrt(2)).
    ops.P = std::clamp(
        static_cast<int>(std::ceil(std::log(1.0 / eps) / std::log(1.83))) + 4,
        10, 60);
    const int P = ops.P, n = P + 1;

    std::vector<double> binom(std::size_t(2 * P + 1) * (2 * P + 1), 0.0);
    auto B = [&](int i, int j) -> double& {
        return binom[std::size_t(i) * (2 * P + 1) + j];
    };
    for (int i = 0; i <= 2 * P; ++i) {
        B(i, 0) = 1.0;
        for (int j = 1; j <= i; ++j)
            B(i, j) = B(i - 1, j - 1) + (j <= i - 1 ? B(i - 1, j) : 0.0);
    }

    // Child centers sit at (+-1/4, +-1/4) of the parent side; Morton child
    // index bit 0 is x, bit 1 is y.
    for (int c = 0; c < 4; ++c) {
        const Cplx t{(c & 1) ? 0.25 : -0.25, (c & 2) ? 0.25 : -0.25};
        std::vector<Cplx> tp(2 * P + 1);
        tp[0] = {1.0, 0.0};
        for (int j = 1; j <= 2 * P; ++j) tp[j] = tp[j - 1] * t;

        std::vector<Cplx>& up = ops.m2m[c];
        up.assign(std::size_t(n) * n, Cplx{});
        up[0] = {1.0, 0.0};  // total charge passes through
        double sigma = 1.0;  // (s_child / s_parent)^k
        std::vector<double> sig(n);
        for (int k = 0; k <= P; ++k, sigma *= 0.5) sig[k] = sigma;
        for (int l = 1; l <= P; ++l) {
            up[std::size_t(l) * n] = (-1.0 / l) * tp[l];
            for (int k = 1; k <= l; ++k)
                up[std::size_t(l) * n + k] =
                    (sig[k] * B(l - 1, k - 1)) * tp[l - k];
        }

        std::vector<Cplx>& dn = ops.l2l[c];
        dn.assign(std::size_t(n) * n, Cplx{});
        double half = 1.0;
        for (int m = 0; m <= P; ++m, half *= 0.5)
            for (int l = m; l <= P; ++l)
                dn[std::size_t(m) * n + l] = (half * B(l, m)) * tp[l - m];
    }

    for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
            if (std::max(std::abs(dx), std::abs(dy)) < 2) continue;
            std::vector<Cplx>& M = ops.m2l[(dx + 3) + 7 * (dy + 3)];
            M.assign(std::size_t(n) * n, Cplx{});
            const Cplx d{static_cast<double>(dx), static_cast<double>(dy)};
            const Cplx dinv = inverse(d);
            std::vector<Cplx> dp(2 * P + 1);  // d^-j
            dp[0] = {1.0, 0.0};
            for (int j = 1; j <= 2 * P; ++j) dp[j] = dp[j - 1] * dinv;
            M[0] = log_c(Cplx{-d.re, -d.im});
            for (int k = 1; k <= P; ++k)
                M[k] = (k % 2 ? -1.0 : 1.0) * dp[k];
            for (int l = 1; l <= P; ++l) {
                M[std::size_t(l) * n] = (-1.0 / l) * dp[l];
                for (int k = 1; k <= P; ++k)
                    M[std::size_t(l) * n + k] =
                        ((k % 2 ? -1.0 : 1.0) * B(l + k - 1, k - 1)) *
                        dp[l + k];
            }
        }
    }
    return ops;
}

void laplace_apply(const Tree& tree, const LaplaceOps& ops,
                   const Kernel& kern, const std::vector<Vec2>& sp,
                   const std::vector<double>& q, const std::vector<Vec2>& tp,
                   std::vector<double>& out) {
    const int L = tree.levels, P = ops.P, n = P + 1;
    std::vector<double> invk(n, 0.0);
    for (int k = 1; k <= P; ++k) invk[k] = 1.0 / k;

    std::vector<std::vector<Cplx>> mult(L + 1), loc(L + 1);
    for (int l = 2; l <= L; ++l) {
        mult[l].assign((std::size_t(1) << (2 * l)) * n, Cplx{});
        loc[l].assign((std::size_t(1) << (2 * l)) * n, Cplx{});
    }

    // Upward: leaf expansions, then child-to-parent shifts.
    const std::int64_t nleaf = std::int64_t(1) << (2 * L);
    parallel_for(nleaf, [&](std::int64_t b) {
        if (tree.src_cnt[L][b] == 0) return;
        const Vec2 c = tree.center(L, static_cast<std::uint32_t>(b));
        const double inv_s = 1.0 / tree.box_side(L);
        Cplx* mb = mult[L].data() + std::size_t(b) * n;
        for (int e = tree.src_off[b]; e < tree.src_off[b + 1]; ++e) {
            const int j = tree.src_ids[e];
            const Cplx w{(sp[j].x - c.x) * inv_s, (sp[j].y - c.y) * inv_s};
            const double qj = q[j];
            mb[0].re += qj;
            Cplx pw{qj, 0.0};
            for (int k = 1; k <= P; ++k) {
                pw = pw * w;
                mb[k] += -invk[k] * pw;
            }
        }
    });
    for (int l = L - 1; l >= 2; --l) {
        parallel_for(std::int64_t(1) << (2 * l), [&](std::int64_t b) {
            if (tree.src_cnt[l][b] == 0) return;
            Cplx* mb = mult[l].data() + std::size_t(b) * n;
            for (int c = 0; c < 4; ++c) {
                const std::size_t cid = (std::size_t(b) << 2) | c;
                if (tree.src_cnt[l + 1][cid] == 0) continue;
                matvec_acc(ops.m2m[c], mult[l + 1].data() + cid * n, mb, n);
            }
        });
    }

    // Interaction lists: children of the parent's neighbors that are not
    // neighbors of the box itself.
    for (int l = 2; l <= L; ++l) {
        const int nb = 1 << l;
        const double logs = std::log(tree.box_side(l));
        parallel_for(std::int64_t(1) << (2 * l), [&](std::int64_t b) {
            if (tree.tgt_cnt[l][b] == 0) return;
            const int ix = static_cast<int>(compact_bits(std::uint32_t(b)));
            const int iy =
                static_cast<int>(compact_bits(std::uint32_t(b) >> 1));
            Cplx* ab = loc[l].data() + std::size_t(b) * n;
            double qsum = 0.0;
            const int px = ix >> 1, py = iy >> 1;
            for (int qy = py - 1; qy <= py + 1; ++qy) {
                if (qy < 0 || qy > (nb >> 1) - 1) continue;
                for (int qx = px - 1; qx <= px + 1; ++qx) {
                    if (qx < 0 || qx > (nb >> 1) - 1) continue;
                    for (int c = 0; c < 4; ++c) {
                        const int jx = 2 * qx + (c & 1);
                        const int jy = 2 * qy + ((c & 2) >> 1);
                        const int dx = jx - ix, dy = jy - iy;
                        if (std::max(std::abs(dx), std::abs(dy)) < 2)
                            continue;
                        const std::uint32_t sid = morton_id(jx, jy);
                        if (tree.src_cnt[l][sid] == 0) continue;
                        const Cplx* mb = mult[l].data() + std::size_t(sid) * n;
                        matvec_acc(ops.m2l[(dx + 3) + 7 * (dy + 3)], mb, ab,
                                   n);
                        qsum += mb[0].re;
                    }
                }
            }
            ab[0].re += qsum * logs;
        });
    }

    for (int l = 2; l < L; ++l) {
        parallel_for(std::int64_t(1) << (2 * (l + 1)), [&](std::int64_t cid) {
            if (tree.tgt_cnt[l + 1][cid] == 0) return;
            const std::size_t pid = std::size_t(cid) >> 2;
            matvec_acc(ops.l2l[cid & 3], loc[l].data() + pid * n,
                       loc[l + 1].data() + std::size_t(cid) * n, n);
        });
    }

    // Leaves: evaluate the local expansion and add the 3x3 near field.
    const int nb = 1 << L;
    parallel_for(nleaf, [&](std::int64_t b) {
        if (tree.tgt_cnt[L][b] == 0) return;
        const Vec2 c = tree.center(L, static_cast<std::uint32_t>(b));
        const double inv_s = 1.0 / tree.box_side(L);
        const Cplx* ab = loc[L].data() + std::size_t(b) * n;
        const int ix = static_cast<int>(compact_bits(std::uint32_t(b)));
        const int iy = static_cast<int>(compact_bits(std::uint32_t(b) >> 1));
        for (int e = tree.tgt_off[b]; e < tree.tgt_off[b + 1]; ++e) {
            const int i = tree.tgt_ids[e];
            const Vec2 t = tp[i];
            const Cplx u{(t.x - c.x) * inv_s, (t.y - c.y) * inv_s};
            Cplx val = ab[P];
            for (int l = P - 1; l >= 0; --l) val = val * u + ab[l];
            double pot = -kInvTwoPi * val.re;
            for (int jy = std::max(0, iy - 1); jy <= std::min(nb - 1, iy + 1);
                 ++jy) {
                for (int jx = std::max(0, ix - 1);
                     jx <= std::min(nb - 1, ix + 1); ++jx) {
                    const std::uint32_t sid = morton_id(jx, jy);
                    for (int f = tree.src_off[sid]; f < tree.src_off[sid + 1];
                         ++f) {
                        const int j = tree.src_ids[f];
                        const double dx = t.x - sp[j].x, dy = t.y - sp[j].y;
                        const double r2 = dx * dx + dy * dy;
                        if (r2 == 0.0) continue;
                        pot += q[j] * kern.radial_r2(r2);
                    }
                }
            }
            out[i] = pot;
        }
    });
}

// Modified-Helmholtz treecode: per box, charges are anterpolated onto a
// tensor Chebyshev grid; a target far enough from the box (center distance
// at least 3x the half-diagonal) sums the kernel over those proxy charges.
// Node counts are per level: larger lambda * side needs more nodes for the
// same accuracy (measured one-box rate ~7.2x per node at the separation
// used here, with the constant growing like exp(2 * lambda * side)).
struct HelmLevel {
    int m = 0;
    std::vector<double> nodes, bw;
};

struct HelmOps {
    int min_level = 2;  // first level where lambda * side <= 5
    double skip_x = 40.0;  // drop boxes with lambda * gap beyond this
    std::vector<HelmLevel> lvl;
};

HelmOps build_helm_ops(double eps, double lambda, const Tree& tree) {
    HelmOps ops;
    ops.min_level = 2;
    while (ops.min_level <= tree.levels &&
           lambda * tree.box_side(ops.min_level) > 5.0)
        ++ops.min_level;
    // K0 decays like exp(-x); beyond this gap a box cannot move the result
    // at the requested tolerance.
    ops.skip_x = std::log(1.0 / eps) + 12.0;

    const int base =
        8 + std::max(0, static_cast<int>(
                            std::ceil(std::log(1.15e-8 / eps) / 1.97)));
    ops.lvl.resize(tree.levels + 1);
    const double pi = 3.14159265358979323846;
    for (int l = ops.min_level; l <= tree.levels; ++l) {
        const double ls = lambda * tree.box_side(l);
        const int bump = ls <= 0.5 ? 0 : (ls <= 2.0 ? 2 : 5);
        HelmLevel& lv = ops.lvl[l];
        lv.m = std::min(base + bump, 26);
        lv.nodes.resize(lv.m);
        lv.bw.resize(lv.m);
        for (int a = 0; a < lv.m; ++a) {
            const double th = (2 * a + 1) * pi / (2 * lv.m);
            lv.nodes[a] = std::cos(th);
            lv.bw[a] = (a % 2 ? -1.0 : 1.0) * std::sin(th);
        }
    }
    return ops;
}

void bary_weights(const HelmLevel& lv, double x, double* w) {
    const int m = lv.m;
    for (int a = 0; a < m; ++a) {
        if (x == lv.nodes[a]) {
            std::fill(w, w + m, 0.0);
            w[a] = 1.0;
            return;
        }
    }
    double sum = 0.0;
    for (int a = 0; a < m; ++a) {
        w[a] = lv.bw[a] / (x - lv.nodes[a]);
        sum += w[a];
    }
    const double inv = 1.0 / sum;
    for (int a = 0; a < m; ++a) w[a] *= inv;
}

void helm_apply(const Tree& tree, const HelmOps& ops, const Kernel& kern,
                const std::vector<Vec2>& sp, const std::vector<double>& q,
                const std::vector<Vec2>& tp, std::vector<double>& out) {
    const int L = tree.levels;
    const double lambda = kern.lambda;

    std::vector<std::vector<double>> W(L + 1);
    for (int l = ops.min_level; l <= L; ++l) {
        const HelmLevel& lv = ops.lvl[l];
        const int m = lv.m, mm = m * m;
        W[l].assign((std::size_t(1) << (2 * l)) * mm, 0.0);
        const int shift = 2 * (L - l);
        parallel_for(std::int64_t(1) << (2 * l), [&](std::int64_t b) {
            if (tree.src_cnt[l][b] == 0) return;
            const Vec2 c = tree.center(l, static_cast<std::uint32_t>(b));
            const double inv_h = 2.0 / tree.box_side(l);
            double* wb = W[l].data() + std::size_t(b) * mm;
            double lx[32], ly[32];
            const int e0 = tree.src_off[std::size_t(b) << shift];
            const int e1 = tree.src_off[(std::size_t(b) + 1) << shift];
            for (int e = e0; e < e1; ++e) {
                const int j = tree.src_ids[e];
                bary_weights(lv, (sp[j].x - c.x) * inv_h, lx);
                bary_weights(lv, (sp[j].y - c.y) * inv_h, ly);
                const double qj = q[j];
                for (int a = 0; a < m; ++a) {
                    const double f = qj * lx[a];
                    for (int bb = 0; bb < m; ++bb) wb[a * m + bb] += f * ly[bb];
                }
            }
        });
    }

    parallel_for(static_cast<std::int64_t>(tp.size()), [&](std::int64_t i) {
        const Vec2 t = tp[i];
        double pot = 0.0;
        std::array<std::uint64_t, 128> stack;
        int top = 0;
        stack[top++] = 0;  // (level << 32) | id, root
        while (top > 0) {
            const std::uint64_t ent = stack[--top];
            const int l = static_cast<int>(ent >> 32);
            const std::uint32_t id = static_cast<std::uint32_t>(ent);
            if (tree.src_cnt[l][id] == 0) continue;
            const double s = tree.box_side(l);
            const Vec2 c = tree.center(l, id);
            const double dx = t.x - c.x, dy = t.y - c.y;
            const double d2 = dx * dx + dy * dy;
            const double rbox = s * 0.7071067811865476;
            if (lambda * (std::sqrt(d2) - rbox) > ops.skip_x) continue;
            if (l >= ops.min_level && d2 >= 4.5 * s * s) {
                const HelmLevel& lv = ops.lvl[l];
                const int m = lv.m;
                const double* wb = W[l].data() + std::size_t(id) * m * m;
                const double h = 0.5 * s;
                for (int a = 0; a < m; ++a) {
                    const double nx = c.x + h * lv.nodes[a];
                    for (int bb = 0; bb < m; ++bb) {
                        const double ny = c.y + h * lv.nodes[bb];
                        const double ex = t.x - nx, ey = t.y - ny;
                        pot += wb[a * m + bb] *
                               kern.radial_r2(ex * ex + ey * ey);
                    }
                }
            } else if (l == L) {
                for (int f = tree.src_off[id]; f < tree.src_off[id + 1];
                     ++f) {
                    const int j = tree.src_ids[f];
                    const double ex = t.x - sp[j].x, ey = t.y - sp[j].y;
                    const double r2 = ex * ex + ey * ey;
                    if (r2 == 0.0) continue;
                    pot += q[j] * kern.radial_r2(r2);
                }
            } else {
                for (int cc = 0; cc < 4; ++cc)
                    stack[top++] = (std::uint64_t(l + 1) << 32) |
                                   ((std::uint64_t(id) << 2) | cc);
            }
        }
        out[i] = pot;
    });
}

}  // namespace

std::vector<double> direct_sum(const Kernel& kernel, const SourceSet& sources,
                               const std::vector<Vec2>& targets) {
    const std::size_t ns = sources.points.size();
    if (sources.charges.size() != ns)
        throw std::invalid_argument(
            "direct_sum: points/charges size mismatch");
    std::vector<double> out(targets.size(), 0.0);
    // Coincidences are recorded, not thrown, inside the parallel region
    // (exceptions must not escape worker threads); the smallest pair wins
    // so the report is deterministic.
    std::atomic<std::uint64_t> clash(~std::uint64_t(0));
    parallel_for(static_cast<std::int64_t>(targets.size()),
                 [&](std::int64_t i) {
                     const Vec2 t = targets[i];
                     double acc = 0.0;
                     for (std::size_t j = 0; j < ns; ++j) {
                         const double dx = t.x - sources.points[j].x;
                         const double dy = t.y - sources.points[j].y;
                         const double r2 = dx * dx + dy * dy;
                         if (r2 == 0.0) {
                             std::uint64_t key =
                                 (std::uint64_t(i) << 32) | std::uint64_t(j);
                             std::uint64_t cur = clash.load();
                             while (key < cur &&
                                    !clash.compare_exchange_weak(cur, key)) {
                             }
                             return;
                         }
                         acc += sources.charges[j] * kernel.radial_r2(r2);
                     }
                     out[i] = acc;
                 });
    const std::uint64_t key = clash.load();
    if (key != ~std::uint64_t(0))
        throw std::invalid_argument(
            "direct_sum: target " + std::to_string(key >> 32) +
            " coincides with source " +
            std::to_string(key & 0xFFFFFFFFu));
    return out;
}

struct SummationPlan::Impl {
    Kernel kernel;
    std::vector<Vec2> src, tgt;
    bool direct = true;
    Tree tree;
    LaplaceOps lap;
    HelmOps helm;
};

SummationPlan::SummationPlan(const Kernel& kernel, std::vector<Vec2> sources,
                             std::vector<Vec2> targets, double epsilon)
    : impl_(new Impl) {
    impl_->kernel = kernel;
    impl_->src = std::move(sources);
    impl_->tgt = std::move(targets);
    const double eps = std::clamp(epsilon, 1e-12, 1e-3);

    const std::size_t ns = impl_->src.size(), nt = impl_->tgt.size();
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    bool first = true;
    for (const std::vector<Vec2>* pts : {&impl_->src, &impl_->tgt}) {
        for (const Vec2& p : *pts) {
            if (first) {
                xlo = xhi = p.x;
                ylo = yhi = p.y;
                first = false;
            } else {
                xlo = std::min(xlo, p.x);
                xhi = std::max(xhi, p.x);
                ylo = std::min(ylo, p.y);
                yhi = std::max(yhi, p.y);
            }
        }
    }
    const double side = std::max(xhi - xlo, yhi - ylo);
    // Small problems are cheaper summed pairwise than through tree passes.
    if (side <= 0.0 || double(ns) * double(nt) <= 4e6) return;

    const double big = static_cast<double>(std::max(ns, nt));
    const int levels = std::clamp(
        static_cast<int>(std::ceil(std::log(big / 32.0) / std::log(4.0))), 2,
        7);
    impl_->tree = build_tree(impl_->src, impl_->tgt, levels, xlo, ylo,
                             side * (1.0 + 1e-12));
    impl_->direct = false;
    if (kernel.family == KernelFamily::Laplace)
        impl_->lap = build_laplace_ops(eps);
    else
        impl_->helm = build_helm_ops(eps, kernel.lambda, impl_->tree);
}

SummationPlan::~SummationPlan() = default;
SummationPlan::SummationPlan(SummationPlan&&) noexcept = default;
SummationPlan& SummationPlan::operator=(SummationPlan&&) noexcept = default;

std::size_t SummationPlan::num_sources() const { return impl_->src.size(); }
std::size_t SummationPlan::num_targets() const { return impl_->tgt.size(); }
int SummationPlan::levels() const {
    return impl_->direct ? 0 : impl_->tree.levels;
}
int SummationPlan::expansion_order() const {
    if (impl_->direct) return 0;
    if (impl_->kernel.family == KernelFamily::Laplace) return impl_->lap.P;
    int m = 0;
    for (const HelmLevel& lv : impl_->helm.lvl) m = std::max(m, lv.m);
    return m;
}

std::vector<double> SummationPlan::apply(
    const std::vector<double>& charges) const {
    const Impl& im = *impl_;
    if (charges.size() != im.src.size())
        throw std::invalid_argument("SummationPlan::apply: charge count " +
                                    std::to_string(charges.size()) +
                                    " does not match source count " +
                                    std::to_string(im.src.size()));
    std::vector<double> out(im.tgt.size(), 0.0);
    if (im.direct) {
        // Pairwise fallback; coincident pairs are skipped, matching the
        // smooth-row convention used by the correction assembly.
        parallel_for(static_cast<std::int64_t>(im.tgt.size()),
                     [&](std::int64_t i) {
                         const Vec2 t = im.tgt[i];
                         double acc = 0.0;
                         for (std::size_t j = 0; j < im.src.size(); ++j) {
                             const double dx = t.x - im.src[j].x;
                             const double dy = t.y - im.src[j].y;
                             const double r2 = dx * dx + dy * dy;
                             if (r2 == 0.0) continue;
                             acc += charges[j] * im.kernel.radial_r2(r2);
                         }
                         out[i] = acc;
                     });
        return out;
    }
    if (im.kernel.family == KernelFamily::Laplace)
        laplace_apply(im.tree, im.lap, im.kernel, im.src, charges, im.tgt,
                      out);
    else
        helm_apply(im.tree, im.helm, im.kernel, im.src, charges, im.tgt, out);
    return out;
}

std::vector<double> accelerated_sum(const Kernel& kernel,
                                    const SourceSet& sources,
                                    const std::vector<Vec2>& targets,
                                    double epsilon) {
    SummationPlan plan(kernel, sources.points, targets, epsilon);
    return plan.apply(sources.charges);
}

}  // namespace volpot
