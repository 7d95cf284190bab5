#include "volpot/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace volpot {

namespace {

// Incremental Delaunay triangulation with constrained edges, built for the
// buffer-band meshing problem: a few thousand well-scaled points, closed
// non-crossing constraint loops, and Ruppert-style refinement on top.
// Predicates are evaluated in long double with magnitude-aware slack; ties
// (cocircular box corners and the like) fall on the conservative side,
// which may leave the triangulation merely valid rather than perfectly
// Delaunay.  That is fine for quality refinement.
struct Triangulation {
    struct Tri {
        int v[3];
        int nb[3];        // neighbor opposite v[i]
        bool cons[3];     // edge (v[i+1], v[i+2]) constrained
        bool alive;
    };

    std::vector<Vec2> pts;
    std::vector<Tri> tris;
    double scale = 1;
    int last_tri = 0;

    // Global vertex hash: every insertion path snaps to an existing vertex
    // within 1e-13 of the problem scale, so duplicate vertices (and the
    // degenerate triangles they breed) cannot arise.
    double hash_cell = 1;
    std::unordered_map<std::int64_t, std::vector<int>> vert_hash;

    std::int64_t hash_key(double x, double y) const {
        const auto ix = static_cast<std::int64_t>(std::floor(x / hash_cell));
        const auto iy = static_cast<std::int64_t>(std::floor(y / hash_cell));
        return ix * 73856093LL + iy * 19349663LL;
    }
    void register_vertex(int id) {
        vert_hash[hash_key(pts[id].x, pts[id].y)].push_back(id);
    }
    int find_coincident(Vec2 p) const {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const auto it = vert_hash.find(hash_key(p.x + dx * hash_cell, p.y + dy * hash_cell));
                if (it == vert_hash.end()) continue;
                for (const int id : it->second)
                    if (dist(pts[id], p) <= 1e-13 * scale) return id;
            }
        }
        return -1;
    }

    // Signed predicates with magnitude-relative slack, so they behave the
    // same for h-sized triangles as for the super-triangle.
    long double orient(Vec2 a, Vec2 b, Vec2 c, long double* mag = nullptr) const {
        const long double t1 =
            (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y);
        const long double t2 =
            (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
        if (mag) *mag = std::abs(t1) + std::abs(t2);
        return t1 - t2;
    }

    bool incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) const {
        const long double adx = a.x - d.x, ady = a.y - d.y;
        const long double bdx = b.x - d.x, bdy = b.y - d.y;
        const long double cdx = c.x - d.x, cdy = c.y - d.y;
        const long double la = adx * adx + ady * ady;
        const long double lb = bdx * bdx + bdy * bdy;
        const long double lc = cdx * cdx + cdy * cdy;
        const long double da = bdx * cdy - cdx * bdy;
        const long double db = adx * cdy - cdx * ady;
        const long double dc = adx * bdy - bdx * ady;
        const long double det = la * da - lb * db + lc * dc;
        const long double mag =
            la * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
            lb * (std::abs(adx * cdy) + std::abs(cdx * ady)) +
            lc * (std::abs(adx * bdy) + std::abs(bdx * ady));
        return det > 1e-17L * mag;
    }

    void init(Vec2 lo, Vec2 hi) {
        const Vec2 mid = 0.5 * (lo + hi);
        const double d = std::max(hi.x - lo.x, hi.y - lo.y) + 1;
        pts.push_back(Vec2{mid.x - 16 * d, mid.y - 8 * d});
        pts.push_back(Vec2{mid.x + 16 * d, mid.y - 8 * d});
        pts.push_back(Vec2{mid.x, mid.y + 16 * d});
        tris.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, {false, false, false}, true});
        scale = 32 * d;
        hash_cell = 1e-11 * scale;
        for (int i = 0; i < 3; ++i) register_vertex(i);
        last_tri = 0;
    }

    int nb_slot(int t, int n) const {
        for (int i = 0; i < 3; ++i)
            if (tris[t].nb[i] == n) return i;
        throw std::logic_error("triangulation adjacency broken");
    }

    void set_nb(int t, int slot, int n) {
        tris[t].nb[slot] = n;
    }

    void relink(int t, int old_nb, int new_nb) {
        if (t < 0) return;
        tris[t].nb[nb_slot(t, old_nb)] = new_nb;
    }

    // Walks toward p; returns a triangle whose closed interior holds p.
    // on_edge is set to the slot of an edge p lies on, or -1.
    int locate(Vec2 p, int hint, int* on_edge) const {
        int t = hint;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
            t = -1;
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
                if (tris[i].alive) { t = i; break; }
        }
        const int cap = 4 * static_cast<int>(tris.size()) + 64;
        for (int step = 0; step < cap; ++step) {
            int worst = -1;
            long double worst_rel = -1e-14L;
            long double min_rel = 1e300L;
            int min_slot = -1;
            for (int i = 0; i < 3; ++i) {
                const Vec2 a = pts[tris[t].v[(i + 1) % 3]];
                const Vec2 b = pts[tris[t].v[(i + 2) % 3]];
                long double mag = 0;
                const long double o = orient(a, b, p, &mag);
                const long double rel = (mag > 0) ? o / mag : 0;
                if (rel < worst_rel) {
                    worst_rel = rel;
                    worst = i;
                }
                if (std::abs(static_cast<double>(rel)) <= 1e-14 &&
                    std::abs(static_cast<double>(rel)) < min_rel) {
                    min_rel = std::abs(static_cast<double>(rel));
                    min_slot = i;
                }
            }
            if (worst < 0) {
                *on_edge = min_slot;
                return t;
            }
            const int next = tris[t].nb[worst];
            if (next < 0) {
                *on_edge = min_slot;
                return t;
            }
            t = next;
        }
        // Walk failed to settle (nearly degenerate configuration): scan.
        int best = -1;
        long double best_min = -1e300L;
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            if (!tris[i].alive) continue;
            long double m = 1e300L;
            for (int k = 0; k < 3; ++k)
                m = std::min(m, orient(pts[tris[i].v[(k + 1) % 3]],
                                       pts[tris[i].v[(k + 2) % 3]], p));
            if (m > best_min) {
                best_min = m;
                best = i;
            }
        }
        *on_edge = -1;
        return best;
    }

    // Entries are (triangle, slot) where v[slot] is the freshly inserted
    // vertex and the tested edge is the one opposite it; flips pivot around
    // that vertex only, which keeps every flipped quad convex.  A direct
    // orientation guard backs that up near degeneracies.
    void legalize(std::vector<std::pair<int, int>>& stack) {
        while (!stack.empty()) {
            auto [t, slot] = stack.back();
            stack.pop_back();
            if (!tris[t].alive) continue;
            if (tris[t].cons[slot]) continue;
            const int n = tris[t].nb[slot];
            if (n < 0 || !tris[n].alive) continue;
            const int j = nb_slot(n, t);
            const Vec2 a = pts[tris[t].v[slot]];
            const Vec2 p = pts[tris[t].v[(slot + 1) % 3]];
            const Vec2 q = pts[tris[t].v[(slot + 2) % 3]];
            const Vec2 d = pts[tris[n].v[j]];
            if (!incircle(a, p, q, d)) continue;
            long double m1 = 0, m2 = 0;
            const long double o1 = orient(a, p, d, &m1);
            const long double o2 = orient(a, d, q, &m2);
            if (o1 <= 1e-15L * m1 || o2 <= 1e-15L * m2) continue;
            flip(t, slot);
            // New triangles are (a, p, d) and (a, d, q) with a at index 0.
            stack.push_back({t, 0});
            stack.push_back({n, 0});
        }
    }

    // Replaces edge (p, q) shared by t and its neighbor with edge (a, d).
    void flip(int t, int slot) {
        const int n = tris[t].nb[slot];
        const int j = nb_slot(n, t);
        const int a = tris[t].v[slot];
        const int p = tris[t].v[(slot + 1) % 3];
        const int q = tris[t].v[(slot + 2) % 3];
        const int d = tris[n].v[j];
        // Outer neighbors and constraint flags.
        const int tn_p = tris[t].nb[(slot + 1) % 3];  // across (q, a)
        const int tn_q = tris[t].nb[(slot + 2) % 3];  // across (a, p)
        const bool tc_p = tris[t].cons[(slot + 1) % 3];
        const bool tc_q = tris[t].cons[(slot + 2) % 3];
        // In n, edge (q, p) is opposite v[j]; the other two edges:
        const int n_p_slot = vertex_slot(n, p);  // edge opposite p = (d, q)
        const int n_q_slot = vertex_slot(n, q);  // edge opposite q = (p, d)
        const int nn_p = tris[n].nb[n_p_slot];
        const int nn_q = tris[n].nb[n_q_slot];
        const bool nc_p = tris[n].cons[n_p_slot];
        const bool nc_q = tris[n].cons[n_q_slot];
        // New triangles: t = (a, p, d), n = (a, d, q).
        tris[t].v[0] = a; tris[t].v[1] = p; tris[t].v[2] = d;
        tris[n].v[0] = a; tris[n].v[1] = d; tris[n].v[2] = q;
        // t edges: opp a = (p, d) -> nn_q; opp p = (d, a) -> n; opp d = (a, p) -> tn_q
        tris[t].nb[0] = nn_q; tris[t].cons[0] = nc_q;
        tris[t].nb[1] = n;    tris[t].cons[1] = false;
        tris[t].nb[2] = tn_q; tris[t].cons[2] = tc_q;
        // n edges: opp a = (d, q) -> nn_p; opp d = (q, a) -> tn_p; opp q = (a, d) -> t
        tris[n].nb[0] = nn_p; tris[n].cons[0] = nc_p;
        tris[n].nb[1] = tn_p; tris[n].cons[1] = tc_p;
        tris[n].nb[2] = t;    tris[n].cons[2] = false;
        relink(nn_q, n, t);
        relink(tn_p, t, n);
    }

    int vertex_slot(int t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (tris[t].v[i] == v) return i;
        throw std::logic_error("vertex not in triangle");
    }

    // Inserts p, returning its vertex id.  created (optional) receives the
    // indices of triangles incident to p afterwards.
    int insert(Vec2 p, std::vector<int>* created = nullptr) {
        if (const int v = find_coincident(p); v >= 0) return v;
        int on_edge = -1;
        const int t = locate(p, last_tri, &on_edge);
        if (t < 0) throw std::runtime_error("triangulation: point location failed");
        if (on_edge >= 0) {
            // Only take the edge-split path when p truly lies between the
            // endpoints; otherwise an interior split is the safe choice.
            const Vec2 A = pts[tris[t].v[(on_edge + 1) % 3]];
            const Vec2 B = pts[tris[t].v[(on_edge + 2) % 3]];
            const double s = dot(p - A, B - A);
            const double l2 = (B - A).norm2();
            if (!(s > 1e-10 * l2 && s < l2 * (1 - 1e-10))) on_edge = -1;
        }
        const int vp = static_cast<int>(pts.size());
        pts.push_back(p);
        register_vertex(vp);
        std::vector<std::pair<int, int>> stack;
        if (on_edge < 0) {
            split_interior(t, vp, stack, created);
        } else {
            split_edge(t, on_edge, vp, stack, created);
        }
        legalize(stack);
        last_tri = t;
        return vp;
    }

    // Splits the live edge (a, b), which the caller knows exists (it is a
    // tracked constraint subsegment), at p.  Bypasses point location so the
    // split lands on the intended edge even when p is within walking slack
    // of some other sliver.
    int insert_on_constraint(int a, int b, Vec2 p, std::vector<int>* created = nullptr) {
        if (const int v = find_coincident(p); v >= 0) return v;
        for (const int t : fan_around(a)) {
            int ia = -1, ib = -1;
            for (int i = 0; i < 3; ++i) {
                if (tris[t].v[i] == a) ia = i;
                if (tris[t].v[i] == b) ib = i;
            }
            if (ia < 0 || ib < 0) continue;
            const int slot = 3 - ia - ib;
            const int vp = static_cast<int>(pts.size());
            pts.push_back(p);
            register_vertex(vp);
            std::vector<std::pair<int, int>> stack;
            split_edge(t, slot, vp, stack, created);
            legalize(stack);
            last_tri = t;
            return vp;
        }
        throw std::logic_error("triangulation: constraint subsegment not found");
    }

    void split_interior(int t, int vp, std::vector<std::pair<int, int>>& stack,
                        std::vector<int>* created) {
        const int v0 = tris[t].v[0], v1 = tris[t].v[1], v2 = tris[t].v[2];
        const int n0 = tris[t].nb[0], n1 = tris[t].nb[1], n2 = tris[t].nb[2];
        const bool c0 = tris[t].cons[0], c1 = tris[t].cons[1], c2 = tris[t].cons[2];
        const int ta = t;
        const int tb = static_cast<int>(tris.size());
        const int tc = tb + 1;
        // ta = (v0, v1, vp), tb = (v1, v2, vp), tc = (v2, v0, vp)
        tris[ta] = Tri{{v0, v1, vp}, {tb, tc, n2}, {false, false, c2}, true};
        tris.push_back(Tri{{v1, v2, vp}, {tc, ta, n0}, {false, false, c0}, true});
        tris.push_back(Tri{{v2, v0, vp}, {ta, tb, n1}, {false, false, c1}, true});
        relink(n0, t, tb);
        relink(n1, t, tc);
        // n2 already points at ta == t.
        stack.push_back({ta, 2});
        stack.push_back({tb, 2});
        stack.push_back({tc, 2});
        if (created) {
            created->push_back(ta);
            created->push_back(tb);
            created->push_back(tc);
        }
    }

    void split_edge(int t, int slot, int vp, std::vector<std::pair<int, int>>& stack,
                    std::vector<int>* created) {
        const int n = tris[t].nb[slot];
        const bool was_cons = tris[t].cons[slot];
        const int a = tris[t].v[(slot + 1) % 3];
        const int b = tris[t].v[(slot + 2) % 3];
        const int c = tris[t].v[slot];
        const int t_ab = t;  // becomes (a, vp, c)
        const int t_b = static_cast<int>(tris.size());  // (vp, b, c)
        const int tn_a = tris[t].nb[(slot + 2) % 3];  // across (c, a)
        const int tn_b = tris[t].nb[(slot + 1) % 3];  // across (b, c)
        const bool tc_a = tris[t].cons[(slot + 2) % 3];
        const bool tc_b = tris[t].cons[(slot + 1) % 3];
        if (n < 0) {
            tris[t_ab] = Tri{{a, vp, c}, {t_b, tn_a, -1}, {false, tc_a, was_cons}, true};
            tris.push_back(Tri{{vp, b, c}, {tn_b, t_ab, -1}, {tc_b, false, was_cons}, true});
            relink(tn_b, t, t_b);
            stack.push_back({t_ab, 1});
            stack.push_back({t_b, 0});
            if (created) {
                created->push_back(t_ab);
                created->push_back(t_b);
            }
            return;
        }
        const int j = nb_slot(n, t);
        const int d = tris[n].v[j];
        // In n the shared edge is (b, a); other edges: opp a = (b, d)?  Use
        // vertex slots directly.
        const int n_a_slot = vertex_slot(n, a);  // edge opposite a in n
        const int n_b_slot = vertex_slot(n, b);  // edge opposite b in n
        const int nn_a = tris[n].nb[n_a_slot];
        const int nn_b = tris[n].nb[n_b_slot];
        const bool nc_a = tris[n].cons[n_a_slot];
        const bool nc_b = tris[n].cons[n_b_slot];
        const int n_ab = n;  // becomes (vp, a, d)
        const int n_b2 = static_cast<int>(tris.size()) + 1;  // (b, vp, d)
        // t side: (a, vp, c) and (vp, b, c)
        tris[t_ab] = Tri{{a, vp, c}, {t_b, tn_a, n_ab}, {false, tc_a, was_cons}, true};
        tris.push_back(Tri{{vp, b, c}, {tn_b, t_ab, n_b2}, {tc_b, false, was_cons}, true});
        // n side: (vp, a, d) and (b, vp, d)
        tris[n_ab] = Tri{{vp, a, d}, {nn_b, n_b2, t_ab}, {nc_b, false, was_cons}, true};
        tris.push_back(Tri{{b, vp, d}, {n_ab, nn_a, t_b}, {false, nc_a, was_cons}, true});
        relink(tn_b, t, t_b);
        relink(nn_a, n, n_b2);
        stack.push_back({t_ab, 1});
        stack.push_back({t_b, 0});
        stack.push_back({n_ab, 0});
        stack.push_back({n_b2, 1});
        if (created) {
            created->push_back(t_ab);
            created->push_back(t_b);
            created->push_back(n_ab);
            created->push_back(n_b2);
        }
    }

    // Finds a live triangle incident to vertex v.
    int incident_triangle(int v) const {
        int dummy;
        const int t = const_cast<Triangulation*>(this)->locate_vertex(v, &dummy);
        return t;
    }

    int locate_vertex(int v, int* slot) {
        int on_edge = -1;
        int t = locate(pts[v], last_tri, &on_edge);
        // The located triangle holds the vertex position; it or a neighbor
        // has v as a corner.
        for (int ring = 0; ring < 2; ++ring) {
            for (int i = 0; i < 3; ++i)
                if (tris[t].v[i] == v) {
                    *slot = i;
                    return t;
                }
            bool moved = false;
            for (int i = 0; i < 3 && !moved; ++i) {
                const int n = tris[t].nb[i];
                if (n < 0 || !tris[n].alive) continue;
                for (int k = 0; k < 3; ++k)
                    if (tris[n].v[k] == v) {
                        t = n;
                        moved = true;
                        break;
                    }
            }
            if (!moved) break;
        }
        // Fallback scan.
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            if (!tris[i].alive) continue;
            for (int k = 0; k < 3; ++k)
                if (tris[i].v[k] == v) {
                    *slot = k;
                    return i;
                }
        }
        throw std::logic_error("vertex has no incident triangle");
    }

    // Marks edge (a, b) constrained if already present; returns false if
    // the edge does not exist in the triangulation.
    bool mark_if_present(int a, int b) {
        for (int t : fan_around(a)) {
            for (int i = 0; i < 3; ++i) {
                if (tris[t].v[i] != b) continue;
                // Edge (a, b) is the edge opposite the third vertex.
                for (int k = 0; k < 3; ++k)
                    if (tris[t].v[k] != a && tris[t].v[k] != b) {
                        tris[t].cons[k] = true;
                        const int n = tris[t].nb[k];
                        if (n >= 0) tris[n].cons[nb_slot(n, t)] = true;
                        return true;
                    }
            }
        }
        return false;
    }

    // Every live triangle incident to vertex v, orbiting both ways so a
    // hull-adjacent fan is covered too.
    std::vector<int> fan_around(int v) {
        int slot;
        const int start = locate_vertex(v, &slot);
        std::vector<int> fan{start};
        for (int dir = 1; dir <= 2; ++dir) {
            int cur = start;
            int guard = 0;
            while (true) {
                const int iv = vertex_slot(cur, v);
                const int next = tris[cur].nb[(iv + dir) % 3];
                if (next < 0 || next == start) break;
                if (std::find(fan.begin(), fan.end(), next) != fan.end()) break;
                fan.push_back(next);
                cur = next;
                if (++guard > 10000) throw std::logic_error("vertex orbit failed");
            }
        }
        return fan;
    }

    void insert_constraint(int a, int b) {
        if (a == b) return;
        if (mark_if_present(a, b)) return;
        // Find the fan triangle whose opposite edge the segment a -> b
        // exits, then walk the corridor of crossed triangles.
        int cur = -1, exit_slot = -1;
        for (int cand : fan_around(a)) {
            const int ia = vertex_slot(cand, a);
            const int p = tris[cand].v[(ia + 1) % 3];
            const int q = tris[cand].v[(ia + 2) % 3];
            long double mp = 0, mq = 0;
            const long double op = orient(pts[a], pts[b], pts[p], &mp);
            const long double oq = orient(pts[a], pts[b], pts[q], &mq);
            const bool p_on = std::abs(static_cast<double>(op)) <= 1e-13 * mp;
            const bool q_on = std::abs(static_cast<double>(oq)) <= 1e-13 * mq;
            // Segment leaves through edge (p, q) when p is left (or on),
            // q is right (or on), and the edge separates a from b.
            if ((op > 0 || p_on) && (oq < 0 || q_on) &&
                orient(pts[p], pts[q], pts[a]) * orient(pts[p], pts[q], pts[b]) < 0) {
                if (p_on || q_on) {
                    // A vertex sits on the segment: split the constraint.
                    const int mid = p_on ? p : q;
                    insert_constraint(a, mid);
                    insert_constraint(mid, b);
                    return;
                }
                cur = cand;
                exit_slot = ia;
                break;
            }
        }
        if (cur < 0) throw std::logic_error("constraint start not found");
        std::vector<int> dead{cur};
        std::vector<int> left{a}, right{a};
        int u_left = tris[cur].v[(exit_slot + 1) % 3];
        int u_right = tris[cur].v[(exit_slot + 2) % 3];
        if (orient(pts[a], pts[b], pts[u_left]) < 0) std::swap(u_left, u_right);
        left.push_back(u_left);
        right.push_back(u_right);
        int t_cur = cur;
        int guard = 0;
        while (true) {
            // Cross the edge (u_left, u_right) into the next triangle.
            int cross_slot = -1;
            for (int i = 0; i < 3; ++i)
                if (tris[t_cur].v[i] != u_left && tris[t_cur].v[i] != u_right)
                    cross_slot = i;
            if (tris[t_cur].cons[cross_slot])
                throw std::logic_error("constraint crosses another constraint");
            const int n = tris[t_cur].nb[cross_slot];
            if (n < 0) throw std::logic_error("constraint walk left the mesh");
            dead.push_back(n);
            int w = -1;
            for (int i = 0; i < 3; ++i)
                if (tris[n].v[i] != u_left && tris[n].v[i] != u_right) w = tris[n].v[i];
            if (w == b) break;
            long double mw = 0;
            const long double ow = orient(pts[a], pts[b], pts[w], &mw);
            if (std::abs(static_cast<double>(ow)) <= 1e-13 * mw) {
                // Vertex on the segment: restart in two halves.  The
                // corridor triangles stay; nothing was modified yet.
                insert_constraint(a, w);
                insert_constraint(w, b);
                return;
            }
            if (ow > 0) {
                u_left = w;
                left.push_back(w);
            } else {
                u_right = w;
                right.push_back(w);
            }
            t_cur = n;
            if (++guard > 100000) throw std::logic_error("constraint corridor too long");
        }
        left.push_back(b);
        right.push_back(b);
        // Collect outer boundary links of the corridor before freeing it.
        std::unordered_map<std::uint64_t, std::pair<int, std::pair<int, bool>>> outer;
        auto key = [](int x, int y) {
            if (x > y) std::swap(x, y);
            return (static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y);
        };
        for (int td : dead) {
            for (int i = 0; i < 3; ++i) {
                const int n = tris[td].nb[i];
                if (n >= 0 && std::find(dead.begin(), dead.end(), n) != dead.end())
                    continue;
                const int va = tris[td].v[(i + 1) % 3];
                const int vb = tris[td].v[(i + 2) % 3];
                outer[key(va, vb)] = {n, {0, tris[td].cons[i]}};
            }
        }
        for (int td : dead) tris[td].alive = false;
        // Retriangulate both sides of the new edge, then stitch all
        // neighbor links (among the new triangles and to the outside).
        std::vector<int> made;
        triangulate_pseudo(left, made);
        std::vector<int> right_rev(right.rbegin(), right.rend());
        triangulate_pseudo(right_rev, made);
        // Stitch neighbor links among new triangles and to the outside.
        std::unordered_map<std::uint64_t, std::pair<int, int>> half;
        for (int id : made)
            for (int i = 0; i < 3; ++i) {
                const int ea = tris[id].v[(i + 1) % 3];
                const int eb = tris[id].v[(i + 2) % 3];
                const std::uint64_t k = key(ea, eb);
                auto it = half.find(k);
                if (it != half.end()) {
                    tris[id].nb[i] = it->second.first;
                    tris[it->second.first].nb[it->second.second] = id;
                } else {
                    half[k] = {id, i};
                }
            }
        for (auto& [k, on] : outer) {
            auto it = half.find(k);
            if (it == half.end()) throw std::logic_error("corridor stitch failed");
            const int id = it->second.first;
            const int slot = it->second.second;
            const int n = on.first;
            tris[id].nb[slot] = n;
            tris[id].cons[slot] = on.second.second;
            if (n >= 0) {
                // Find the slot in n that pointed into the corridor.
                for (int i = 0; i < 3; ++i) {
                    const int va = tris[n].v[(i + 1) % 3];
                    const int vb = tris[n].v[(i + 2) % 3];
                    if (key(va, vb) == k) {
                        tris[n].nb[i] = id;
                        break;
                    }
                }
            }
        }
        // Mark the constraint itself.
        const std::uint64_t kab = key(a, b);
        auto it = half.find(kab);
        if (it == half.end()) throw std::logic_error("constraint edge missing after insert");
        {
            const int id = it->second.first;
            const int slot = it->second.second;
            tris[id].cons[slot] = true;
            const int n = tris[id].nb[slot];
            if (n >= 0) tris[n].cons[nb_slot(n, id)] = true;
        }
    }

    // Fills the pseudo-polygon chain (first and last entries are the base
    // edge endpoints) with triangles; neighbor links are stitched later.
    void triangulate_pseudo(const std::vector<int>& chain, std::vector<int>& made) {
        if (chain.size() < 3) return;
        // chain = base_start, interior..., base_end with interior on the
        // left of base_start -> base_end.
        struct Job { int lo, hi; };
        std::vector<Job> jobs{{0, static_cast<int>(chain.size()) - 1}};
        while (!jobs.empty()) {
            auto [lo, hi] = jobs.back();
            jobs.pop_back();
            if (hi - lo < 2) continue;
            int c = lo + 1;
            for (int i = lo + 2; i < hi; ++i)
                if (incircle(pts[chain[lo]], pts[chain[hi]], pts[chain[c]], pts[chain[i]]))
                    c = i;
            const int id = static_cast<int>(tris.size());
            tris.push_back(Tri{{chain[lo], chain[hi], chain[c]},
                               {-1, -1, -1},
                               {false, false, false},
                               true});
            made.push_back(id);
            jobs.push_back({lo, c});
            jobs.push_back({c, hi});
        }
    }
};

double tri_min_angle(Vec2 a, Vec2 b, Vec2 c) {
    const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    auto ang = [](double opp, double s1, double s2) {
        double x = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2);
        x = std::clamp(x, -1.0, 1.0);
        return std::acos(x);
    };
    return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)}) * 180 / M_PI;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2 * cross(ab, ac);
    const double ab2 = ab.norm2(), ac2 = ac.norm2();
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

// Even-odd point-in-region test against the fixed input segments.
bool in_region(Vec2 p, const std::vector<Vec2>& pts,
               const std::vector<std::pair<int, int>>& segs) {
    bool inside = false;
    for (const auto& [ia, ib] : segs) {
        Vec2 a = pts[ia], b = pts[ib];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xcross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (xcross > p.x) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

std::vector<Cell> triangulate_region(const std::vector<Vec2>& points,
                                     const std::vector<std::pair<int, int>>& segments,
                                     double min_angle_deg, double max_edge,
                                     int vertex_cap) {
    if (points.empty()) return {};
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (Vec2 p : points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    Triangulation tr;
    tr.init(lo, hi);
    std::vector<int> ids(points.size());
    for (size_t i = 0; i < points.size(); ++i) ids[i] = tr.insert(points[i]);
    for (const auto& [a, b] : segments) tr.insert_constraint(ids[a], ids[b]);

    auto in_buffer = [&](Vec2 p) { return in_region(p, points, segments); };

    // Ruppert-style refinement.  Encroached constraint subsegments are
    // split first; a bad triangle's circumcenter is inserted only when it
    // encroaches no subsegment, otherwise the offended subsegment is split
    // instead.  Subsegments ending at an original input vertex split on
    // concentric power-of-two shells around that vertex, which stops the
    // mutual-encroachment ping-pong at corners sharper than a right angle.
    const int n_input = static_cast<int>(tr.pts.size());
    std::vector<std::pair<int, int>> subsegs;
    {
        std::set<std::pair<int, int>> seen;
        for (const auto& T : tr.tris) {
            if (!T.alive) continue;
            for (int i = 0; i < 3; ++i) {
                if (!T.cons[i]) continue;
                const int va = T.v[(i + 1) % 3], vb = T.v[(i + 2) % 3];
                if (seen.insert({std::min(va, vb), std::max(va, vb)}).second)
                    subsegs.push_back({va, vb});
            }
        }
    }
    const double eps_len = 1e-9 * tr.scale;

    std::deque<int> dirty;
    for (int i = 0; i < static_cast<int>(tr.tris.size()); ++i)
        if (tr.tris[i].alive) dirty.push_back(i);

    auto encroached_by = [&](const std::pair<int, int>& s, Vec2 x) {
        const Vec2 A = tr.pts[s.first], B = tr.pts[s.second];
        return dot(A - x, B - x) < -1e-14 * (A - x).norm2();
    };
    auto point_encroaches = [&](Vec2 x) {
        for (int i = 0; i < static_cast<int>(subsegs.size()); ++i) {
            const Vec2 A = tr.pts[subsegs[i].first], B = tr.pts[subsegs[i].second];
            if (dot(A - x, B - x) < 0) return i;
        }
        return -1;
    };
    auto split_subseg = [&](int si) {
        const auto [va, vb] = subsegs[si];
        const Vec2 A = tr.pts[va], B = tr.pts[vb];
        const double len = dist(A, B);
        if (len <= 2 * eps_len) return false;  // give up rather than grind to dust
        if (static_cast<int>(tr.pts.size()) >= vertex_cap)
            throw std::runtime_error("triangulate_region: vertex cap exceeded");
        double frac = 0.5;
        const bool a_in = va < n_input, b_in = vb < n_input;
        if (a_in != b_in) {
            const double r = std::pow(2.0, std::round(std::log2(0.5 * len)));
            frac = std::clamp(r / len, 0.25, 0.75);
            if (b_in) frac = 1 - frac;
        }
        const Vec2 m = A + frac * (B - A);
        std::vector<int> created;
        const int vm = tr.insert_on_constraint(va, vb, m, &created);
        if (created.empty()) return false;
        subsegs[si] = {va, vm};
        subsegs.push_back({vm, vb});
        for (int c : created) dirty.push_back(c);
        return true;
    };

    int processed = 0;
    while (!dirty.empty()) {
        const int t = dirty.front();
        dirty.pop_front();
        if (t >= static_cast<int>(tr.tris.size()) || !tr.tris[t].alive) continue;
        if (++processed > 50 * vertex_cap)
            throw std::runtime_error("triangulate_region: refinement stalled");

        // Encroachment pass for this triangle's constrained edges.
        bool split_done = false;
        for (int i = 0; i < 3 && !split_done; ++i) {
            if (!tr.tris[t].cons[i]) continue;
            const int va = tr.tris[t].v[(i + 1) % 3];
            const int vb = tr.tris[t].v[(i + 2) % 3];
            const int apex1 = tr.tris[t].v[i];
            bool enc = apex1 >= 3 && encroached_by({va, vb}, tr.pts[apex1]);
            const int n = tr.tris[t].nb[i];
            if (!enc && n >= 0 && tr.tris[n].alive) {
                const int apex2 = tr.tris[n].v[tr.nb_slot(n, t)];
                enc = apex2 >= 3 && encroached_by({va, vb}, tr.pts[apex2]);
            }
            if (!enc) continue;
            for (int si = 0; si < static_cast<int>(subsegs.size()); ++si) {
                const auto& s = subsegs[si];
                if ((s.first == va && s.second == vb) ||
                    (s.first == vb && s.second == va)) {
                    split_done = split_subseg(si);
                    break;
                }
            }
        }
        if (split_done) continue;
        if (tr.tris[t].v[0] < 3 || tr.tris[t].v[1] < 3 || tr.tris[t].v[2] < 3) continue;

        const Vec2 a = tr.pts[tr.tris[t].v[0]];
        const Vec2 b = tr.pts[tr.tris[t].v[1]];
        const Vec2 c = tr.pts[tr.tris[t].v[2]];
        if (!in_buffer((a + b + c) / 3)) continue;
        const double longest = std::max({dist(a, b), dist(b, c), dist(a, c)});
        const bool bad = tri_min_angle(a, b, c) < min_angle_deg - 1e-9 ||
                         longest > max_edge * (1 + 1e-12);
        if (!bad) continue;
        if (static_cast<int>(tr.pts.size()) >= vertex_cap)
            throw std::runtime_error("triangulate_region: vertex cap exceeded");
        Vec2 cc = circumcenter(a, b, c);
        if (!in_buffer(cc)) {
            // Longest-edge midpoint stays inside the closed region.
            if (dist(a, b) >= dist(b, c) && dist(a, b) >= dist(a, c))
                cc = 0.5 * (a + b);
            else if (dist(b, c) >= dist(a, c))
                cc = 0.5 * (b + c);
            else
                cc = 0.5 * (a + c);
        }
        const int enc = point_encroaches(cc);
        if (enc >= 0) {
            // Defer to the offended subsegment; if it is too short to split
            // the triangle is as good as the geometry allows.
            if (split_subseg(enc)) dirty.push_back(t);
            continue;
        }
        std::vector<int> created;
        tr.insert(cc, &created);
        if (created.empty()) continue;  // landed on an existing vertex
        for (int cr : created) dirty.push_back(cr);
        dirty.push_back(t);
    }

    std::vector<Cell> out;
    for (const auto& t : tr.tris) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        const Vec2 a = tr.pts[t.v[0]], b = tr.pts[t.v[1]], c = tr.pts[t.v[2]];
        if (!in_region((a + b + c) / 3, points, segments)) continue;
        Cell cell;
        cell.type = CellType::StraightTri;
        cell.v[0] = a;
        cell.v[1] = b;
        cell.v[2] = c;
        if (cross(b - a, c - a) < 0) std::swap(cell.v[1], cell.v[2]);
        out.push_back(cell);
    }
    std::sort(out.begin(), out.end(), [](const Cell& x, const Cell& y) {
        const Vec2 cx = (x.v[0] + x.v[1] + x.v[2]) / 3;
        const Vec2 cy = (y.v[0] + y.v[1] + y.v[2]) / 3;
        if (cx.y != cy.y) return cx.y < cy.y;
        return cx.x < cy.x;
    });
    return out;
}

}  // namespace volpot
