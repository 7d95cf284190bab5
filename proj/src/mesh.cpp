#include "volpot/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "volpot/delaunay.hpp"
#include "volpot/quad1d.hpp"

namespace volpot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cumulative arclength of a curve on a uniform parameter grid, fine enough
// that one Gauss panel per interval is exact to roundoff.
struct ArclengthTable {
    const Curve* c = nullptr;
    int intervals = 0;
    double dt = 0;
    std::vector<double> s;  // s[0] = 0, s[intervals] = total length

    double partial(double a, double b) const {
        const QuadRule1D& gl = gauss_legendre(16);
        double acc = 0;
        for (int q = 0; q < gl.size(); ++q)
            acc += 0.5 * (b - a) * gl.w[q] * c->speed(a + 0.5 * (b - a) * (gl.x[q] + 1));
        return acc;
    }
    double eval(double t) const {
        const int k = std::clamp(static_cast<int>(t / dt), 0, intervals - 1);
        return s[k] + partial(k * dt, t);
    }
};

ArclengthTable build_arclength_table(const Curve& c, int n_knots) {
    ArclengthTable tab;
    tab.c = &c;
    tab.intervals = std::max(1024, 32 * n_knots);
    tab.dt = 2 * M_PI / tab.intervals;
    tab.s.assign(tab.intervals + 1, 0.0);
    for (int k = 0; k < tab.intervals; ++k)
        tab.s[k + 1] = tab.s[k] + tab.partial(k * tab.dt, (k + 1) * tab.dt);
    return tab;
}

// Solves s(t) = target by bracketed Newton on the arclength function.
double solve_arclength(const ArclengthTable& tab, double target) {
    const auto it = std::upper_bound(tab.s.begin(), tab.s.end(), target);
    const int k = std::clamp(static_cast<int>(it - tab.s.begin()) - 1, 0, tab.intervals - 1);
    double lo = k * tab.dt, hi = (k + 1) * tab.dt;
    const double gap = std::max(tab.s[k + 1] - tab.s[k], 1e-300);
    double t = lo + (hi - lo) * (target - tab.s[k]) / gap;
    const double tol = 1e-13 * std::max(1.0, tab.s.back());
    for (int iter = 0; iter < 100; ++iter) {
        const double f = tab.eval(t) - target;
        if (std::abs(f) <= tol) break;
        (f > 0 ? hi : lo) = t;
        double tn = t - f / std::max(tab.c->speed(t), 1e-300);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    return t;
}

// Minimum Jacobian over a sample grid covering the reference simplex,
// including the curved edge and the collapsed corner.
double min_curved_jacobian(const Cell& cell) {
    double jmin = kInf;
    const int n = 12;
    for (int i = 0; i <= n; ++i) {
        const double xi = static_cast<double>(i) / n;
        for (int j = 0; j <= n; ++j) {
            const double eta = (1 - xi) * j / n;
            jmin = std::min(jmin, cell.jacobian({xi, eta}));
        }
    }
    return jmin;
}

double point_box_dist(Vec2 p, Vec2 blo, Vec2 bhi) {
    const double dx = std::max({blo.x - p.x, 0.0, p.x - bhi.x});
    const double dy = std::max({blo.y - p.y, 0.0, p.y - bhi.y});
    return std::hypot(dx, dy);
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double o1 = cross(b - a, c - a), o2 = cross(b - a, d - a);
    const double o3 = cross(d - c, a - c), o4 = cross(d - c, b - c);
    return (o1 > 0) != (o2 > 0) && (o3 > 0) != (o4 > 0);
}

double seg_seg_dist(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_cross(a, b, c, d)) return 0;
    return std::min({point_segment_dist(a, c, d), point_segment_dist(b, c, d),
                     point_segment_dist(c, a, b), point_segment_dist(d, a, b)});
}

double seg_box_dist(Vec2 a, Vec2 b, Vec2 blo, Vec2 bhi) {
    if (point_box_dist(a, blo, bhi) == 0 || point_box_dist(b, blo, bhi) == 0) return 0;
    const Vec2 c00 = blo, c10{bhi.x, blo.y}, c11 = bhi, c01{blo.x, bhi.y};
    return std::min({seg_seg_dist(a, b, c00, c10), seg_seg_dist(a, b, c10, c11),
                     seg_seg_dist(a, b, c11, c01), seg_seg_dist(a, b, c01, c00)});
}

// Distance from a solid box to a cell outline: exact against straight
// edges, 64-point sampling along the curved one.
double cell_box_clearance(const Cell& cell, Vec2 blo, Vec2 bhi) {
    double d;
    if (cell.type == CellType::CurvedTri) {
        d = std::min(seg_box_dist(cell.v[1], cell.v[2], blo, bhi),
                     seg_box_dist(cell.v[2], cell.v[0], blo, bhi));
        for (int i = 0; i <= 64; ++i) {
            const double t = cell.ta + (cell.tb - cell.ta) * i / 64.0;
            d = std::min(d, point_box_dist(cell.curve->pos(t), blo, bhi));
        }
    } else {
        d = std::min({seg_box_dist(cell.v[0], cell.v[1], blo, bhi),
                      seg_box_dist(cell.v[1], cell.v[2], blo, bhi),
                      seg_box_dist(cell.v[2], cell.v[0], blo, bhi)});
    }
    return d;
}

double tri_min_angle_deg(Vec2 a, Vec2 b, Vec2 c) {
    const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    auto ang = [](double opp, double s1, double s2) {
        const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
        return std::acos(cosv);
    };
    return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)}) * 180 / M_PI;
}

double loop_area(const Curve& c) {
    const QuadRule1D& gl = gauss_legendre(20);
    double prev = kInf;
    for (int panels = 8; panels <= 16384; panels *= 2) {
        double acc = 0;
        for (int k = 0; k < panels; ++k) {
            const double a = 2 * M_PI * k / panels;
            const double b = 2 * M_PI * (k + 1) / panels;
            for (int q = 0; q < gl.size(); ++q) {
                const double t = a + 0.5 * (b - a) * (gl.x[q] + 1);
                acc += 0.25 * (b - a) * gl.w[q] * cross(c.pos(t), c.deriv(t));
            }
        }
        if (std::abs(acc - prev) <= 1e-13 * std::max(1.0, std::abs(acc))) return acc;
        prev = acc;
    }
    return prev;
}

}  // namespace

struct CellLocator {
    Vec2 lo;
    double bucket = 1;
    double pad = 0;  // bboxes are dilated by this much when bucketed
    int nx = 0, ny = 0;
    std::vector<std::vector<int>> lists;
};

namespace {

std::shared_ptr<const CellLocator> make_locator(const HybridMesh& m) {
    auto loc = std::make_shared<CellLocator>();
    if (m.cells.empty() || m.h <= 0) return loc;
    loc->bucket = m.h;
    loc->pad = 0.5 * m.h;
    Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
    std::vector<Vec2> blo(m.cells.size()), bhi(m.cells.size());
    for (size_t k = 0; k < m.cells.size(); ++k) {
        m.cells[k].bounding_box(blo[k], bhi[k]);
        lo.x = std::min(lo.x, blo[k].x);
        lo.y = std::min(lo.y, blo[k].y);
        hi.x = std::max(hi.x, bhi[k].x);
        hi.y = std::max(hi.y, bhi[k].y);
    }
    loc->lo = lo - Vec2(loc->pad, loc->pad);
    loc->nx = static_cast<int>(std::ceil((hi.x + loc->pad - loc->lo.x) / loc->bucket)) + 1;
    loc->ny = static_cast<int>(std::ceil((hi.y + loc->pad - loc->lo.y) / loc->bucket)) + 1;
    loc->lists.resize(static_cast<size_t>(loc->nx) * loc->ny);
    for (size_t k = 0; k < m.cells.size(); ++k) {
        const int x0 = std::clamp(static_cast<int>(std::floor((blo[k].x - loc->pad - loc->lo.x) / loc->bucket)), 0, loc->nx - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor((bhi[k].x + loc->pad - loc->lo.x) / loc->bucket)), 0, loc->nx - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor((blo[k].y - loc->pad - loc->lo.y) / loc->bucket)), 0, loc->ny - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor((bhi[k].y + loc->pad - loc->lo.y) / loc->bucket)), 0, loc->ny - 1);
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix)
                loc->lists[ix + static_cast<size_t>(loc->nx) * iy].push_back(static_cast<int>(k));
    }
    return loc;
}

}  // namespace

std::vector<double> place_knots(const Curve& c, double h) {
    if (h <= 0) throw std::invalid_argument("place_knots: h must be positive");
    const double ell0 = c.total_arclength();
    if (!(h < ell0 / 4))
        throw std::invalid_argument("place_knots: h must be below a quarter of the curve length");
    const int n = static_cast<int>(std::llround(ell0 / h));
    const ArclengthTable tab = build_arclength_table(c, n);
    const double ell = tab.s.back();
    std::vector<double> knots(n);
    // Knots at arclengths (j + 1/2) ell / n, so the first and last sit half
    // a spacing clear of the parameter wrap.
    for (int j = 0; j < n; ++j)
        knots[j] = solve_arclength(tab, (j + 0.5) * ell / n);
    return knots;
}

std::vector<Cell> build_boundary_cells(const Domain& dom, int curve_index,
                                       const std::vector<double>& knots, double h) {
    const Curve& c = dom.curve(curve_index);
    const int n = static_cast<int>(knots.size());
    if (n < 4) throw std::invalid_argument("build_boundary_cells: need at least 4 knots");
    std::vector<Cell> cells(n);
    for (int j = 0; j < n; ++j) {
        const double k0 = knots[j];
        const double k1 = j + 1 < n ? knots[j + 1] : knots[0] + 2 * M_PI;
        const double mid = 0.5 * (k0 + k1);
        Cell& cell = cells[j];
        cell.type = CellType::CurvedTri;
        cell.curve = &c;
        // Hole bands run the curve backwards so the apex, pushed into the
        // domain, stays on the left and the Jacobian positive.
        cell.ta = curve_index == 0 ? k0 : k1;
        cell.tb = curve_index == 0 ? k1 : k0;
        cell.v[0] = c.pos(cell.ta);
        cell.v[1] = c.pos(cell.tb);
        cell.v[2] = c.pos(mid) - h * dom.region_outward_normal(curve_index, mid);
        cell.center = (cell.v[0] + cell.v[1] + cell.v[2]) / 3;
        cell.h = h;
        // The offset curve at depth h degenerates where 1 -+ h kappa hits
        // zero; past that the band folds over itself even though each cell
        // alone may still map positively.
        for (int q = 0; q <= 32; ++q) {
            const double t = k0 + (k1 - k0) * q / 32.0;
            const double bend = curve_index == 0 ? 1 - h * c.curvature(t) : 1 + h * c.curvature(t);
            if (!(bend > 1e-9))
                throw std::runtime_error(
                    "build_boundary_cells: offset depth h folds the band on curve " +
                    std::to_string(curve_index) +
                    "; h exceeds the local concave curvature radius, use a smaller h");
        }
        if (!(min_curved_jacobian(cell) > 0))
            throw std::runtime_error(
                "build_boundary_cells: cell " + std::to_string(j) + " on curve " +
                std::to_string(curve_index) +
                " is inverted; h exceeds the local curvature radius, use a smaller h");
    }
    return cells;
}

HybridMesh build_mesh(const Domain& dom, double h, double delta) {
    if (h <= 0) throw std::invalid_argument("build_mesh: h must be positive");
    HybridMesh m;
    m.h = h;
    m.domain = &dom;

    std::vector<std::vector<Cell>> bands(dom.num_curves());
    for (int ci = 0; ci < dom.num_curves(); ++ci)
        bands[ci] = build_boundary_cells(dom, ci, place_knots(dom.curve(ci), h), h);

    // Candidate box lattice over the bounding box, anchored a quarter cell
    // below the corner so no lattice line grazes the extremal curve points.
    Vec2 lo, hi;
    dom.bounding_box(lo, hi);
    const Vec2 anchor = lo - Vec2(0.25 * h, 0.25 * h);
    const int nx = static_cast<int>(std::ceil((hi.x - anchor.x) / h)) + 1;
    const int ny = static_cast<int>(std::ceil((hi.y - anchor.y) / h)) + 1;

    std::vector<const Cell*> band_cells;
    for (const auto& band : bands)
        for (const Cell& c : band) band_cells.push_back(&c);

    // Bucket band cells over the lattice so each box only tests neighbors.
    std::vector<std::vector<int>> nearby(static_cast<size_t>(nx) * ny);
    const double reach = (delta + 0.1) * h;
    for (int k = 0; k < static_cast<int>(band_cells.size()); ++k) {
        Vec2 clo, chi;
        band_cells[k]->bounding_box(clo, chi);
        const int x0 = std::clamp(static_cast<int>(std::floor((clo.x - reach - anchor.x) / h)), 0, nx - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor((chi.x + reach - anchor.x) / h)), 0, nx - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor((clo.y - reach - anchor.y) / h)), 0, ny - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor((chi.y + reach - anchor.y) / h)), 0, ny - 1);
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix)
                nearby[ix + static_cast<size_t>(nx) * iy].push_back(k);
    }

    // Keep a box when nine probe points are inside the domain and the box
    // clears every boundary cell by more than delta h.
    std::vector<std::uint8_t> keep(static_cast<size_t>(nx) * ny, 0);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 blo = anchor + Vec2(ix * h, iy * h);
            const Vec2 bhi = blo + Vec2(h, h);
            bool ok = true;
            for (int i = 0; i < 3 && ok; ++i)
                for (int j = 0; j < 3 && ok; ++j)
                    ok = dom.contains({blo.x + 0.5 * i * h, blo.y + 0.5 * j * h});
            for (const int k : nearby[ix + static_cast<size_t>(nx) * iy]) {
                if (!ok) break;
                ok = cell_box_clearance(*band_cells[k], blo, bhi) > delta * h;
            }
            keep[ix + static_cast<size_t>(nx) * iy] = ok;
        }
    }

    // Constraint soup for the buffer: the kept-box frontier plus, per
    // curve, the zigzag chain knot, apex, knot, apex shared with the band
    // cells.  The buffer is the odd-parity region of that soup.
    std::vector<Vec2> pts;
    std::vector<std::pair<int, int>> segs;
    std::unordered_map<std::int64_t, int> corner_id;
    auto corner = [&](int ix, int iy) {
        const std::int64_t key = static_cast<std::int64_t>(iy) * (nx + 2) + ix;
        const auto [it, fresh] = corner_id.try_emplace(key, static_cast<int>(pts.size()));
        if (fresh) pts.push_back(anchor + Vec2(ix * h, iy * h));
        return it->second;
    };
    auto kept = [&](int ix, int iy) {
        return ix >= 0 && iy >= 0 && ix < nx && iy < ny &&
               keep[ix + static_cast<size_t>(nx) * iy];
    };
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (!kept(ix, iy)) continue;
            if (!kept(ix - 1, iy)) segs.push_back({corner(ix, iy), corner(ix, iy + 1)});
            if (!kept(ix + 1, iy)) segs.push_back({corner(ix + 1, iy), corner(ix + 1, iy + 1)});
            if (!kept(ix, iy - 1)) segs.push_back({corner(ix, iy), corner(ix + 1, iy)});
            if (!kept(ix, iy + 1)) segs.push_back({corner(ix, iy + 1), corner(ix + 1, iy + 1)});
        }
    }
    const size_t zig_start = segs.size();
    for (int ci = 0; ci < dom.num_curves(); ++ci) {
        const auto& band = bands[ci];
        const int n = static_cast<int>(band.size());
        const int base = static_cast<int>(pts.size());
        for (int j = 0; j < n; ++j) {
            pts.push_back(ci == 0 ? band[j].v[0] : band[j].v[1]);  // knot j
            pts.push_back(band[j].v[2]);                           // apex j
        }
        for (int j = 0; j < n; ++j) {
            segs.push_back({base + 2 * j, base + 2 * j + 1});
            segs.push_back({base + 2 * j + 1, base + 2 * ((j + 1) % n)});
        }
    }

    // Bands must not run into themselves or each other, or the buffer
    // region between them is ill-defined.
    for (size_t i = zig_start; i < segs.size(); ++i) {
        const Vec2 a = pts[segs[i].first], b = pts[segs[i].second];
        const Vec2 ilo{std::min(a.x, b.x), std::min(a.y, b.y)};
        const Vec2 ihi{std::max(a.x, b.x), std::max(a.y, b.y)};
        for (size_t j = i + 1; j < segs.size(); ++j) {
            if (segs[i].first == segs[j].first || segs[i].first == segs[j].second ||
                segs[i].second == segs[j].first || segs[i].second == segs[j].second)
                continue;
            const Vec2 c = pts[segs[j].first], d = pts[segs[j].second];
            if (std::max(c.x, d.x) < ilo.x || std::min(c.x, d.x) > ihi.x ||
                std::max(c.y, d.y) < ilo.y || std::min(c.y, d.y) > ihi.y)
                continue;
            if (segments_cross(a, b, c, d))
                throw std::runtime_error(
                    "build_mesh: boundary bands collide near (" + std::to_string(a.x) + ", " +
                    std::to_string(a.y) + "); curves come closer than the band depth, use a smaller h");
        }
    }

    std::vector<Cell> buffer;
    try {
        buffer = triangulate_region(pts, segs, 20.0, 2 * h);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("build_mesh: buffer triangulation failed: ") +
                                 e.what());
    }

    for (const auto& band : bands)
        for (const Cell& c : band) m.cells.push_back(c);
    for (Cell& c : buffer) {
        c.center = (c.v[0] + c.v[1] + c.v[2]) / 3;
        c.h = h;
        m.cells.push_back(c);
    }
    m.n_tri = static_cast<int>(m.cells.size());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (!kept(ix, iy)) continue;
            Cell b;
            b.type = CellType::Box;
            b.center = anchor + Vec2((ix + 0.5) * h, (iy + 0.5) * h);
            b.h = h;
            m.cells.push_back(b);
        }
    }
    m.n_box = static_cast<int>(m.cells.size()) - m.n_tri;
    m.locator = make_locator(m);
    return m;
}

TargetClassification classify_target(const HybridMesh& m, Vec2 r0, double D) {
    if (!(D > 0)) throw std::invalid_argument("classify_target: D must be positive");
    if (m.h <= 0 || m.cells.empty())
        throw std::invalid_argument("classify_target: mesh is empty");
    TargetClassification out;
    const double reach = D * m.h;
    const double inside_tol = 1e-9 * m.h;
    auto consider = [&](int k) {
        const Cell& cell = m.cells[k];
        Vec2 clo, chi;
        cell.bounding_box(clo, chi);
        const double slack = reach + inside_tol;
        if (r0.x < clo.x - slack || r0.x > chi.x + slack || r0.y < clo.y - slack ||
            r0.y > chi.y + slack)
            return;
        double d = 0;
        nearest_reference_point(cell, r0, &d);
        if (out.self < 0 && d <= inside_tol) {
            out.self = k;
            return;
        }
        if (d < reach) out.near_cells.push_back(k);
    };
    const CellLocator* loc = m.locator.get();
    if (loc && loc->nx > 0 && reach <= loc->pad) {
        const int ix = static_cast<int>(std::floor((r0.x - loc->lo.x) / loc->bucket));
        const int iy = static_cast<int>(std::floor((r0.y - loc->lo.y) / loc->bucket));
        if (ix < 0 || iy < 0 || ix >= loc->nx || iy >= loc->ny)
            throw std::runtime_error("classify_target: point is outside the mesh");
        for (const int k : loc->lists[ix + static_cast<size_t>(loc->nx) * iy]) consider(k);
    } else {
        for (int k = 0; k < static_cast<int>(m.cells.size()); ++k) consider(k);
    }
    if (out.self < 0)
        throw std::runtime_error("classify_target: point is not inside any cell");
    if (out.near_cells.size() > 30)
        throw std::runtime_error("classify_target: near set exceeds 30 cells");
    return out;
}

MeshReport mesh_validate(const HybridMesh& m) {
    MeshReport r;
    r.n_tri = m.n_tri;
    r.n_box = m.n_box;
    r.min_jacobian = m.cells.empty() ? 0 : kInf;
    r.min_angle_deg = 180;
    for (const Cell& c : m.cells) {
        r.cell_area_sum += c.area();
        switch (c.type) {
            case CellType::CurvedTri:
                r.min_jacobian = std::min(r.min_jacobian, min_curved_jacobian(c));
                break;
            case CellType::StraightTri:
                r.min_jacobian = std::min(r.min_jacobian, cross(c.v[1] - c.v[0], c.v[2] - c.v[0]));
                r.min_angle_deg = std::min(r.min_angle_deg, tri_min_angle_deg(c.v[0], c.v[1], c.v[2]));
                break;
            case CellType::Box:
                r.min_jacobian = std::min(r.min_jacobian, 0.25 * c.h * c.h);
                break;
        }
    }
    if (m.domain) {
        r.domain_area = domain_area(*m.domain);
        r.area_defect = std::abs(r.cell_area_sum - r.domain_area) / r.domain_area;
    }
    return r;
}

double domain_area(const Domain& dom) {
    double area = loop_area(*dom.outer);
    for (const auto& hole : dom.holes) area -= loop_area(*hole);
    return area;
}

void write_mesh(const HybridMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    out << std::setprecision(17);
    out << m.h << ' ' << m.n_tri << ' ' << m.n_box << '\n';
    for (const Cell& c : m.cells) {
        switch (c.type) {
            case CellType::StraightTri:
                out << 'T';
                for (const Vec2 v : c.v) out << ' ' << v.x << ' ' << v.y;
                out << '\n';
                break;
            case CellType::CurvedTri: {
                int ci = -1;
                if (m.domain)
                    for (int i = 0; i < m.domain->num_curves(); ++i)
                        if (&m.domain->curve(i) == c.curve) ci = i;
                if (ci < 0)
                    throw std::runtime_error(
                        "write_mesh: curved cell references a curve outside the domain");
                out << "C " << ci << ' ' << std::min(c.ta, c.tb) << ' '
                    << std::max(c.ta, c.tb) << ' ' << c.v[2].x << ' ' << c.v[2].y << '\n';
                break;
            }
            case CellType::Box:
                out << "B " << c.center.x << ' ' << c.center.y << '\n';
                break;
        }
    }
    if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

HybridMesh read_mesh(const Domain& dom, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open " + path);
    HybridMesh m;
    m.domain = &dom;
    int nt = 0, nb = 0;
    if (!(in >> m.h >> nt >> nb) || m.h <= 0 || nt < 0 || nb < 0)
        throw std::runtime_error("read_mesh: bad header in " + path);
    std::string tag;
    for (int k = 0; k < nt + nb; ++k) {
        if (!(in >> tag)) throw std::runtime_error("read_mesh: truncated file " + path);
        Cell c;
        c.h = m.h;
        if (tag == "T") {
            c.type = CellType::StraightTri;
            if (!(in >> c.v[0].x >> c.v[0].y >> c.v[1].x >> c.v[1].y >> c.v[2].x >> c.v[2].y))
                throw std::runtime_error("read_mesh: truncated file " + path);
            c.center = (c.v[0] + c.v[1] + c.v[2]) / 3;
        } else if (tag == "C") {
            int ci;
            double klo, khi;
            if (!(in >> ci >> klo >> khi >> c.v[2].x >> c.v[2].y))
                throw std::runtime_error("read_mesh: truncated file " + path);
            if (ci < 0 || ci >= dom.num_curves())
                throw std::runtime_error("read_mesh: curve index out of range in " + path);
            c.type = CellType::CurvedTri;
            c.curve = &dom.curve(ci);
            c.ta = ci == 0 ? klo : khi;
            c.tb = ci == 0 ? khi : klo;
            c.v[0] = c.curve->pos(c.ta);
            c.v[1] = c.curve->pos(c.tb);
            c.center = (c.v[0] + c.v[1] + c.v[2]) / 3;
        } else if (tag == "B") {
            c.type = CellType::Box;
            if (!(in >> c.center.x >> c.center.y))
                throw std::runtime_error("read_mesh: truncated file " + path);
        } else {
            throw std::runtime_error("read_mesh: unknown record '" + tag + "' in " + path);
        }
        if ((k < nt) != (c.type != CellType::Box))
            throw std::runtime_error("read_mesh: triangles must precede boxes in " + path);
        m.cells.push_back(c);
    }
    m.n_tri = nt;
    m.n_box = nb;
    m.locator = make_locator(m);
    return m;
}

}  // namespace volpot
