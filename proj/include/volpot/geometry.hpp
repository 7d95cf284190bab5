#pragma once

#include <memory>
#include <vector>

#include "volpot/common.hpp"

namespace volpot {

// Closed smooth curve with a 2*pi-periodic parameter, oriented
// counterclockwise (the enclosed region lies to the left of travel).
class Curve {
public:
    virtual ~Curve() = default;
    virtual Vec2 pos(double t) const = 0;
    virtual Vec2 deriv(double t) const = 0;
    virtual Vec2 deriv2(double t) const = 0;
    virtual Vec2 deriv3(double t) const = 0;
    virtual bool contains(Vec2 p) const = 0;

    double speed(double t) const { return deriv(t).norm(); }
    Vec2 unit_tangent(double t) const { return deriv(t).normalized(); }
    // Outward normal of the enclosed region.
    Vec2 outward_normal(double t) const;
    double curvature(double t) const;
    double arclength(double t0, double t1) const;
    double total_arclength() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;
};

class Circle : public Curve {
public:
    Circle(Vec2 center, double radius);
    Vec2 pos(double t) const override;
    Vec2 deriv(double t) const override;
    Vec2 deriv2(double t) const override;
    Vec2 deriv3(double t) const override;
    bool contains(Vec2 p) const override;

private:
    Vec2 c_;
    double r_;
};

class Ellipse : public Curve {
public:
    Ellipse(Vec2 center, double a, double b, double angle = 0);
    Vec2 pos(double t) const override;
    Vec2 deriv(double t) const override;
    Vec2 deriv2(double t) const override;
    Vec2 deriv3(double t) const override;
    bool contains(Vec2 p) const override;

private:
    Vec2 c_;
    double a_, b_, cs_, sn_;
};

// Radial perturbation of a circle: rho(t) = r0 (1 + amp cos(arms*t + phase)),
// position c + rho(t) (cos t, sin t).  Requires |amp| < 1 so rho > 0.
class StarCurve : public Curve {
public:
    StarCurve(Vec2 center, double r0, double amp, int arms, double phase = 0);
    Vec2 pos(double t) const override;
    Vec2 deriv(double t) const override;
    Vec2 deriv2(double t) const override;
    Vec2 deriv3(double t) const override;
    bool contains(Vec2 p) const override;

private:
    Vec2 c_;
    double r0_, amp_, phase_;
    int arms_;
};

// Multiply connected region: inside `outer`, outside every hole.  All
// curves are counterclockwise; holes must be disjoint and strictly inside.
struct Domain {
    std::shared_ptr<Curve> outer;
    std::vector<std::shared_ptr<Curve>> holes;

    bool contains(Vec2 p) const;
    void bounding_box(Vec2& lo, Vec2& hi) const;
    double diameter() const;
    int num_curves() const { return 1 + static_cast<int>(holes.size()); }
    // Curve 0 is the outer boundary, 1..m are the holes.
    const Curve& curve(int i) const { return i == 0 ? *outer : *holes[i - 1]; }
    // Unit normal pointing out of the region (into hole i for i >= 1).
    Vec2 region_outward_normal(int i, double t) const;
};

enum class CellType { StraightTri, CurvedTri, Box };

// Mesh cell with its reference-to-physical map R.  Triangles use the unit
// simplex {xi, eta >= 0, xi + eta <= 1}; v[0], v[1] span the base edge
// (the curved one, tracking curve->pos over [ta, tb], when type is
// CurvedTri) and v[2] is the apex.  Boxes use [-1, 1]^2 with
// R(zeta) = center + (h/2) zeta.
struct Cell {
    CellType type = CellType::Box;
    Vec2 v[3];
    const Curve* curve = nullptr;
    double ta = 0, tb = 0;
    Vec2 center;
    double h = 0;

    Vec2 map(Vec2 zeta) const;
    // Columns of the map derivative and its determinant.
    void map_deriv(Vec2 zeta, Vec2& x, Vec2& dxi, Vec2& deta, double& jac) const;
    double jacobian(Vec2 zeta) const;
    // Newton inversion of R; returns the reference point (possibly slightly
    // outside the cell for exterior physical points near it).
    Vec2 invert(Vec2 x) const;
    bool ref_contains(Vec2 zeta, double pad = 1e-12) const;
    double area() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;
    int num_corners() const { return type == CellType::Box ? 4 : 3; }
    Vec2 ref_corner(int i) const;
    // Closed outline in physical space, per_edge samples per edge (the
    // start corner of each edge included, its end excluded).
    std::vector<Vec2> outline(int per_edge) const;
};

// Reference point of the cell closest to x in physical distance: the
// preimage of x when x lies inside the cell, otherwise the minimizer over
// the cell boundary.  dist receives |R(zeta*) - x|.
Vec2 nearest_reference_point(const Cell& cell, Vec2 x, double* dist);

}  // namespace volpot
