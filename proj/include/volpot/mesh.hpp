#pragma once

#include <memory>
#include <string>
#include <vector>

#include "volpot/geometry.hpp"

namespace volpot {

struct CellLocator;

// Hybrid tessellation of a domain: a band of curved triangles hugging each
// boundary curve, a straight-triangle buffer stitching the band to the
// bulk, and axis-aligned boxes of size h tiling the rest.  Triangles come
// first in `cells` (curved bands in curve order, then buffer), boxes after,
// sorted row by row.
struct HybridMesh {
    double h = 0;
    const Domain* domain = nullptr;
    std::vector<Cell> cells;
    int n_tri = 0;
    int n_box = 0;
    std::shared_ptr<const CellLocator> locator;

    int num_cells() const { return n_tri + n_box; }
};

// Equal-arclength knot parameters for one curve, round(length/h) of them,
// shifted half a spacing so none sits near the t = 2*pi wrap.  Requires
// h < length/4.
std::vector<double> place_knots(const Curve& c, double h);

// One curved triangle per consecutive knot pair: base tracking the curve,
// apex pushed distance h into the domain from the arc midpoint.  Throws if
// any cell comes out inverted (h too large for the local curvature).
std::vector<Cell> build_boundary_cells(const Domain& dom, int curve_index,
                                       const std::vector<double>& knots, double h);

// Full mesh: boundary bands, size-h boxes kept when farther than delta*h
// from every boundary cell, and a Delaunay-refined buffer filling the gap
// (min angle 20 degrees, edges at most 2h).
HybridMesh build_mesh(const Domain& dom, double h, double delta = 0.8);

struct TargetClassification {
    int self = -1;                // lowest-index cell containing the point
    std::vector<int> near_cells;  // cells within D*h, self excluded
};

// Locates a target against the mesh.  Throws if the point is in no cell or
// if the near set exceeds 30 cells.
TargetClassification classify_target(const HybridMesh& m, Vec2 r0, double D = 0.4);

struct MeshReport {
    double cell_area_sum = 0;
    double domain_area = 0;
    double area_defect = 0;    // |sum - domain| / domain
    double min_jacobian = 0;   // over all cells, curved ones sampled
    double min_angle_deg = 0;  // over straight triangles
    int n_tri = 0;
    int n_box = 0;
};

MeshReport mesh_validate(const HybridMesh& m);

// Signed area enclosed by the outer curve minus the holes, by adaptive
// quadrature of the boundary integral.
double domain_area(const Domain& dom);

// Text round-trip: header "h N_t N_b", then one record per cell in mesh
// order ("T x0 y0 x1 y1 x2 y2", "C curve_id k_lo k_hi apex_x apex_y",
// "B cx cy").
void write_mesh(const HybridMesh& m, const std::string& path);
HybridMesh read_mesh(const Domain& dom, const std::string& path);

}  // namespace volpot
