#pragma once

#include <utility>
#include <vector>

#include "volpot/geometry.hpp"

namespace volpot {

// Conforming straight triangulation of the region enclosed by a set of
// non-crossing segments (even-odd rule), refined until every triangle in
// the region has minimum angle >= min_angle_deg and diameter <= max_edge.
// Segments index into points and must form closed curves; points on the
// region boundary appear as triangle vertices exactly (splits land on the
// segments themselves).  Throws std::runtime_error if refinement would
// exceed vertex_cap vertices.
std::vector<Cell> triangulate_region(const std::vector<Vec2>& points,
                                     const std::vector<std::pair<int, int>>& segments,
                                     double min_angle_deg, double max_edge,
                                     int vertex_cap = 400000);

}  // namespace volpot
