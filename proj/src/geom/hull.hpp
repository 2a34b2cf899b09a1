#pragma once

#include "berwald/geometry.hpp"

#include <optional>
#include <vector>

namespace berwald::detail {

// Simplicial boundary of the convex hull of a point cloud.
struct RawHull {
    std::vector<Vec> points;
    std::vector<std::vector<int>> simplices;  // n point indices each
    std::vector<Vec> normals;                 // outward unit normals
    std::vector<double> offsets;
};

// eps is the absolute distance below which points count as coplanar.
std::optional<RawHull> raw_hull(const std::vector<Vec>& points, double eps);

// Vertices of the bounded region {a.x <= b}; duplicates merged within eps.
std::vector<Vec> enumerate_vertices(int dim, const std::vector<Halfspace>& hs, double eps);

}  // namespace berwald::detail
