#pragma once

#include <string>

#include "safem/mesh.hpp"

namespace safem {

/// (0,1)^2 split along the diagonal (0,0)-(1,1) into two right isosceles
/// triangles whose shared hypotenuse is the refinement edge.
Triangulation unit_square();

/// (-1,1)^2 \ [0,1]x[-1,0] as three unit squares, each split along the
/// diagonal through the re-entrant corner at the origin. Six triangles; every
/// refinement edge touches the origin.
Triangulation l_shape();

/// "unit-square", "l-shape", or a path to a mesh file.
Triangulation make_domain(const std::string& name);

}  // namespace safem
