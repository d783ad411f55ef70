#include "safem/domains.hpp"

#include "safem/mesh_io.hpp"

namespace safem {

Triangulation unit_square() {
  std::vector<Vertex> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<VertexId, 3>> t{{2, 0, 1}, {0, 2, 3}};
  return Triangulation::initial(make_forest(std::move(v), t, {true, true}, {}));
}

Triangulation l_shape() {
  //  5---6---7
  //  | \ | / |
  //  2---3---4     3 = origin (re-entrant corner)
  //  | / |
  //  0---1
  std::vector<Vertex> v{{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  std::vector<std::array<VertexId, 3>> t{
      {3, 0, 1}, {0, 3, 2},  // lower-left square, diagonal 3-0
      {3, 5, 2}, {5, 3, 6},  // upper-left square, diagonal 3-5
      {3, 7, 6}, {7, 3, 4},  // upper-right square, diagonal 3-7
  };
  return Triangulation::initial(make_forest(std::move(v), t, std::vector<bool>(6, true), {}));
}

Triangulation make_domain(const std::string& name) {
  if (name == "unit-square") return unit_square();
  if (name == "l-shape") return l_shape();
  return read_mesh(name);
}

}  // namespace safem
