#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "safem/mesh.hpp"

namespace safem {

// Line-oriented text format:
//
//   vertices N
//   x y                      (N lines, 17 significant digits)
//   triangles M
//   v0 v1 v2 refedge_flag    (M lines)
//   boundary K
//   va vb                    (K lines)
//
// refedge_flag = 1 means (v0, v1) is the refinement edge as written; 0 asks
// the reader to tag the longest edge instead.

/// Builds a forest from raw root data: flagged triangles keep (v0, v1) as the
/// refinement edge, unflagged ones are tagged by the longest-edge rule. An
/// empty boundary list is replaced by the topological boundary; a non-empty
/// one must match it.
std::shared_ptr<BisectionForest> make_forest(std::vector<Vertex> vertices,
                                             const std::vector<std::array<VertexId, 3>>& triangles,
                                             const std::vector<bool>& keep_tag,
                                             std::vector<std::pair<VertexId, VertexId>> boundary);

void write_mesh(std::ostream& out, const Triangulation& T);
void write_mesh(const std::string& path, const Triangulation& T);

/// Reads a mesh and returns it as the root mesh of a fresh forest.
/// Throws std::runtime_error on malformed input.
Triangulation read_mesh(std::istream& in);
Triangulation read_mesh(const std::string& path);

}  // namespace safem
