#pragma once

// Newest-vertex-bisection meshes in 2D.
//
// All triangulations of one experiment share a single BisectionForest. The
// forest only grows: bisecting a node appends two children and never removes
// anything, so node identifiers stay valid for the lifetime of the forest and
// a Triangulation is nothing more than a sorted set of leaf node ids.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace safem {

using VertexId = std::int32_t;
using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct Vertex {
  double x = 0.0;
  double y = 0.0;
};

/// Three vertex indices. The refinement edge is (v[0], v[1]); v[2] is the
/// newest vertex. Vertices are stored counter-clockwise.
struct TaggedTriangle {
  std::array<VertexId, 3> v{};
  int generation = 0;
};

using EdgeKey = std::uint64_t;

inline EdgeKey edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<EdgeKey>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double signed_area(const Vertex& a, const Vertex& b, const Vertex& c);

/// Splits t at the midpoint vertex `midpoint` of its refinement edge.
/// Children are (v2, v0, m) and (v1, v2, m): each child's refinement edge is
/// the parent edge it inherits, opposite the new vertex m.
/// Throws std::invalid_argument if t is degenerate in `vertices`.
std::pair<TaggedTriangle, TaggedTriangle> bisect(const TaggedTriangle& t, VertexId midpoint,
                                                 std::span<const Vertex> vertices);

/// Retags a triangle so that its longest edge becomes the refinement edge
/// (ties broken by the lexicographically smallest vertex-index pair) and the
/// vertices are counter-clockwise. Throws on collinear input.
TaggedTriangle tag_longest_edge(std::array<VertexId, 3> v, std::span<const Vertex> vertices);

class BisectionForest {
 public:
  struct Node {
    TaggedTriangle tri;
    NodeId parent = kNoNode;
    std::array<NodeId, 2> children{kNoNode, kNoNode};
  };

  /// Roots must already be tagged and counter-clockwise. `boundary` lists the
  /// domain boundary edges of the root mesh.
  BisectionForest(std::vector<Vertex> vertices, std::vector<TaggedTriangle> roots,
                  std::span<const std::pair<VertexId, VertexId>> boundary);

  std::size_t num_roots() const { return num_roots_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const TaggedTriangle& triangle(NodeId id) const { return node(id).tri; }
  bool has_children(NodeId id) const { return node(id).children[0] != kNoNode; }

  std::span<const Vertex> vertices() const { return vertices_; }
  const Vertex& vertex(VertexId id) const { return vertices_[static_cast<std::size_t>(id)]; }

  double area(NodeId id) const;
  /// Root ancestor of a node.
  NodeId root_of(NodeId id) const;

  /// Returns the two children of `id`, creating them on first use.
  std::array<NodeId, 2> bisect(NodeId id);

  std::optional<VertexId> find_midpoint(VertexId a, VertexId b) const;
  bool is_boundary_edge(VertexId a, VertexId b) const;

 private:
  VertexId midpoint(VertexId a, VertexId b);

  std::vector<Vertex> vertices_;
  std::vector<Node> nodes_;
  std::size_t num_roots_ = 0;
  std::unordered_map<EdgeKey, VertexId> midpoints_;
  std::unordered_set<EdgeKey> boundary_;
};

/// A set of forest leaves covering the domain. Cheap to copy; copies share
/// the forest.
class Triangulation {
 public:
  Triangulation() = default;
  Triangulation(std::shared_ptr<BisectionForest> forest, std::vector<NodeId> leaves);

  /// The root mesh T0 of a forest.
  static Triangulation initial(std::shared_ptr<BisectionForest> forest);

  std::size_t size() const { return leaves_.size(); }
  std::span<const NodeId> leaves() const { return leaves_; }
  NodeId leaf(std::size_t i) const { return leaves_[i]; }
  const TaggedTriangle& triangle(std::size_t i) const { return forest_->triangle(leaves_[i]); }
  double area(std::size_t i) const { return forest_->area(leaves_[i]); }

  const BisectionForest& forest() const { return *forest_; }
  BisectionForest& forest_mut() const { return *forest_; }
  const std::shared_ptr<BisectionForest>& forest_ptr() const { return forest_; }

  /// Position of each leaf indexed by node id, kNoNode for nodes not in the set.
  std::vector<NodeId> leaf_index() const;

  friend bool operator==(const Triangulation& a, const Triangulation& b) {
    return a.forest_ == b.forest_ && a.leaves_ == b.leaves_;
  }

 private:
  std::shared_ptr<BisectionForest> forest_;
  std::vector<NodeId> leaves_;
};

/// Bisects every element of `marked` (indices into T.leaves()) once and closes
/// the result under newest-vertex-bisection completion.
Triangulation refine(const Triangulation& T, std::span<const std::size_t> marked);

/// Bisects every element once, then completes.
Triangulation uniform_refine(const Triangulation& T);

/// Closes an arbitrary (possibly non-conforming) leaf set of the forest under
/// completion: leaves carrying a hanging node are bisected until none remain.
Triangulation complete(std::shared_ptr<BisectionForest> forest, std::vector<NodeId> leaves);

/// Smallest common refinement of two triangulations over the same forest.
/// Throws std::invalid_argument when the forests differ.
Triangulation overlay(const Triangulation& a, const Triangulation& b);

/// True when every leaf of `fine` lies inside some leaf of `coarse`.
bool is_refinement_of(const Triangulation& fine, const Triangulation& coarse);

/// For every leaf of `fine`, the index of the leaf of `coarse` containing it.
/// Throws std::invalid_argument if `fine` does not refine `coarse`.
std::vector<std::size_t> coarse_parent_map(const Triangulation& fine, const Triangulation& coarse);

bool is_conforming(const Triangulation& T);
double min_angle(const Triangulation& T);
double total_area(const Triangulation& T);

}  // namespace safem
