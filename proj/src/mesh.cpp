#include "safem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace safem {

double signed_area(const Vertex& a, const Vertex& b, const Vertex& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

namespace {

double area_of(const TaggedTriangle& t, std::span<const Vertex> vs) {
  return signed_area(vs[static_cast<std::size_t>(t.v[0])], vs[static_cast<std::size_t>(t.v[1])],
                     vs[static_cast<std::size_t>(t.v[2])]);
}

double length2(const Vertex& a, const Vertex& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  return dx * dx + dy * dy;
}

}  // namespace

std::pair<TaggedTriangle, TaggedTriangle> bisect(const TaggedTriangle& t, VertexId midpoint,
                                                 std::span<const Vertex> vertices) {
  if (!(std::abs(area_of(t, vertices)) > 0.0)) {
    throw std::invalid_argument("bisect: degenerate triangle");
  }
  const auto [a, b, c] = t.v;
  TaggedTriangle left{{c, a, midpoint}, t.generation + 1};
  TaggedTriangle right{{b, c, midpoint}, t.generation + 1};
  return {left, right};
}

TaggedTriangle tag_longest_edge(std::array<VertexId, 3> v, std::span<const Vertex> vertices) {
  auto at = [&](VertexId i) -> const Vertex& { return vertices[static_cast<std::size_t>(i)]; };
  const double a = signed_area(at(v[0]), at(v[1]), at(v[2]));
  if (!(std::abs(a) > 0.0)) throw std::invalid_argument("tag_longest_edge: collinear vertices");
  if (a < 0.0) std::swap(v[1], v[2]);
  // Edge i runs from v[i] to v[i+1]; rotating by i makes it (v[0], v[1]).
  int best = 0;
  double best_len = -1.0;
  std::pair<VertexId, VertexId> best_pair{};
  for (int i = 0; i < 3; ++i) {
    const VertexId p = v[static_cast<std::size_t>(i)];
    const VertexId q = v[static_cast<std::size_t>((i + 1) % 3)];
    const double len = length2(at(p), at(q));
    const std::pair<VertexId, VertexId> pair{std::min(p, q), std::max(p, q)};
    if (len > best_len || (len == best_len && pair < best_pair)) {
      best = i;
      best_len = len;
      best_pair = pair;
    }
  }
  std::rotate(v.begin(), v.begin() + best, v.end());
  return TaggedTriangle{v, 0};
}

// ---------------------------------------------------------------------------
// BisectionForest

BisectionForest::BisectionForest(std::vector<Vertex> vertices, std::vector<TaggedTriangle> roots,
                                 std::span<const std::pair<VertexId, VertexId>> boundary)
    : vertices_(std::move(vertices)), num_roots_(roots.size()) {
  if (roots.empty()) throw std::invalid_argument("BisectionForest: empty root mesh");
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw std::invalid_argument("BisectionForest: non-finite vertex coordinate");
    }
  }
  nodes_.reserve(roots.size());
  for (const auto& t : roots) {
    for (VertexId id : t.v) {
      if (id < 0 || static_cast<std::size_t>(id) >= vertices_.size()) {
        throw std::invalid_argument("BisectionForest: vertex index out of range");
      }
    }
    if (!(area_of(t, vertices_) > 0.0)) {
      throw std::invalid_argument("BisectionForest: root triangle not counter-clockwise");
    }
    nodes_.push_back(Node{TaggedTriangle{t.v, 0}, kNoNode, {kNoNode, kNoNode}});
  }
  for (const auto& [a, b] : boundary) boundary_.insert(edge_key(a, b));
}

double BisectionForest::area(NodeId id) const { return area_of(triangle(id), vertices_); }

NodeId BisectionForest::root_of(NodeId id) const {
  while (node(id).parent != kNoNode) id = node(id).parent;
  return id;
}

std::optional<VertexId> BisectionForest::find_midpoint(VertexId a, VertexId b) const {
  const auto it = midpoints_.find(edge_key(a, b));
  if (it == midpoints_.end()) return std::nullopt;
  return it->second;
}

bool BisectionForest::is_boundary_edge(VertexId a, VertexId b) const {
  return boundary_.contains(edge_key(a, b));
}

VertexId BisectionForest::midpoint(VertexId a, VertexId b) {
  const EdgeKey key = edge_key(a, b);
  if (const auto it = midpoints_.find(key); it != midpoints_.end()) return it->second;
  const Vertex& p = vertex(a);
  const Vertex& q = vertex(b);
  const auto m = static_cast<VertexId>(vertices_.size());
  vertices_.push_back(Vertex{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
  midpoints_.emplace(key, m);
  if (boundary_.contains(key)) {
    boundary_.insert(edge_key(a, m));
    boundary_.insert(edge_key(m, b));
  }
  return m;
}

std::array<NodeId, 2> BisectionForest::bisect(NodeId id) {
  if (has_children(id)) return node(id).children;
  const TaggedTriangle t = triangle(id);
  const VertexId m = midpoint(t.v[0], t.v[1]);
  const auto [left, right] = safem::bisect(t, m, vertices_);
  const auto l = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{left, id, {kNoNode, kNoNode}});
  nodes_.push_back(Node{right, id, {kNoNode, kNoNode}});
  nodes_[static_cast<std::size_t>(id)].children = {l, l + 1};
  return {l, l + 1};
}

// ---------------------------------------------------------------------------
// Triangulation

Triangulation::Triangulation(std::shared_ptr<BisectionForest> forest, std::vector<NodeId> leaves)
    : forest_(std::move(forest)), leaves_(std::move(leaves)) {
  std::sort(leaves_.begin(), leaves_.end());
  leaves_.erase(std::unique(leaves_.begin(), leaves_.end()), leaves_.end());
}

Triangulation Triangulation::initial(std::shared_ptr<BisectionForest> forest) {
  std::vector<NodeId> roots(forest->num_roots());
  for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = static_cast<NodeId>(i);
  return Triangulation(std::move(forest), std::move(roots));
}

std::vector<NodeId> Triangulation::leaf_index() const {
  std::vector<NodeId> index(forest_->num_nodes(), kNoNode);
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    index[static_cast<std::size_t>(leaves_[i])] = static_cast<NodeId>(i);
  }
  return index;
}

// ---------------------------------------------------------------------------
// Completion

namespace {

// Mutable leaf set with edge ownership, used to detect hanging nodes while
// bisecting.
class LeafSetEditor {
 public:
  explicit LeafSetEditor(BisectionForest& forest) : forest_(forest) {}

  void insert(NodeId id) {
    grow();
    in_set_[static_cast<std::size_t>(id)] = 1;
    order_.push_back(id);
    const auto& v = forest_.triangle(id).v;
    for (int i = 0; i < 3; ++i) add_owner(edge_key(v[i], v[(i + 1) % 3]), id);
  }

  void erase(NodeId id) {
    in_set_[static_cast<std::size_t>(id)] = 0;
    const auto& v = forest_.triangle(id).v;
    for (int i = 0; i < 3; ++i) remove_owner(edge_key(v[i], v[(i + 1) % 3]), id);
  }

  void reserve(std::size_t n) {
    owners_.reserve(2 * n);
    order_.reserve(2 * n);
  }

  bool contains(NodeId id) const {
    return static_cast<std::size_t>(id) < in_set_.size() && in_set_[static_cast<std::size_t>(id)];
  }

  /// Replaces a leaf by its children. Returns the neighbour across the
  /// refinement edge (kNoNode on the boundary) which now has a hanging node.
  NodeId split(NodeId id, std::vector<NodeId>& work) {
    const auto& v = forest_.triangle(id).v;
    const NodeId neighbour = other_owner(edge_key(v[0], v[1]), id);
    erase(id);
    const auto kids = forest_.bisect(id);
    insert(kids[0]);
    insert(kids[1]);
    work.push_back(kids[0]);
    work.push_back(kids[1]);
    if (neighbour != kNoNode) work.push_back(neighbour);
    return neighbour;
  }

  bool has_hanging_node(NodeId id) const {
    const auto& v = forest_.triangle(id).v;
    for (int i = 0; i < 3; ++i) {
      const VertexId a = v[i], b = v[(i + 1) % 3];
      const auto m = forest_.find_midpoint(a, b);
      if (m && (owners_.contains(edge_key(a, *m)) || owners_.contains(edge_key(*m, b)))) {
        return true;
      }
    }
    return false;
  }

  void close(std::vector<NodeId>& work) {
    while (!work.empty()) {
      const NodeId id = work.back();
      work.pop_back();
      if (contains(id) && has_hanging_node(id)) split(id, work);
    }
  }

  std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    out.reserve(order_.size());
    for (NodeId id : order_) {
      if (contains(id)) out.push_back(id);
    }
    return out;
  }

 private:
  void grow() {
    if (in_set_.size() < forest_.num_nodes()) in_set_.resize(forest_.num_nodes() + 1024, 0);
  }

  void add_owner(EdgeKey key, NodeId id) {
    auto [it, inserted] = owners_.try_emplace(key, std::array<NodeId, 2>{id, kNoNode});
    if (!inserted) {
      if (it->second[1] != kNoNode) throw std::logic_error("edge shared by more than two leaves");
      it->second[1] = id;
    }
  }

  void remove_owner(EdgeKey key, NodeId id) {
    auto it = owners_.find(key);
    if (it == owners_.end()) return;
    auto& o = it->second;
    if (o[0] == id) {
      o[0] = o[1];
      o[1] = kNoNode;
    } else if (o[1] == id) {
      o[1] = kNoNode;
    }
    if (o[0] == kNoNode) owners_.erase(it);
  }

  NodeId other_owner(EdgeKey key, NodeId id) const {
    const auto it = owners_.find(key);
    if (it == owners_.end()) return kNoNode;
    return it->second[0] == id ? it->second[1] : it->second[0];
  }

  BisectionForest& forest_;
  std::vector<char> in_set_;
  std::vector<NodeId> order_;
  std::unordered_map<EdgeKey, std::array<NodeId, 2>> owners_;
};

}  // namespace

Triangulation refine(const Triangulation& T, std::span<const std::size_t> marked) {
  if (marked.empty()) return T;
  BisectionForest& forest = T.forest_mut();
  LeafSetEditor editor(forest);
  editor.reserve(T.size());
  for (NodeId id : T.leaves()) editor.insert(id);
  std::vector<NodeId> work;
  for (std::size_t k : marked) {
    if (k >= T.size()) throw std::out_of_range("refine: marked index out of range");
    const NodeId id = T.leaf(k);
    if (editor.contains(id)) editor.split(id, work);
  }
  editor.close(work);
  return Triangulation(T.forest_ptr(), editor.leaves());
}

Triangulation uniform_refine(const Triangulation& T) {
  std::vector<std::size_t> all(T.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return refine(T, all);
}

Triangulation complete(std::shared_ptr<BisectionForest> forest, std::vector<NodeId> leaves) {
  LeafSetEditor editor(*forest);
  for (NodeId id : leaves) editor.insert(id);
  std::vector<NodeId> work(leaves.rbegin(), leaves.rend());
  editor.close(work);
  return Triangulation(std::move(forest), editor.leaves());
}

Triangulation overlay(const Triangulation& a, const Triangulation& b) {
  if (a.forest_ptr() != b.forest_ptr()) {
    throw std::invalid_argument("overlay: triangulations do not share a root mesh");
  }
  const BisectionForest& forest = a.forest();
  std::vector<char> in_tree(forest.num_nodes(), 0);
  auto mark_path = [&](NodeId id) {
    while (id != kNoNode && !in_tree[static_cast<std::size_t>(id)]) {
      in_tree[static_cast<std::size_t>(id)] = 1;
      id = forest.node(id).parent;
    }
  };
  for (NodeId id : a.leaves()) mark_path(id);
  for (NodeId id : b.leaves()) mark_path(id);
  std::vector<NodeId> leaves;
  for (std::size_t id = 0; id < in_tree.size(); ++id) {
    if (!in_tree[id]) continue;
    const NodeId child = forest.node(static_cast<NodeId>(id)).children[0];
    if (child == kNoNode || !in_tree[static_cast<std::size_t>(child)]) {
      leaves.push_back(static_cast<NodeId>(id));
    }
  }
  // The union of two conforming NVB meshes is conforming; completion is a
  // no-op here and only guards against non-conforming inputs.
  return complete(a.forest_ptr(), std::move(leaves));
}

std::vector<std::size_t> coarse_parent_map(const Triangulation& fine, const Triangulation& coarse) {
  if (fine.forest_ptr() != coarse.forest_ptr()) {
    throw std::invalid_argument("coarse_parent_map: triangulations do not share a root mesh");
  }
  const auto index = coarse.leaf_index();
  const BisectionForest& forest = fine.forest();
  std::vector<std::size_t> map(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    NodeId id = fine.leaf(i);
    while (id != kNoNode &&
           (static_cast<std::size_t>(id) >= index.size() || index[static_cast<std::size_t>(id)] == kNoNode)) {
      id = forest.node(id).parent;
    }
    if (id == kNoNode) throw std::invalid_argument("coarse_parent_map: not a refinement");
    map[i] = static_cast<std::size_t>(index[static_cast<std::size_t>(id)]);
  }
  return map;
}

bool is_refinement_of(const Triangulation& fine, const Triangulation& coarse) {
  if (fine.forest_ptr() != coarse.forest_ptr()) return false;
  try {
    coarse_parent_map(fine, coarse);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

bool is_conforming(const Triangulation& T) {
  const BisectionForest& forest = T.forest();
  std::unordered_map<EdgeKey, int> count;
  count.reserve(3 * T.size());
  for (NodeId id : T.leaves()) {
    const auto& v = forest.triangle(id).v;
    for (int i = 0; i < 3; ++i) ++count[edge_key(v[i], v[(i + 1) % 3])];
  }
  for (const auto& [key, n] : count) {
    if (n == 2) continue;
    if (n > 2) return false;
    const auto a = static_cast<VertexId>(key >> 32);
    const auto b = static_cast<VertexId>(key & 0xffffffffu);
    if (!forest.is_boundary_edge(a, b)) return false;
  }
  return true;
}

double min_angle(const Triangulation& T) {
  const BisectionForest& forest = T.forest();
  double result = std::numbers::pi;
  for (NodeId id : T.leaves()) {
    const auto& v = forest.triangle(id).v;
    for (int i = 0; i < 3; ++i) {
      const Vertex& p = forest.vertex(v[i]);
      const Vertex& q = forest.vertex(v[(i + 1) % 3]);
      const Vertex& r = forest.vertex(v[(i + 2) % 3]);
      const double ux = q.x - p.x, uy = q.y - p.y, wx = r.x - p.x, wy = r.y - p.y;
      const double angle = std::atan2(std::abs(ux * wy - uy * wx), ux * wx + uy * wy);
      result = std::min(result, angle);
    }
  }
  return result;
}

double total_area(const Triangulation& T) {
  double sum = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) sum += T.area(i);
  return sum;
}

}  // namespace safem
