#include "safem/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace safem {

namespace {

std::vector<std::pair<VertexId, VertexId>> topological_boundary(
    const std::vector<TaggedTriangle>& tris) {
  std::map<std::pair<VertexId, VertexId>, int> count;
  for (const auto& t : tris) {
    for (int i = 0; i < 3; ++i) {
      VertexId a = t.v[i], b = t.v[(i + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<std::pair<VertexId, VertexId>> out;
  for (const auto& [e, n] : count) {
    if (n > 2) throw std::runtime_error("mesh: edge shared by more than two triangles");
    if (n == 1) out.push_back(e);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string expect_header(std::istream& in, const char* keyword, std::size_t& count) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word >> count;
    if (word != keyword || ls.fail()) {
      throw std::runtime_error(std::string("mesh: expected header '") + keyword + " <count>', got '" +
                               line + "'");
    }
    return word;
  }
  throw std::runtime_error(std::string("mesh: missing header '") + keyword + "'");
}

}  // namespace

std::shared_ptr<BisectionForest> make_forest(std::vector<Vertex> vertices,
                                             const std::vector<std::array<VertexId, 3>>& triangles,
                                             const std::vector<bool>& keep_tag,
                                             std::vector<std::pair<VertexId, VertexId>> boundary) {
  std::vector<TaggedTriangle> roots;
  roots.reserve(triangles.size());
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    auto v = triangles[i];
    for (VertexId id : v) {
      if (id < 0 || static_cast<std::size_t>(id) >= vertices.size()) {
        throw std::runtime_error("mesh: vertex index out of range");
      }
    }
    if (i < keep_tag.size() && keep_tag[i]) {
      const auto& p = vertices[static_cast<std::size_t>(v[0])];
      const auto& q = vertices[static_cast<std::size_t>(v[1])];
      const auto& r = vertices[static_cast<std::size_t>(v[2])];
      const double a = signed_area(p, q, r);
      if (!(std::abs(a) > 0.0)) throw std::runtime_error("mesh: degenerate triangle");
      // Swapping v0 and v1 flips the orientation and keeps the refinement edge.
      if (a < 0.0) std::swap(v[0], v[1]);
      roots.push_back(TaggedTriangle{v, 0});
    } else {
      roots.push_back(tag_longest_edge(v, vertices));
    }
  }
  auto topo = topological_boundary(roots);
  if (boundary.empty()) {
    boundary = std::move(topo);
  } else {
    for (auto& [a, b] : boundary) {
      if (a > b) std::swap(a, b);
    }
    std::sort(boundary.begin(), boundary.end());
    boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
    if (boundary != topo) throw std::runtime_error("mesh: boundary list does not match the triangles");
  }
  return std::make_shared<BisectionForest>(std::move(vertices), std::move(roots), boundary);
}

void write_mesh(std::ostream& out, const Triangulation& T) {
  const BisectionForest& forest = T.forest();
  std::vector<VertexId> used;
  used.reserve(3 * T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    for (VertexId v : T.triangle(i).v) used.push_back(v);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  auto local = [&](VertexId g) {
    return std::lower_bound(used.begin(), used.end(), g) - used.begin();
  };

  out << "vertices " << used.size() << '\n';
  for (VertexId g : used) {
    const Vertex& p = forest.vertex(g);
    out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
  }
  out << "triangles " << T.size() << '\n';
  std::map<std::pair<long, long>, int> count;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const auto& v = T.triangle(i).v;
    out << local(v[0]) << ' ' << local(v[1]) << ' ' << local(v[2]) << " 1\n";
    for (int k = 0; k < 3; ++k) {
      long a = local(v[k]), b = local(v[(k + 1) % 3]);
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<std::pair<long, long>> boundary;
  for (const auto& [e, n] : count) {
    if (n == 1) boundary.push_back(e);
  }
  out << "boundary " << boundary.size() << '\n';
  for (const auto& [a, b] : boundary) out << a << ' ' << b << '\n';
}

void write_mesh(const std::string& path, const Triangulation& T) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(out, T);
}

Triangulation read_mesh(std::istream& in) {
  std::size_t n = 0;
  expect_header(in, "vertices", n);
  std::vector<Vertex> vertices(n);
  for (auto& v : vertices) {
    std::string xs, ys;
    if (!(in >> xs >> ys)) throw std::runtime_error("mesh: truncated vertex list");
    try {
      v.x = std::stod(xs);
      v.y = std::stod(ys);
    } catch (const std::exception&) {
      throw std::runtime_error("mesh: bad coordinate '" + xs + " " + ys + "'");
    }
  }
  expect_header(in, "triangles", n);
  std::vector<std::array<VertexId, 3>> tris(n);
  std::vector<bool> keep(n);
  for (std::size_t i = 0; i < n; ++i) {
    int flag = 0;
    if (!(in >> tris[i][0] >> tris[i][1] >> tris[i][2] >> flag)) {
      throw std::runtime_error("mesh: truncated triangle list");
    }
    keep[i] = flag != 0;
  }
  std::vector<std::pair<VertexId, VertexId>> boundary;
  std::size_t nb = 0;
  std::string rest;
  std::getline(in, rest);
  if (in.peek() != std::char_traits<char>::eof()) {
    expect_header(in, "boundary", nb);
    boundary.resize(nb);
    for (auto& [a, b] : boundary) {
      if (!(in >> a >> b)) throw std::runtime_error("mesh: truncated boundary list");
    }
  }
  return Triangulation::initial(make_forest(std::move(vertices), tris, keep, std::move(boundary)));
}

Triangulation read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

}  // namespace safem
