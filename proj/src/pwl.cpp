#include "membrane/pwl.hpp"

#include "membrane/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <unordered_map>

namespace membrane {

ClosedPolyline::ClosedPolyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 3) throw ValidationError("closed polyline needs at least 3 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite())
      throw ValidationError("polyline point " + std::to_string(i) + " is not finite");
    if (points_[i] == points_[(i + 1) % points_.size()])
      throw ValidationError("polyline points " + std::to_string(i) + " and " +
                            std::to_string((i + 1) % points_.size()) + " coincide");
  }
}

LocalQuadratic fit_local_quadratic(const ClosedPolyline& curve, std::size_t i) {
  const std::size_t n = curve.size();
  if (i >= n) throw InvalidArgument("fit_local_quadratic: index out of range");
  Eigen::Matrix3d v;
  v << 1, -1, 1,
       0, 0, 1,
       1, 1, 1;
  Eigen::Matrix<double, 3, 2> rhs;
  rhs.row(0) = curve[(i + n - 1) % n].transpose();
  rhs.row(1) = curve[i].transpose();
  rhs.row(2) = curve[(i + 1) % n].transpose();
  const Eigen::Matrix<double, 3, 2> coef = v.partialPivLu().solve(rhs);
  return {coef.row(0).transpose(), coef.row(1).transpose(), coef.row(2).transpose()};
}

std::vector<Vec2> pwl_normals_2d(const ClosedPolyline& curve, Exec exec) {
  std::vector<Vec2> out(curve.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(curve.size()), [&](std::ptrdiff_t i) {
    const Vec2 tau = fit_local_quadratic(curve, static_cast<std::size_t>(i)).tangent(0.0);
    const double len = tau.norm();
    if (!(len > 1e-12))
      throw DegenerateJetError("zero tangent at polyline point " + std::to_string(i));
    out[i] = Vec2(-tau.y(), tau.x()) / len;
  });
  return out;
}

std::vector<Vec2> spring_force_2d(const ClosedPolyline& curve, double K0) {
  const std::size_t n = curve.size();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = K0 * (curve[(i + 1) % n] - 2.0 * curve[i] + curve[(i + n - 1) % n]);
  return out;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv)
        throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
    const Vec3 n = (vertices_[tri[1]] - vertices_[tri[0]]).cross(vertices_[tri[2]] - vertices_[tri[0]]);
    if (!(n.norm() > 0.0)) throw MeshError("triangle " + std::to_string(t) + " is degenerate");
    for (int k = 0; k < 3; ++k) {
      if (!directed.emplace(edge_key(tri[k], tri[(k + 1) % 3]), static_cast<int>(t)).second)
        throw MeshError("edge " + std::to_string(tri[k]) + "-" + std::to_string(tri[(k + 1) % 3]) +
                        " is used twice in the same direction");
    }
  }
  adjacency_.resize(vertices_.size());
  for (const auto& [key, t] : directed) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (!directed.contains(edge_key(b, a)))
      throw MeshError("mesh is not closed: edge " + std::to_string(a) + "-" + std::to_string(b) +
                      " has one triangle");
    adjacency_[a].push_back(b);
  }
  num_edges_ = directed.size() / 2;
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

namespace {

// Incremental 3D convex hull over points that are all extreme (directions on
// a sphere). Returns outward-oriented triangles.
std::vector<Triangle> convex_hull(std::span<const Vec3> p) {
  const int n = static_cast<int>(p.size());
  if (n < 4) throw MeshError("triangulation needs at least 4 points");

  // Initial tetrahedron from well-separated points.
  int i0 = 0, i1 = 0, i2 = -1, i3 = -1;
  double best = -1.0;
  for (int i = 1; i < n; ++i)
    if (double d = (p[i] - p[i0]).squaredNorm(); d > best) best = d, i1 = i;
  best = -1.0;
  for (int i = 0; i < n; ++i)
    if (double d = (p[i] - p[i0]).cross(p[i1] - p[i0]).squaredNorm(); d > best) best = d, i2 = i;
  const Vec3 base_n = (p[i1] - p[i0]).cross(p[i2] - p[i0]);
  best = -1.0;
  for (int i = 0; i < n; ++i)
    if (double d = std::abs(base_n.dot(p[i] - p[i0])); d > best) best = d, i3 = i;
  const double scale = std::max({(p[i1] - p[i0]).norm(), 1e-300});
  if (!(best > 1e-12 * scale * scale * scale)) throw MeshError("points are coplanar");

  struct Face {
    Triangle v;
    Vec3 normal;
    bool alive;
  };
  std::vector<Face> faces;
  std::unordered_map<std::uint64_t, int> edge_face;
  const Vec3 interior = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
  const double tol = 1e-12 * scale;

  auto add_face = [&](int a, int b, int c) {
    Vec3 nrm = (p[b] - p[a]).cross(p[c] - p[a]);
    if (nrm.dot(p[a] - interior) < 0) {
      std::swap(b, c);
      nrm = -nrm;
    }
    const double len = nrm.norm();
    if (!(len > 0.0)) throw MeshError("degenerate hull facet");
    const int id = static_cast<int>(faces.size());
    faces.push_back({{a, b, c}, nrm / len, true});
    for (int k = 0; k < 3; ++k) edge_face[edge_key(faces[id].v[k], faces[id].v[(k + 1) % 3])] = id;
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<int> visible;
  std::vector<std::pair<int, int>> horizon;
  for (int q = 0; q < n; ++q) {
    if (q == i0 || q == i1 || q == i2 || q == i3) continue;
    visible.clear();
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && faces[f].normal.dot(p[q] - p[faces[f].v[0]]) > tol) visible.push_back(f);
    if (visible.empty())
      throw MeshError("point " + std::to_string(q) + " is not extreme (coplanar or interior)");
    for (int f : visible) faces[f].alive = false;
    horizon.clear();
    for (int f : visible) {
      for (int k = 0; k < 3; ++k) {
        const int a = faces[f].v[k], b = faces[f].v[(k + 1) % 3];
        const auto it = edge_face.find(edge_key(b, a));
        if (it == edge_face.end()) throw MeshError("hull lost an edge");
        if (faces[it->second].alive) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible)
      for (int k = 0; k < 3; ++k) {
        const auto key = edge_key(faces[f].v[k], faces[f].v[(k + 1) % 3]);
        if (auto it = edge_face.find(key); it != edge_face.end() && it->second == f) edge_face.erase(it);
      }
    for (auto [a, b] : horizon) {
      const int id = static_cast<int>(faces.size());
      Vec3 nrm = (p[b] - p[a]).cross(p[q] - p[a]);
      const double len = nrm.norm();
      if (!(len > 0.0)) throw MeshError("degenerate hull facet at point " + std::to_string(q));
      faces.push_back({{a, b, q}, nrm / len, true});
      for (int k = 0; k < 3; ++k) edge_face[edge_key(faces[id].v[k], faces[id].v[(k + 1) % 3])] = id;
    }
  }

  std::vector<Triangle> out;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (const auto& f : faces)
    if (f.alive) {
      out.push_back(f.v);
      for (int v : f.v) used[v] = 1;
    }
  for (int i = 0; i < n; ++i)
    if (!used[i]) throw MeshError("point " + std::to_string(i) + " is not a hull vertex");
  return out;
}

}  // namespace

TriMesh triangulate_sphere_like(std::span<const Vec3> points, std::span<const Vec3> directions) {
  if (points.size() != directions.size())
    throw InvalidArgument("triangulate_sphere_like: points and directions differ in length");
  if (points.size() < 4) throw MeshError("triangulation needs at least 4 points");
  std::vector<Vec3> dirs(directions.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double len = directions[i].norm();
    if (!(len > 0.0) || !std::isfinite(len))
      throw MeshError("direction " + std::to_string(i) + " is zero or not finite");
    dirs[i] = directions[i] / len;
  }
  auto tris = convex_hull(dirs);

  Vec3 centroid = Vec3::Zero();
  for (const auto& x : points) centroid += x;
  centroid /= static_cast<double>(points.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    const Vec3 nrm = (points[tri[1]] - points[tri[0]]).cross(points[tri[2]] - points[tri[0]]);
    for (int k = 0; k < 3; ++k)
      if (!(nrm.dot(points[tri[k]] - centroid) > 0.0))
        throw MeshError("triangle " + std::to_string(t) +
                        " faces the centroid; points are not star-shaped about it");
  }
  return TriMesh(std::vector<Vec3>(points.begin(), points.end()), std::move(tris));
}

TriMesh triangulate_sphere_like(std::span<const Vec3> points) {
  if (points.size() < 4) throw MeshError("triangulation needs at least 4 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& x : points) centroid += x;
  centroid /= static_cast<double>(points.size());
  std::vector<Vec3> dirs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) dirs[i] = points[i] - centroid;
  return triangulate_sphere_like(points, dirs);
}

std::vector<Vec3> vertex_normals_angle_weighted(const TriMesh& mesh, Exec exec) {
  const auto verts = mesh.vertices();
  const auto tris = mesh.triangles();
  std::vector<std::vector<int>> incident(mesh.num_vertices());
  for (std::size_t t = 0; t < tris.size(); ++t)
    for (int v : tris[t]) incident[v].push_back(static_cast<int>(t));

  std::vector<Vec3> out(mesh.num_vertices());
  for_each_index(exec, static_cast<std::ptrdiff_t>(out.size()), [&](std::ptrdiff_t i) {
    if (incident[i].empty()) throw MeshError("vertex " + std::to_string(i) + " is isolated");
    Vec3 sum = Vec3::Zero();
    for (int t : incident[i]) {
      const auto& tri = tris[t];
      const int k = tri[0] == i ? 0 : tri[1] == i ? 1 : 2;
      const Vec3 u = verts[tri[(k + 1) % 3]] - verts[i];
      const Vec3 v = verts[tri[(k + 2) % 3]] - verts[i];
      const Vec3 nrm = u.cross(v);
      const double angle = std::atan2(nrm.norm(), u.dot(v));
      sum += angle * nrm.normalized();
    }
    out[i] = sum.normalized();
  });
  return out;
}

std::vector<Vec3> spring_force_3d(const TriMesh& mesh, double K0) {
  const auto verts = mesh.vertices();
  std::vector<Vec3> out(mesh.num_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Vec3 sum = Vec3::Zero();
    for (int j : mesh.neighbors(i)) sum += verts[i] - verts[j];
    out[i] = K0 * sum;
  }
  return out;
}

void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.num_edges()
      << '\n';
  char buf[96];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_off(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_off(mesh, out);
}

}  // namespace membrane
