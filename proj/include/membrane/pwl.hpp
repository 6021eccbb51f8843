#pragma once

#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace membrane {

/// Closed curve through IB points; the last point connects to the first.
class ClosedPolyline {
 public:
  explicit ClosedPolyline(std::vector<Vec2> points);

  std::span<const Vec2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Vec2> points_;
};

/// x(s) = a s² + b s + c per coordinate, fitted at s ∈ {−1, 0, 1}.
struct LocalQuadratic {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  Vec2 c = Vec2::Zero();

  Vec2 position(double s) const { return (a * s + b) * s + c; }
  Vec2 tangent(double s) const { return 2.0 * a * s + b; }
};

LocalQuadratic fit_local_quadratic(const ClosedPolyline& curve, std::size_t i);

/// η̂ = (−τ̂_y, τ̂_x) with τ̂ from the local quadratic at each point.
std::vector<Vec2> pwl_normals_2d(const ClosedPolyline& curve, Exec exec = Exec::parallel);

/// F_i = K0 (x_{i+1} − 2 x_i + x_{i−1}), cyclic.
std::vector<Vec2> spring_force_2d(const ClosedPolyline& curve, double K0);

using Triangle = std::array<int, 3>;

/// Closed, consistently oriented triangle mesh. Construction checks that
/// every triangle has positive area and every edge is shared by exactly two
/// triangles traversing it in opposite directions.
class TriMesh {
 public:
  TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  std::span<const Vec3> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  // Sorted neighbor indices of vertex i.
  std::span<const int> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::size_t num_triangles() const { return triangles_.size(); }
  int euler_characteristic() const {
    return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) +
           static_cast<int>(num_triangles());
  }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<std::vector<int>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// Triangulates points that are star-shaped about their centroid using the
/// convex hull of the directions from the centroid. Facets are oriented so
/// their normals point away from the centroid.
TriMesh triangulate_sphere_like(std::span<const Vec3> points);

/// Same, with the hull built from caller-supplied directions (for instance
/// the unit vectors of the parameter sites the points were sampled at).
TriMesh triangulate_sphere_like(std::span<const Vec3> points, std::span<const Vec3> directions);

/// normalize(Σ_t angle_t(i) n̂_t) over the triangles t incident to vertex i.
std::vector<Vec3> vertex_normals_angle_weighted(const TriMesh& mesh, Exec exec = Exec::parallel);

/// F_i = K0 Σ_{j ∈ adj(i)} (x_i − x_j). Opposite in sign to spring_force_2d.
std::vector<Vec3> spring_force_3d(const TriMesh& mesh, double K0);

void write_off(const TriMesh& mesh, std::ostream& out);
void write_off(const TriMesh& mesh, const std::filesystem::path& path);

}  // namespace membrane
