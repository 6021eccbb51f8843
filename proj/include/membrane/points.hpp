#pragma once

#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace membrane {

/// Interpolation or evaluation angles λ on the unit circle.
/// Angles lie in (−π, π] and are strictly increasing.
class NodeSet2D {
 public:
  explicit NodeSet2D(std::vector<double> angles);

  std::span<const double> angles() const { return angles_; }
  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }

  // True only for sets built by equispaced_circle(); enables the FFT paths.
  bool is_equispaced() const { return equispaced_; }

  friend bool operator==(const NodeSet2D&, const NodeSet2D&) = default;

 private:
  friend NodeSet2D equispaced_circle(int n);
  std::vector<double> angles_;
  bool equispaced_ = false;
};

/// λ_k = −π + 2πk/n for k = 1..n. Requires n even and n ≥ 4.
NodeSet2D equispaced_circle(int n);

/// Longitude λ ∈ (−π, π], latitude θ ∈ [−π/2, π/2].
struct SphericalPoint {
  double lambda = 0.0;
  double theta = 0.0;
  friend bool operator==(const SphericalPoint&, const SphericalPoint&) = default;
};

Vec3 to_unit_vector(SphericalPoint p);
/// Inverse of to_unit_vector; λ = −π is folded onto π.
SphericalPoint from_unit_vector(const Vec3& u);

enum class NodeKind { minimal_energy, maximal_determinant, fibonacci, loaded };

std::string_view to_string(NodeKind kind);

/// Points on the unit sphere in spherical coordinates. Construction rejects
/// out-of-range angles and coincident points.
class NodeSet3D {
 public:
  NodeSet3D(std::vector<SphericalPoint> points, NodeKind kind);

  std::span<const SphericalPoint> points() const { return points_; }
  const SphericalPoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  NodeKind kind() const { return kind_; }

  // 3 × n matrix of unit vectors, one column per point.
  const Eigen::Matrix3Xd& unit_vectors() const { return unit_; }

  friend bool operator==(const NodeSet3D& a, const NodeSet3D& b) {
    return a.kind_ == b.kind_ && a.points_ == b.points_;
  }

 private:
  std::vector<SphericalPoint> points_;
  NodeKind kind_;
  Eigen::Matrix3Xd unit_;
};

double min_chordal_distance(const NodeSet3D& set);

/// Riesz s = 1 energy Σ_{i<j} 1/|p_i − p_j| of unit vectors.
double riesz_energy(const Eigen::Matrix3Xd& points, Exec exec = Exec::parallel);

/// Energy and the tangential component of its gradient at every point.
/// Each row is accumulated independently so both Exec branches agree bitwise.
double riesz_energy_and_gradient(const Eigen::Matrix3Xd& points, Eigen::Matrix3Xd& gradient,
                                 Exec exec = Exec::parallel);

struct MinimalEnergyResult {
  NodeSet3D nodes;
  double energy = 0.0;
  double gradient_norm = 0.0;  // max tangential gradient norm at exit
  int iterations = 0;
  bool converged = false;      // false is a warning; nodes are still usable
};

/// Projected gradient descent on the Riesz s = 1 energy from a seeded random
/// start. Barzilai–Borwein trial steps, Armijo backtracking. Deterministic
/// for a fixed (n, seed, max_iters, tol).
MinimalEnergyResult minimal_energy_sphere(int n, std::uint64_t seed, int max_iters = 4000,
                                          double tol = 1e-6, Exec exec = Exec::parallel);

/// Generalized spiral points; fast fallback when no optimized set exists.
NodeSet3D fibonacci_sphere(int n);

enum class PointFormat { angles, unit_vectors };

/// One point per line, whitespace separated, no header. On load '#' starts a
/// comment line.
void save_point_set(const NodeSet3D& set, const std::filesystem::path& path, PointFormat format);
NodeSet3D load_point_set(const std::filesystem::path& path, PointFormat format,
                         NodeKind kind = NodeKind::loaded);

/// MEMBRANE_CACHE_DIR if set, otherwise ".membrane_cache".
std::filesystem::path default_cache_dir();

/// File name used for cached minimal-energy sets: "me_<n>_<seed>.txt".
std::string minimal_energy_file_name(int n, std::uint64_t seed);

/// Loads me_<n>_<seed>.txt from `cache_dir`, generating and saving it first
/// when absent.
NodeSet3D cached_minimal_energy(int n, std::uint64_t seed, const std::filesystem::path& cache_dir);

}  // namespace membrane
