#include "membrane/errors.hpp"
#include "membrane/points.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace membrane;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("membrane_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Brute-force energy directly from the definition, independent of the kernel.
long double direct_energy(const Eigen::Matrix3Xd& p) {
  long double e = 0;
  for (Eigen::Index i = 0; i < p.cols(); ++i)
    for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
      long double d2 = 0;
      for (int k = 0; k < 3; ++k) {
        const long double d = static_cast<long double>(p(k, i)) - p(k, j);
        d2 += d * d;
      }
      e += 1.0L / std::sqrt(d2);
    }
  return e;
}

Eigen::Matrix3Xd tetrahedron() {
  Eigen::Matrix3Xd p(3, 4);
  p << 1, 1, -1, -1,
       1, -1, 1, -1,
       1, -1, -1, 1;
  return p / std::sqrt(3.0);
}

Eigen::Matrix3Xd octahedron() {
  Eigen::Matrix3Xd p(3, 6);
  p << 1, -1, 0, 0, 0, 0,
       0, 0, 1, -1, 0, 0,
       0, 0, 0, 0, 1, -1;
  return p;
}

NodeSet3D from_vectors(const Eigen::Matrix3Xd& p, NodeKind kind = NodeKind::loaded) {
  std::vector<SphericalPoint> pts;
  for (Eigen::Index i = 0; i < p.cols(); ++i) pts.push_back(from_unit_vector(p.col(i)));
  return NodeSet3D(pts, kind);
}

}  // namespace

TEST(EquispacedCircle, FourNodes) {
  const auto s = equispaced_circle(4);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0], -kPi / 2);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[2], kPi / 2);
  EXPECT_EQ(s[3], kPi);
  EXPECT_TRUE(s.is_equispaced());
}

TEST(EquispacedCircle, SpacingIsTwoPiOverN) {
  for (int n : {8, 24, 56, 100}) {
    const auto s = equispaced_circle(n);
    // Each node is π·(2k−n)/n rounded once, so differences carry at most
    // two roundings of a value ≤ π.
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_NEAR(s[k] - s[k - 1], 2 * kPi / n, 1e-15);
    EXPECT_GT(s[0], -kPi);
    EXPECT_EQ(s[s.size() - 1], kPi);
  }
}

TEST(EquispacedCircle, RejectsOddOrSmall) {
  EXPECT_THROW(equispaced_circle(3), InvalidArgument);
  EXPECT_THROW(equispaced_circle(2), InvalidArgument);
  EXPECT_THROW(equispaced_circle(0), InvalidArgument);
}

TEST(NodeSet2D, ValidatesOrderingAndRange) {
  EXPECT_THROW(NodeSet2D({0.0, 0.0}), ValidationError);
  EXPECT_THROW(NodeSet2D({0.5, 0.1}), ValidationError);
  EXPECT_THROW(NodeSet2D({-kPi, 0.0}), ValidationError);
  EXPECT_THROW(NodeSet2D({0.0, 3.5}), ValidationError);
  const NodeSet2D ok({-1.0, 0.0, kPi});
  EXPECT_FALSE(ok.is_equispaced());
}

TEST(NodeSet3D, RejectsDuplicatesAndRange) {
  EXPECT_THROW(NodeSet3D({{0.1, 0.2}, {0.1, 0.2}}, NodeKind::loaded), ValidationError);
  EXPECT_THROW(NodeSet3D({{-kPi, 0.0}}, NodeKind::loaded), ValidationError);
  EXPECT_THROW(NodeSet3D({{0.0, 1.6}}, NodeKind::loaded), ValidationError);
  // Different longitudes at the pole are the same point on the sphere.
  EXPECT_THROW(NodeSet3D({{0.0, kPi / 2}, {0.0, kPi / 2}}, NodeKind::loaded), ValidationError);
}

TEST(SphericalPoint, UnitVectorRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(-kPi, kPi), th(-kPi / 2, kPi / 2);
  for (int i = 0; i < 1000; ++i) {
    const SphericalPoint p{lam(rng), th(rng)};
    const auto q = from_unit_vector(to_unit_vector(p));
    EXPECT_NEAR(q.lambda, p.lambda, 1e-14);
    EXPECT_NEAR(q.theta, p.theta, 1e-14);
  }
  EXPECT_EQ(from_unit_vector(Vec3(-1, 0, 0)).lambda, kPi);
}

TEST(MinChordalDistance, KnownSets) {
  EXPECT_DOUBLE_EQ(min_chordal_distance(NodeSet3D({{0, kPi / 2}, {0, -kPi / 2}}, NodeKind::loaded)), 2.0);
  // Oracle: brute force over the 6 pairs of the explicit tetrahedron.
  const auto t = tetrahedron();
  double oracle = 10;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) oracle = std::min(oracle, (t.col(i) - t.col(j)).norm());
  EXPECT_NEAR(oracle, std::sqrt(8.0 / 3.0), 1e-15);
  EXPECT_NEAR(min_chordal_distance(from_vectors(t)), oracle, 1e-14);
  EXPECT_THROW(min_chordal_distance(NodeSet3D({{0, 0}}, NodeKind::loaded)), InvalidArgument);
}

TEST(RieszEnergy, MatchesDirectSumAndSerialParallelAgree) {
  const auto set = fibonacci_sphere(50);
  const auto& u = set.unit_vectors();
  EXPECT_NEAR(riesz_energy(u), static_cast<double>(direct_energy(u)), 1e-10);
  Eigen::Matrix3Xd g1, g2;
  const double e1 = riesz_energy_and_gradient(u, g1, Exec::serial);
  const double e2 = riesz_energy_and_gradient(u, g2, Exec::parallel);
  EXPECT_EQ(e1, e2);
  EXPECT_TRUE(g1 == g2);
  EXPECT_EQ(riesz_energy(u, Exec::serial), riesz_energy(u, Exec::parallel));
}

TEST(RieszEnergy, GradientMatchesFiniteDifferences) {
  const auto u = fibonacci_sphere(12).unit_vectors();
  Eigen::Matrix3Xd g;
  riesz_energy_and_gradient(u, g, Exec::serial);
  // Tangential gradient: compare the directional derivative along a
  // tangent direction at one point.
  const int i = 5;
  const Vec3 p = u.col(i);
  const Vec3 t = p.cross(Vec3(0.3, -0.2, 0.9)).normalized();
  const double h = 1e-6;
  Eigen::Matrix3Xd up = u, dn = u;
  up.col(i) = p + h * t;
  dn.col(i) = p - h * t;
  const double fd = (riesz_energy(up) - riesz_energy(dn)) / (2 * h);
  EXPECT_NEAR(fd, g.col(i).dot(t), 1e-6);
  EXPECT_NEAR(g.col(i).dot(p), 0.0, 1e-12);
}

TEST(MinimalEnergy, TwoPointsAreAntipodal) {
  const auto r = minimal_energy_sphere(2, 1, 4000, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(min_chordal_distance(r.nodes), 2.0, 1e-9);
}

TEST(MinimalEnergy, FourPointsFormTetrahedron) {
  const auto r = minimal_energy_sphere(4, 11, 4000, 1e-10);
  EXPECT_TRUE(r.converged);
  const auto& u = r.nodes.unit_vectors();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(u.col(i).dot(u.col(j)), -1.0 / 3.0, 1e-6);
  EXPECT_NEAR(r.energy, static_cast<double>(direct_energy(tetrahedron())), 1e-10);
}

TEST(MinimalEnergy, SixPointsFormOctahedron) {
  const auto r = minimal_energy_sphere(6, 5, 4000, 1e-10);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(min_chordal_distance(r.nodes), std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(r.energy, static_cast<double>(direct_energy(octahedron())), 1e-8);
}

TEST(MinimalEnergy, DeterministicAndExecIndependent) {
  const auto a = minimal_energy_sphere(40, 9, 300, 1e-9, Exec::serial);
  const auto b = minimal_energy_sphere(40, 9, 300, 1e-9, Exec::parallel);
  const auto c = minimal_energy_sphere(40, 9, 300, 1e-9, Exec::parallel);
  EXPECT_TRUE(a.nodes == b.nodes);
  EXPECT_TRUE(b.nodes == c.nodes);
  EXPECT_EQ(a.energy, c.energy);
  EXPECT_EQ(a.iterations, c.iterations);
  EXPECT_FALSE(minimal_energy_sphere(40, 10, 300).nodes == a.nodes);
}

TEST(MinimalEnergy, NonConvergenceIsReportedNotThrown) {
  const auto r = minimal_energy_sphere(30, 1, 2, 1e-12);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.gradient_norm, 1e-12);
  EXPECT_EQ(r.nodes.size(), 30u);
}

TEST(MinimalEnergy, BeatsFibonacciEnergy) {
  for (int n : {4, 9, 16, 25}) {
    const auto me = minimal_energy_sphere(n, 2);
    EXPECT_LE(me.energy, riesz_energy(fibonacci_sphere(n).unit_vectors())) << "n=" << n;
  }
  EXPECT_THROW(minimal_energy_sphere(1, 0), InvalidArgument);
}

TEST(Fibonacci, SmallAndSpread) {
  EXPECT_EQ(fibonacci_sphere(1).size(), 1u);
  const auto two = fibonacci_sphere(2);
  EXPECT_GT((two.unit_vectors().col(0) - two.unit_vectors().col(1)).norm(), 0.0);
  const auto s = fibonacci_sphere(100);
  double brute = 10;
  const auto& u = s.unit_vectors();
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j)
      if (i != j) brute = std::min(brute, (u.col(i) - u.col(j)).norm());
  EXPECT_GT(brute, 0.1);
  EXPECT_DOUBLE_EQ(min_chordal_distance(s), brute);
  EXPECT_EQ(s.kind(), NodeKind::fibonacci);
}

TEST(PointFiles, AnglesRoundTripBitExact) {
  const auto dir = temp_dir("angles");
  std::vector<SphericalPoint> pts;
  for (int k = 1; k <= 7; ++k) pts.push_back({kPi * (2.0 * k - 7) / 7, -kPi / 2 + kPi * k / 8});
  const NodeSet3D set(pts, NodeKind::loaded);
  save_point_set(set, dir / "a.txt", PointFormat::angles);
  EXPECT_TRUE(load_point_set(dir / "a.txt", PointFormat::angles) == set);

  const auto me = minimal_energy_sphere(20, 4, 200);
  save_point_set(me.nodes, dir / "me.txt", PointFormat::angles);
  EXPECT_TRUE(load_point_set(dir / "me.txt", PointFormat::angles, NodeKind::minimal_energy) ==
              me.nodes);
}

TEST(PointFiles, UnitVectorRoundTrip) {
  const auto dir = temp_dir("unit");
  const auto set = fibonacci_sphere(64);
  save_point_set(set, dir / "u.txt", PointFormat::unit_vectors);
  const auto back = load_point_set(dir / "u.txt", PointFormat::unit_vectors);
  ASSERT_EQ(back.size(), set.size());
  EXPECT_LE((back.unit_vectors() - set.unit_vectors()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PointFiles, OctahedronAxesRecoveredExactly) {
  const auto dir = temp_dir("axes");
  std::ofstream(dir / "ax.txt") << "# axes\n1 0 0\n0 1 0\n0 0 1\n";
  const auto s = load_point_set(dir / "ax.txt", PointFormat::unit_vectors);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.kind(), NodeKind::loaded);
  EXPECT_EQ(s[0], (SphericalPoint{0.0, 0.0}));
  EXPECT_EQ(s[1], (SphericalPoint{kPi / 2, 0.0}));
  EXPECT_EQ(s[2].theta, kPi / 2);
}

TEST(PointFiles, Errors) {
  const auto dir = temp_dir("errors");
  std::ofstream(dir / "big.txt") << "0 0 2\n";
  EXPECT_THROW(load_point_set(dir / "big.txt", PointFormat::unit_vectors), ValidationError);

  std::ofstream(dir / "bad.txt") << "# header\n0.1 0.2\n0.3 abc\n";
  try {
    load_point_set(dir / "bad.txt", PointFormat::angles);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::ofstream(dir / "short.txt") << "1 0\n";
  EXPECT_THROW(load_point_set(dir / "short.txt", PointFormat::unit_vectors), ParseError);
  std::ofstream(dir / "dup.txt") << "0.5 0.5\n0.5 0.5\n";
  EXPECT_THROW(load_point_set(dir / "dup.txt", PointFormat::angles), ValidationError);
  EXPECT_THROW(load_point_set(dir / "missing.txt", PointFormat::angles), InvalidArgument);
  // Almost-unit vectors are normalized.
  std::ofstream(dir / "near.txt") << "0 0 1.0000001\n";
  EXPECT_EQ(load_point_set(dir / "near.txt", PointFormat::unit_vectors)[0].theta, kPi / 2);
}

TEST(PointCache, GeneratesThenReloads) {
  const auto dir = temp_dir("cache");
  EXPECT_EQ(minimal_energy_file_name(256, 7), "me_256_7.txt");
  const auto a = cached_minimal_energy(30, 3, dir);
  ASSERT_TRUE(std::filesystem::exists(dir / "me_30_3.txt"));
  const auto b = cached_minimal_energy(30, 3, dir);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(b.kind(), NodeKind::minimal_energy);
}
