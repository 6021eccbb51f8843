#include "membrane/errors.hpp"
#include "membrane/mechanics.hpp"
#include "membrane/shapes.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace membrane;

namespace {

Jet2D circle_jet(double r, double l) {
  return {{r * std::cos(l), r * std::sin(l)}, {-r * std::sin(l), r * std::cos(l)},
          {-r * std::cos(l), -r * std::sin(l)}};
}

// Radius-r sphere centered at c, parameterized as in the test objects.
Jet3D sphere_jet(double r, double l, double t, const Vec3& c = Vec3::Zero()) {
  const double cl = std::cos(l), sl = std::sin(l), ct = std::cos(t), st = std::sin(t);
  Jet3D j;
  j.x = c + r * Vec3(cl * ct, sl * ct, st);
  j.dl = r * Vec3(-sl * ct, cl * ct, 0);
  j.dt = r * Vec3(-cl * st, -sl * st, ct);
  j.dll = r * Vec3(-cl * ct, -sl * ct, 0);
  j.dlt = r * Vec3(sl * st, -cl * st, 0);
  j.dtt = -r * Vec3(cl * ct, sl * ct, st);
  return j;
}

const MaterialParams kParams(0.2, 0.2);

}  // namespace

TEST(MaterialParams, Validation) {
  EXPECT_NO_THROW(MaterialParams(0, 0));
  EXPECT_THROW(MaterialParams(-0.1, 0.2), ValidationError);
  EXPECT_THROW(MaterialParams(0.2, NAN), ValidationError);
  EXPECT_THROW(MaterialParams(INFINITY, 0.2), ValidationError);
}

TEST(Frame2D, Circle) {
  for (double l : {-3.0, -0.5, 0.0, 1.2, kPi}) {
    const auto f = frame_2d(circle_jet(1.0, l));
    EXPECT_LE((f.normal_unit - Vec2(-std::cos(l), -std::sin(l))).norm(), 1e-15);
    EXPECT_EQ(f.normal_unit, Vec2(-f.tangent_unit.y(), f.tangent_unit.x()));
  }
  const auto f = frame_2d({{0, 0}, {2, 0}, {0, 0}});
  EXPECT_EQ(f.tangent_unit, Vec2(1, 0));
  EXPECT_EQ(f.normal_unit, Vec2(0, 1));
  EXPECT_THROW(frame_2d({{1, 1}, {0, 0}, {1, 0}}), DegenerateJetError);
  EXPECT_THROW(frame_2d({{1, 1}, {1e-13, 0}, {1, 0}}), DegenerateJetError);
}

TEST(FiberForce2D, CircleAndLinearity) {
  for (double r : {1.0, 0.3, 2.5})
    for (double l : {-1.0, 0.4, 2.9}) {
      const Vec2 f = fiber_force_2d(circle_jet(r, l), kParams);
      EXPECT_NEAR(f.norm(), 0.2 * r, 1e-15);
      EXPECT_LE((f + 0.2 * r * Vec2(std::cos(l), std::sin(l))).norm(), 1e-15);
    }
  EXPECT_EQ(fiber_force_2d(circle_jet(1, 0.3), MaterialParams(0, 1)), Vec2(0, 0));
  const Jet2D a = circle_jet(1, 0.3), b = oracle::jet_2d(object2_2d(), 1.1);
  const Jet2D ab{a.x + 2 * b.x, a.d1 + 2 * b.d1, a.d2 + 2 * b.d2};
  const Vec2 lin = fiber_force_2d(a, kParams) + 2 * fiber_force_2d(b, kParams);
  EXPECT_LE((fiber_force_2d(ab, kParams) - lin).norm(), 1e-15);
  EXPECT_LE((fiber_force_2d(a, MaterialParams(0.6, 0)) - 3 * fiber_force_2d(a, kParams)).norm(), 1e-15);
}

TEST(Frame3D, SphereNormalsPointOutward) {
  for (double r : {1.0, 3.0})
    for (double l : {-2.0, 0.0, 1.0}) {
      const auto f = frame_3d(sphere_jet(r, l, 0.0));
      EXPECT_LE((f.normal_unit - Vec3(std::cos(l), std::sin(l), 0)).norm(), 1e-15);
      EXPECT_NEAR(f.tangent_lambda_unit.norm(), 1.0, 1e-15);
      EXPECT_NEAR(f.tangent_theta_unit.norm(), 1.0, 1e-15);
    }
  Jet3D pole = sphere_jet(1, 0.3, kPi / 2);
  pole.dl = Vec3::Zero();
  EXPECT_THROW(frame_3d(pole), DegenerateJetError);
  Jet3D par = sphere_jet(1, 0.3, 0.2);
  par.dt = 2 * par.dl;
  EXPECT_THROW(frame_3d(par), DegenerateJetError);
}

TEST(FundamentalForms, Sphere) {
  // E = r²cos²θ, F = 0, G = r², e = −r cos²θ, f = 0, g = −r.
  for (double r : {1.0, 0.5, 2.0})
    for (auto [l, t] : {std::pair{0.3, 0.2}, {-2.0, 1.1}, {2.5, -0.9}}) {
      const auto j = sphere_jet(r, l, t);
      const auto ff = fundamental_forms(j, frame_3d(j));
      const double c2 = std::cos(t) * std::cos(t);
      EXPECT_NEAR(ff.E, r * r * c2, 1e-14);
      EXPECT_NEAR(ff.F, 0.0, 1e-14);
      EXPECT_NEAR(ff.G, r * r, 1e-14);
      EXPECT_NEAR(ff.e, -r * c2, 1e-14);
      EXPECT_NEAR(ff.f, 0.0, 1e-14);
      EXPECT_NEAR(ff.g, -r, 1e-14);
      EXPECT_NEAR(mean_curvature(ff), -1.0 / r, 1e-14);
    }
}

TEST(FundamentalForms, FlatPatch) {
  Jet3D j;
  j.x = Vec3(0.2, 0.1, 0.5);
  j.dl = Vec3(1, 0.5, 0);
  j.dt = Vec3(0, 2, 0);
  j.dll = Vec3(3, 1, 0);
  j.dlt = Vec3(-1, 0, 0);
  j.dtt = Vec3(0, 4, 0);
  const auto ff = fundamental_forms(j, frame_3d(j));
  EXPECT_EQ(ff.e, 0.0);
  EXPECT_EQ(ff.f, 0.0);
  EXPECT_EQ(ff.g, 0.0);
  EXPECT_EQ(mean_curvature(ff), 0.0);
  EXPECT_THROW(mean_curvature(FundamentalForms{1, 1, 1, 0, 0, 0}), DegenerateJetError);
}

TEST(SurfaceTension, Sphere) {
  const Vec3 f = surface_tension_force(sphere_jet(1.0, 0.7, 0.3), kParams);
  EXPECT_NEAR(f.norm(), 0.4, 1e-14);
  EXPECT_LE((f + 0.4 * sphere_jet(1.0, 0.7, 0.3).x).norm(), 1e-14);
  const Vec3 g = surface_tension_force(sphere_jet(2.0, -1.0, 0.5), kParams);
  EXPECT_NEAR(g.norm(), 0.2, 1e-14);
  EXPECT_LT(g.dot(sphere_jet(2.0, -1.0, 0.5).x), 0.0);
  EXPECT_EQ(surface_tension_force(sphere_jet(1, 0, 0), MaterialParams(0.2, 0)), Vec3::Zero());
}

TEST(SurfaceTension, RadialOnAnySphere) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lam(-kPi, kPi), th(-1.5, 1.5), u(-2, 2), rad(0.1, 5);
  for (int i = 0; i < 500; ++i) {
    const Vec3 c(u(rng), u(rng), u(rng));
    const double r = rad(rng);
    const auto j = sphere_jet(r, lam(rng), th(rng), c);
    const Vec3 f = surface_tension_force(j, kParams);
    EXPECT_LE(f.cross((j.x - c).normalized()).norm(), 1e-10);
    EXPECT_NEAR(f.norm(), 0.4 / r, 1e-12 / r);
  }
}

TEST(MeanCurvature, InvariantUnderLambdaScaling) {
  // x̃(μ, θ) = x(2μ, θ): first and second λ-derivatives pick up 2 and 4.
  for (const auto& obj : {object1_3d(), object2_3d()})
    for (auto [l, t] : {std::pair{0.3, 0.2}, {-2.0, 1.1}, {2.5, -0.9}, {0.05, 1.45}}) {
      const Jet3D j = oracle::jet_3d(obj, l, t);
      Jet3D s = j;
      s.dl = 2 * j.dl;
      s.dll = 4 * j.dll;
      s.dlt = 2 * j.dlt;
      const auto a = fundamental_forms(j, frame_3d(j));
      const auto b = fundamental_forms(s, frame_3d(s));
      EXPECT_NEAR(b.E, 4 * a.E, 1e-14 * b.E);
      EXPECT_NEAR(b.e, 4 * a.e, 1e-13 * std::abs(b.e) + 1e-15);
      EXPECT_NEAR(mean_curvature(b), mean_curvature(a), 1e-12 * std::abs(mean_curvature(a)));
    }
}

TEST(Frames, AlwaysUnitLength) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> lam(-kPi, kPi), th(-1.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    const auto f2 = frame_2d(oracle::jet_2d(object2_2d(), lam(rng)));
    EXPECT_NEAR(f2.normal_unit.norm(), 1.0, 1e-12);
    const auto f3 = frame_3d(oracle::jet_3d(object1_3d(), lam(rng), th(rng)));
    EXPECT_NEAR(f3.normal_unit.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f3.tangent_lambda_unit.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f3.tangent_theta_unit.norm(), 1.0, 1e-12);
  }
}

TEST(NormalsAndForces2D, MatchesPointwise) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-kPi, kPi);
  const int m = 64;
  Eigen::MatrixXd d1(m, 2), d2(m, 2), normals, forces;
  std::vector<Jet2D> jets;
  for (int i = 0; i < m; ++i) {
    jets.push_back(oracle::jet_2d(object2_2d(), lam(rng)));
    d1.row(i) = jets.back().d1.transpose();
    d2.row(i) = jets.back().d2.transpose();
  }
  normals_and_forces_2d(d1, d2, kParams, normals, forces);
  ASSERT_EQ(normals.rows(), m);
  for (int i = 0; i < m; ++i) {
    EXPECT_LE((normals.row(i).transpose() - frame_2d(jets[i]).normal_unit).norm(), 1e-15);
    EXPECT_EQ(forces.row(i).transpose(), fiber_force_2d(jets[i], kParams));
  }
  d1.row(5).setZero();
  try {
    normals_and_forces_2d(d1, d2, kParams, normals, forces);
    FAIL();
  } catch (const DegenerateJetError& e) {
    EXPECT_NE(std::string(e.what()).find("site 5"), std::string::npos);
  }
  EXPECT_THROW(normals_and_forces_2d(d1, d2.topRows(3), kParams, normals, forces), InvalidArgument);
}
