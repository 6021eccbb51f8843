#pragma once

#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"
#include "membrane/points.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace membrane {

class IdealShape2D {
 public:
  /// Ellipse centered at (xc, yc) with radii a, b > 0.
  IdealShape2D(double xc, double yc, double a, double b);

  double xc() const { return xc_; }
  double yc() const { return yc_; }
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double xc_, yc_, a_, b_;
};

class IdealShape3D {
 public:
  /// Ellipsoid with equatorial radii a, b and polar radius c, all > 0.
  IdealShape3D(double xc, double yc, double zc, double a, double b, double c);

  double xc() const { return xc_; }
  double yc() const { return yc_; }
  double zc() const { return zc_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

 private:
  double xc_, yc_, zc_, a_, b_, c_;
};

// Smooth bumps are C^inf; rough ones have a limited number of continuous
// derivatives (two in 2D, three in 3D).
enum class Profile { smooth, rough };

std::string_view to_string(Profile p);

/// [1 + A exp(g(λ)/σ)] x_ideal(λ) with g = −(1 − cosλ)² (smooth) or
/// g = −|sinλ|³ (rough).
class TestObject2D {
 public:
  TestObject2D(IdealShape2D ideal, double amplitude, double sigma, Profile profile);

  const IdealShape2D& ideal() const { return ideal_; }
  double amplitude() const { return amplitude_; }
  double sigma() const { return sigma_; }
  Profile profile() const { return profile_; }

 private:
  IdealShape2D ideal_;
  double amplitude_, sigma_;
  Profile profile_;
};

/// [1 + A exp(s · r_c^p / σ)] x_ideal(λ, θ) with
/// r_c = 1 − cosθ cosθ_c cos(λ − λ_c) − sinθ sinθ_c, p = 2 (smooth) or 2.5
/// (rough). The exponent sign s defaults to −1 (a decaying bump).
class TestObject3D {
 public:
  TestObject3D(IdealShape3D ideal, double amplitude, double sigma, double lambda_c,
               double theta_c, Profile profile, double exponent_sign = -1.0);

  const IdealShape3D& ideal() const { return ideal_; }
  double amplitude() const { return amplitude_; }
  double sigma() const { return sigma_; }
  double lambda_c() const { return lambda_c_; }
  double theta_c() const { return theta_c_; }
  Profile profile() const { return profile_; }
  double exponent_sign() const { return exponent_sign_; }

 private:
  IdealShape3D ideal_;
  double amplitude_, sigma_, lambda_c_, theta_c_;
  Profile profile_;
  double exponent_sign_;
};

TestObject2D object1_2d();
TestObject2D object2_2d();
TestObject3D object1_3d();
TestObject3D object2_3d();

/// Presets by name: "object1" or "object2".
TestObject2D object_2d_preset(std::string_view name);
TestObject3D object_3d_preset(std::string_view name);

// The formulas are periodic in λ and analytic in θ, so both functions accept
// any finite arguments; finite differences rely on that near ±π and the poles.
Vec2 eval_object_2d(const TestObject2D& obj, double lambda);
Vec3 eval_object_3d(const TestObject3D& obj, double lambda, double theta);

template <class J>
struct ReferenceJet {
  J jet;
  double error_estimate = 0.0;  // largest absolute error estimate over all components
};
using ReferenceJet2D = ReferenceJet<Jet2D>;
using ReferenceJet3D = ReferenceJet<Jet3D>;

/// Derivatives by Richardson-extrapolated central differences (Ridders'
/// tableau, h0 = 1e−2 halving each step).
ReferenceJet2D reference_jet_2d(const TestObject2D& obj, double lambda);
ReferenceJet3D reference_jet_3d(const TestObject3D& obj, double lambda, double theta);

std::vector<ReferenceJet2D> reference_jets_2d(const TestObject2D& obj,
                                              std::span<const double> lambdas,
                                              Exec exec = Exec::parallel);
std::vector<ReferenceJet3D> reference_jets_3d(const TestObject3D& obj,
                                              std::span<const SphericalPoint> sites,
                                              Exec exec = Exec::parallel);

}  // namespace membrane
