#pragma once

#include "membrane/errors.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace membrane {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

/// Position and first two derivatives of a closed curve x(λ).
struct Jet2D {
  Vec2 x = Vec2::Zero();
  Vec2 d1 = Vec2::Zero();  // ∂x/∂λ
  Vec2 d2 = Vec2::Zero();  // ∂²x/∂λ²
};

/// Position and the five first/second partials of a surface x(λ, θ).
struct Jet3D {
  Vec3 x = Vec3::Zero();
  Vec3 dl = Vec3::Zero();
  Vec3 dt = Vec3::Zero();
  Vec3 dll = Vec3::Zero();
  Vec3 dlt = Vec3::Zero();
  Vec3 dtt = Vec3::Zero();
};

/// Which partial derivative of a surface representation to evaluate.
enum class Partial { val, dl, dt, dll, dlt, dtt };

inline constexpr Partial kAllPartials[] = {Partial::val, Partial::dl,  Partial::dt,
                                           Partial::dll, Partial::dlt, Partial::dtt};

constexpr std::string_view to_string(Partial p) {
  switch (p) {
    case Partial::val: return "val";
    case Partial::dl: return "dl";
    case Partial::dt: return "dt";
    case Partial::dll: return "dll";
    case Partial::dlt: return "dlt";
    case Partial::dtt: return "dtt";
  }
  return "?";
}

// Number of λ and θ derivatives a partial takes.
constexpr int lambda_order(Partial p) {
  return p == Partial::dl || p == Partial::dlt ? 1 : p == Partial::dll ? 2 : 0;
}
constexpr int theta_order(Partial p) {
  return p == Partial::dt || p == Partial::dlt ? 1 : p == Partial::dtt ? 2 : 0;
}

enum class Basis { trig, spherical_harmonic, rbf_circle, rbf_sphere };

/// Dense map from coefficients to the values of one partial at fixed
/// evaluation sites (rows = sites, columns = basis functions).
struct OperatorMatrix {
  Eigen::MatrixXd matrix;
  Partial partial = Partial::val;
  Basis basis = Basis::trig;
};

/// Partial of a curve model for derivative order 0, 1 or 2 in λ.
inline Partial curve_partial(int order) {
  switch (order) {
    case 0: return Partial::val;
    case 1: return Partial::dl;
    case 2: return Partial::dll;
  }
  throw InvalidArgument("derivative order must be 0, 1 or 2, got " + std::to_string(order));
}

}  // namespace membrane
