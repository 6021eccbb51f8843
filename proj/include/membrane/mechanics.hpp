#pragma once

#include "membrane/geometry.hpp"

namespace membrane {

inline constexpr double kDegenerateThreshold = 1e-12;

struct Frame2D {
  Vec2 tangent_unit;
  Vec2 normal_unit;  // (−τ̂_y, τ̂_x)
};

struct Frame3D {
  Vec3 tangent_lambda_unit;
  Vec3 tangent_theta_unit;
  Vec3 normal_unit;  // τ^λ × τ^θ normalized
};

struct FundamentalForms {
  double E = 0, F = 0, G = 0;  // first form
  double e = 0, f = 0, g = 0;  // second form
};

class MaterialParams {
 public:
  /// Spring/fiber constant K0 and surface-tension coefficient γ, both ≥ 0.
  MaterialParams(double K0, double gamma);

  double K0() const { return K0_; }
  double gamma() const { return gamma_; }

 private:
  double K0_, gamma_;
};

Frame2D frame_2d(const Jet2D& jet);

/// K0 ∂²x/∂λ².
Vec2 fiber_force_2d(const Jet2D& jet, const MaterialParams& params);

/// frame_2d normals and fiber_force_2d forces for many sites at once; row i
/// of d1 and d2 holds the derivatives at site i. Outputs are resized.
void normals_and_forces_2d(const Eigen::Ref<const Eigen::MatrixXd>& d1,
                           const Eigen::Ref<const Eigen::MatrixXd>& d2,
                           const MaterialParams& params, Eigen::MatrixXd& normals,
                           Eigen::MatrixXd& forces);

Frame3D frame_3d(const Jet3D& jet);

FundamentalForms fundamental_forms(const Jet3D& jet, const Frame3D& frame);

/// H = (eG − 2fF + gE) / (2(EG − F²)).
double mean_curvature(const FundamentalForms& forms);

/// γ 2H η̂.
Vec3 surface_tension_force(const Jet3D& jet, const MaterialParams& params);

}  // namespace membrane
