#include "membrane/mechanics.hpp"

#include "membrane/errors.hpp"

#include <cmath>
#include <string>

namespace membrane {

MaterialParams::MaterialParams(double K0, double gamma) : K0_(K0), gamma_(gamma) {
  if (!(K0 >= 0.0) || !std::isfinite(K0)) throw ValidationError("K0 must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be finite and >= 0");
}

Frame2D frame_2d(const Jet2D& jet) {
  const double len = jet.d1.norm();
  if (!(len > kDegenerateThreshold)) throw DegenerateJetError("tangent vanishes");
  const Vec2 t = jet.d1 / len;
  return {t, Vec2(-t.y(), t.x())};
}

Vec2 fiber_force_2d(const Jet2D& jet, const MaterialParams& params) { return params.K0() * jet.d2; }

void normals_and_forces_2d(const Eigen::Ref<const Eigen::MatrixXd>& d1,
                           const Eigen::Ref<const Eigen::MatrixXd>& d2,
                           const MaterialParams& params, Eigen::MatrixXd& normals,
                           Eigen::MatrixXd& forces) {
  if (d1.cols() != 2 || d2.cols() != 2 || d1.rows() != d2.rows())
    throw InvalidArgument("normals_and_forces_2d: expected two n x 2 derivative blocks");
  const Eigen::ArrayXd len = d1.rowwise().norm().array();
  for (Eigen::Index i = 0; i < len.size(); ++i)
    if (!(len[i] > kDegenerateThreshold))
      throw DegenerateJetError("tangent vanishes at site " + std::to_string(i));
  normals.resize(d1.rows(), 2);
  normals.col(0) = -d1.col(1).array() / len;
  normals.col(1) = d1.col(0).array() / len;
  forces.noalias() = params.K0() * d2;
}

Frame3D frame_3d(const Jet3D& jet) {
  const Vec3 n = jet.dl.cross(jet.dt);
  const double len = n.norm();
  if (!(len > kDegenerateThreshold))
    throw DegenerateJetError("tangents are parallel or vanish (parameterization pole)");
  return {jet.dl.normalized(), jet.dt.normalized(), n / len};
}

FundamentalForms fundamental_forms(const Jet3D& jet, const Frame3D& frame) {
  const Vec3& n = frame.normal_unit;
  return {jet.dl.dot(jet.dl), jet.dl.dot(jet.dt),  jet.dt.dot(jet.dt),
          jet.dll.dot(n),     jet.dlt.dot(n),      jet.dtt.dot(n)};
}

double mean_curvature(const FundamentalForms& k) {
  const double det = k.E * k.G - k.F * k.F;
  if (!(det > 1e-14)) throw DegenerateJetError("first fundamental form is degenerate");
  return (k.e * k.G - 2.0 * k.f * k.F + k.g * k.E) / (2.0 * det);
}

Vec3 surface_tension_force(const Jet3D& jet, const MaterialParams& params) {
  const Frame3D frame = frame_3d(jet);
  const double H = mean_curvature(fundamental_forms(jet, frame));
  return params.gamma() * 2.0 * H * frame.normal_unit;
}

}  // namespace membrane
