#include "membrane/shapes.hpp"

#include "membrane/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace membrane {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(name) + " must be positive and finite");
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

// Templated on the scalar type; reference jets difference in long double.
template <class T>
T bump_2d(const TestObject2D& obj, T lambda) {
  using std::abs, std::cos, std::exp, std::pow, std::sin;
  const T g = obj.profile() == Profile::smooth ? -pow(T(1) - cos(lambda), 2)
                                               : -pow(abs(sin(lambda)), 3);
  return T(1) + T(obj.amplitude()) * exp(g / T(obj.sigma()));
}

template <class T>
T bump_3d(const TestObject3D& obj, T lambda, T theta) {
  using std::cos, std::exp, std::max, std::pow, std::sin;
  const T tc = obj.theta_c();
  const T rc = max(T(0), T(1) - cos(theta) * cos(tc) * cos(lambda - T(obj.lambda_c())) -
                             sin(theta) * sin(tc));
  const T p = obj.profile() == Profile::smooth ? T(2) : T(2.5);
  return T(1) + T(obj.amplitude()) * exp(T(obj.exponent_sign()) * pow(rc, p) / T(obj.sigma()));
}

template <class T>
Eigen::Matrix<T, 2, 1> eval_2d(const TestObject2D& obj, T lambda) {
  const auto& s = obj.ideal();
  const Eigen::Matrix<T, 2, 1> ideal(T(s.xc()) + T(s.a()) * std::cos(lambda),
                                     T(s.yc()) + T(s.b()) * std::sin(lambda));
  return bump_2d(obj, lambda) * ideal;
}

template <class T>
Eigen::Matrix<T, 3, 1> eval_3d(const TestObject3D& obj, T lambda, T theta) {
  const auto& s = obj.ideal();
  const T ct = std::cos(theta);
  const Eigen::Matrix<T, 3, 1> ideal(T(s.xc()) + T(s.a()) * std::cos(lambda) * ct,
                                     T(s.yc()) + T(s.b()) * std::sin(lambda) * ct,
                                     T(s.zc()) + T(s.c()) * std::sin(theta));
  return bump_3d(obj, lambda, theta) * ideal;
}

// Ridders' extrapolation of a difference quotient whose error expands in
// even powers of h. `estimate(h)` returns the quotient for all components.
template <int Dim, class F>
std::pair<Eigen::Matrix<double, Dim, 1>, double> ridders(F&& estimate) {
  using Real = long double;
  using V = Eigen::Matrix<Real, Dim, 1>;
  constexpr int kTab = 12;
  constexpr double kCon2 = 4.0;
  constexpr double kSafe = 2.0;
  std::array<std::array<V, kTab>, kTab> a;
  Real h = 1e-2L;
  a[0][0] = estimate(h);
  V best = a[0][0];
  Real err = std::numeric_limits<Real>::infinity();
  for (int i = 1; i < kTab; ++i) {
    h *= 0.5;
    a[0][i] = estimate(h);
    double fac = kCon2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kCon2;
      const Real errt = std::max((a[j][i] - a[j - 1][i]).cwiseAbs().maxCoeff(),
                                   (a[j][i] - a[j - 1][i - 1]).cwiseAbs().maxCoeff());
      if (errt <= err) {
        err = errt;
        best = a[j][i];
      }
    }
    if ((a[i][i] - a[i - 1][i - 1]).cwiseAbs().maxCoeff() >= kSafe * err) break;
  }
  return {best.template cast<double>(), static_cast<double>(err)};
}

}  // namespace

IdealShape2D::IdealShape2D(double xc, double yc, double a, double b)
    : xc_(xc), yc_(yc), a_(a), b_(b) {
  require_finite(xc, "x_c");
  require_finite(yc, "y_c");
  require_positive(a, "a");
  require_positive(b, "b");
}

IdealShape3D::IdealShape3D(double xc, double yc, double zc, double a, double b, double c)
    : xc_(xc), yc_(yc), zc_(zc), a_(a), b_(b), c_(c) {
  require_finite(xc, "x_c");
  require_finite(yc, "y_c");
  require_finite(zc, "z_c");
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(c, "c");
}

std::string_view to_string(Profile p) { return p == Profile::smooth ? "smooth" : "rough"; }

TestObject2D::TestObject2D(IdealShape2D ideal, double amplitude, double sigma, Profile profile)
    : ideal_(ideal), amplitude_(amplitude), sigma_(sigma), profile_(profile) {
  require_finite(amplitude, "amplitude");
  require_positive(sigma, "sigma");
}

TestObject3D::TestObject3D(IdealShape3D ideal, double amplitude, double sigma, double lambda_c,
                           double theta_c, Profile profile, double exponent_sign)
    : ideal_(ideal),
      amplitude_(amplitude),
      sigma_(sigma),
      lambda_c_(lambda_c),
      theta_c_(theta_c),
      profile_(profile),
      exponent_sign_(exponent_sign) {
  require_finite(amplitude, "amplitude");
  require_positive(sigma, "sigma");
  require_finite(lambda_c, "lambda_c");
  if (!(theta_c >= -kPi / 2 && theta_c <= kPi / 2))
    throw ValidationError("theta_c must lie in [-pi/2, pi/2]");
  if (exponent_sign != 1.0 && exponent_sign != -1.0)
    throw ValidationError("exponent_sign must be +1 or -1");
}

TestObject2D object1_2d() {
  return {IdealShape2D(0.9, 0.9, 0.04, 0.05), 0.09, 0.1, Profile::smooth};
}

TestObject2D object2_2d() {
  return {IdealShape2D(0.2, 0.2, 0.1, 0.1), 0.04, 0.9, Profile::rough};
}

TestObject3D object1_3d() {
  return {IdealShape3D(0.9, 0.9, 0.9, 0.1, 0.2, 0.09), 0.09, 0.2, 0.0, kPi / 2, Profile::smooth};
}

TestObject3D object2_3d() {
  return {IdealShape3D(0.1, 0.1, 0.2, 0.1, 0.1, 0.1), 0.04, 16.0 / 25.0, 0.0, kPi / 2,
          Profile::rough};
}

TestObject2D object_2d_preset(std::string_view name) {
  if (name == "object1") return object1_2d();
  if (name == "object2") return object2_2d();
  throw ConfigError("unknown 2D object preset '" + std::string(name) +
                    "' (known: object1, object2)");
}

TestObject3D object_3d_preset(std::string_view name) {
  if (name == "object1") return object1_3d();
  if (name == "object2") return object2_3d();
  throw ConfigError("unknown 3D object preset '" + std::string(name) +
                    "' (known: object1, object2)");
}

Vec2 eval_object_2d(const TestObject2D& obj, double lambda) { return eval_2d(obj, lambda); }

Vec3 eval_object_3d(const TestObject3D& obj, double lambda, double theta) {
  return eval_3d(obj, lambda, theta);
}

ReferenceJet2D reference_jet_2d(const TestObject2D& obj, double lambda) {
  using V = Eigen::Matrix<long double, 2, 1>;
  const long double l = lambda;
  auto f = [&](long double t) { return eval_2d(obj, t); };
  const V x = f(l);
  auto [d1, e1] = ridders<2>([&](long double h) -> V { return (f(l + h) - f(l - h)) / (2 * h); });
  auto [d2, e2] =
      ridders<2>([&](long double h) -> V { return (f(l + h) - 2 * x + f(l - h)) / (h * h); });
  return {{eval_object_2d(obj, lambda), d1, d2}, std::max(e1, e2)};
}

ReferenceJet3D reference_jet_3d(const TestObject3D& obj, double lambda, double theta) {
  using V = Eigen::Matrix<long double, 3, 1>;
  const long double l = lambda, t = theta;
  auto f = [&](long double a, long double b) { return eval_3d(obj, a, b); };
  const V x = f(l, t);
  auto [dl, e1] = ridders<3>([&](long double h) -> V { return (f(l + h, t) - f(l - h, t)) / (2 * h); });
  auto [dt, e2] = ridders<3>([&](long double h) -> V { return (f(l, t + h) - f(l, t - h)) / (2 * h); });
  auto [dll, e3] = ridders<3>(
      [&](long double h) -> V { return (f(l + h, t) - 2 * x + f(l - h, t)) / (h * h); });
  auto [dtt, e4] = ridders<3>(
      [&](long double h) -> V { return (f(l, t + h) - 2 * x + f(l, t - h)) / (h * h); });
  auto [dlt, e5] = ridders<3>([&](long double h) -> V {
    return (f(l + h, t + h) - f(l + h, t - h) - f(l - h, t + h) + f(l - h, t - h)) / (4 * h * h);
  });
  return {{eval_object_3d(obj, lambda, theta), dl, dt, dll, dlt, dtt},
          std::max({e1, e2, e3, e4, e5})};
}

std::vector<ReferenceJet2D> reference_jets_2d(const TestObject2D& obj,
                                              std::span<const double> lambdas, Exec exec) {
  std::vector<ReferenceJet2D> out(lambdas.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(lambdas.size()),
                 [&](std::ptrdiff_t i) { out[i] = reference_jet_2d(obj, lambdas[i]); });
  return out;
}

std::vector<ReferenceJet3D> reference_jets_3d(const TestObject3D& obj,
                                              std::span<const SphericalPoint> sites, Exec exec) {
  std::vector<ReferenceJet3D> out(sites.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(sites.size()), [&](std::ptrdiff_t i) {
    out[i] = reference_jet_3d(obj, sites[i].lambda, sites[i].theta);
  });
  return out;
}

}  // namespace membrane
