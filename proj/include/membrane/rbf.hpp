#pragma once

#include "membrane/fourier.hpp"
#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"
#include "membrane/points.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace membrane {

enum class KernelFamily { mq, imq };

std::string_view to_string(KernelFamily f);
KernelFamily parse_kernel_family(std::string_view name);

/// MQ φ(r) = √(1 + (εr)²) or IMQ φ(r) = 1/√(1 + (εr)²), ε > 0.
/// Derivatives go through ψ(t) = φ(√t), t the squared distance.
class RadialKernel {
 public:
  RadialKernel(KernelFamily family, double epsilon);

  KernelFamily family() const { return family_; }
  double epsilon() const { return epsilon_; }

  double phi(double r) const { return psi(r * r); }
  double psi(double t) const;
  double dpsi(double t) const;
  double d2psi(double t) const;

  friend bool operator==(const RadialKernel&, const RadialKernel&) = default;

 private:
  KernelFamily family_;
  double epsilon_;
};

double chordal_distance_circle(double lambda1, double lambda2);
double chordal_distance_sphere(SphericalPoint a, SphericalPoint b);

// RBF fits (FFT, dense 2D and 3D) are refused once the condition estimate
// passes 1/DBL_EPSILON. Direct interpolants stay accurate at the nodes well
// beyond kMaxCondition, which still applies to harmonic fits.
inline constexpr double kMaxRbfCondition = 1.0 / 2.220446049250313e-16;

class RbfInterpolant2D {
 public:
  RbfInterpolant2D(NodeSet2D nodes, RadialKernel kernel, Samples2D coeffs, double cond_estimate,
                   SolverPath path);

  const NodeSet2D& nodes() const { return nodes_; }
  const RadialKernel& kernel() const { return kernel_; }
  const Samples2D& coeffs() const { return coeffs_; }
  double cond_estimate() const { return cond_; }
  SolverPath path() const { return path_; }

 private:
  NodeSet2D nodes_;
  RadialKernel kernel_;
  Samples2D coeffs_;
  double cond_;
  SolverPath path_;
};

class RbfInterpolant3D {
 public:
  RbfInterpolant3D(NodeSet3D nodes, RadialKernel kernel, Samples3D coeffs, double cond_estimate);

  const NodeSet3D& nodes() const { return nodes_; }
  const RadialKernel& kernel() const { return kernel_; }
  const Samples3D& coeffs() const { return coeffs_; }
  double cond_estimate() const { return cond_; }

 private:
  NodeSet3D nodes_;
  RadialKernel kernel_;
  Samples3D coeffs_;
  double cond_;
};

/// Kernel matrix A_ij = φ(‖x(λ_i) − x(λ_j)‖) on the circle (symmetric).
Eigen::MatrixXd rbf_system_matrix_2d(const NodeSet2D& nodes, const RadialKernel& kernel);
Eigen::MatrixXd rbf_system_matrix_3d(const NodeSet3D& nodes, const RadialKernel& kernel,
                                     Exec exec = Exec::parallel);

/// Circulant/FFT path for equispaced nodes, LU otherwise. Throws
/// SingularSystemError when the condition estimate exceeds kMaxRbfCondition.
RbfInterpolant2D rbf_fit_2d(const NodeSet2D& nodes, const Samples2D& data,
                            const RadialKernel& kernel, SolverPath path = SolverPath::automatic);

/// Prepared factorization of the 3D kernel matrix: Cholesky for IMQ, LU for MQ.
class RbfSystem3D {
 public:
  RbfSystem3D(NodeSet3D nodes, RadialKernel kernel);

  const NodeSet3D& nodes() const { return nodes_; }
  const RadialKernel& kernel() const { return kernel_; }
  double cond_estimate() const { return cond_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  NodeSet3D nodes_;
  RadialKernel kernel_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> llt_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  double cond_ = 0.0;
};

/// Shared factorization for (nodes, kernel), built on first use.
std::shared_ptr<const RbfSystem3D> rbf_system_3d(const NodeSet3D& nodes, const RadialKernel& kernel);

/// Requires at least 4 nodes.
RbfInterpolant3D rbf_fit_3d(const NodeSet3D& nodes, const Samples3D& data,
                            const RadialKernel& kernel);

OperatorMatrix rbf_operator_2d(std::span<const double> lambdas, const NodeSet2D& nodes,
                               const RadialKernel& kernel, int order, Exec exec = Exec::parallel);
OperatorMatrix rbf_operator_3d(const NodeSet3D& eval, const NodeSet3D& nodes,
                               const RadialKernel& kernel, Partial partial,
                               Exec exec = Exec::parallel);

Samples2D rbf_eval_2d(const RbfInterpolant2D& s, const NodeSet2D& eval, int order);
Vec2 rbf_eval_2d(const RbfInterpolant2D& s, double lambda, int order);
Samples3D rbf_eval_3d(const RbfInterpolant3D& s, const NodeSet3D& eval, Partial partial);
Vec3 rbf_eval_3d(const RbfInterpolant3D& s, double lambda, double theta, Partial partial);

struct EpsilonGap {
  double epsilon = 0.0;
  double gap = 0.0;           // NaN when the fit failed
  double cond_estimate = 0.0;
  std::string error;          // empty on success
};

/// For each ε, the largest ‖s(λ) − p(λ)‖ over `grid` equispaced points between
/// the MQ interpolant s and the trigonometric interpolant p of the same data.
/// Needs equispaced nodes with n ≤ 12.
std::vector<EpsilonGap> epsilon_limit_gap(const NodeSet2D& nodes, const Samples2D& data,
                                          std::span<const double> epsilons, int grid = 512);

}  // namespace membrane
