#pragma once

#include "membrane/geometry.hpp"
#include "membrane/parallel.hpp"
#include "membrane/points.hpp"

#include <iosfwd>
#include <memory>
#include <span>

namespace membrane {

// Matrices of samples or coefficients: one row per site or basis function,
// one column per coordinate.
using Samples2D = Eigen::MatrixX2d;
using Samples3D = Eigen::MatrixX3d;

// Refuse dense solves whose condition estimate exceeds this.
inline constexpr double kMaxCondition = 1e12;

enum class SolverPath { automatic, fft, dense };

// ---------------------------------------------------------------------------
// Trigonometric interpolation on the circle.
//
// Basis for even n: index 0 is 1, index 2k−1 is cos kλ (k = 1..n/2) and
// index 2k is sin kλ (k = 1..n/2−1).

class TrigInterpolant {
 public:
  TrigInterpolant(Samples2D coeffs, double cond_estimate, SolverPath path);

  int size() const { return static_cast<int>(coeffs_.rows()); }
  const Samples2D& coeffs() const { return coeffs_; }
  // 1 for the FFT path (the DFT is unitary up to scaling).
  double cond_estimate() const { return cond_; }
  SolverPath path() const { return path_; }

 private:
  Samples2D coeffs_;
  double cond_;
  SolverPath path_;
};

/// Row of basis-function values (or their λ-derivative of `order`) at λ.
Eigen::RowVectorXd trig_basis_row(double lambda, int n, int order);
OperatorMatrix trig_operator(std::span<const double> lambdas, int n, int order,
                             Exec exec = Exec::parallel);

/// Interpolates data at the nodes. The FFT path needs equispaced nodes;
/// `automatic` picks it whenever they are.
TrigInterpolant trig_fit(const NodeSet2D& nodes, const Samples2D& data,
                         SolverPath path = SolverPath::automatic);

Samples2D trig_eval(const TrigInterpolant& p, const NodeSet2D& eval, int order);
Vec2 trig_eval(const TrigInterpolant& p, double lambda, int order);

// ---------------------------------------------------------------------------
// Spherical harmonic interpolation.
//
// Degree-L basis has (L+1)² functions ordered by ℓ, then s = 0..2ℓ within ℓ:
// s = 0 is P_ℓ^0, odd s is sin(mλ) P_ℓ^m and even s > 0 is cos(mλ) P_ℓ^m with
// m = ⌈s/2⌉. P_ℓ^m carries √((2ℓ+1)/4π (ℓ−m)!/(ℓ+m)!) and no (−1)^m phase,
// evaluated at sinθ.

constexpr int sph_size(int degree) { return (degree + 1) * (degree + 1); }

/// Normalized associated Legendre values P̄_ℓ^m(sinθ) and their first and
/// second θ-derivatives, for 0 ≤ m ≤ ℓ ≤ degree. Entry (ℓ, m) is at
/// ℓ(ℓ+1)/2 + m.
struct LegendreTable {
  int degree = 0;
  Eigen::VectorXd p, dp, d2p;

  double P(int l, int m) const { return p[l * (l + 1) / 2 + m]; }
  double dP(int l, int m) const { return dp[l * (l + 1) / 2 + m]; }
  double d2P(int l, int m) const { return d2p[l * (l + 1) / 2 + m]; }
};

LegendreTable normalized_legendre(double theta, int degree);

Eigen::RowVectorXd sph_basis_row(double lambda, double theta, int degree, Partial partial);
OperatorMatrix sph_operator(const NodeSet3D& eval, int degree, Partial partial,
                            Exec exec = Exec::parallel);

/// LU factorization of the interpolation matrix for one node set and degree.
class SphSystem {
 public:
  SphSystem(NodeSet3D nodes, int degree);

  const NodeSet3D& nodes() const { return nodes_; }
  int degree() const { return degree_; }
  double cond_estimate() const { return cond_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  NodeSet3D nodes_;
  int degree_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double cond_;
};

/// Shared factorization for (nodes, degree), built on first use. Throws
/// SingularSystemError when the condition estimate exceeds kMaxCondition.
std::shared_ptr<const SphSystem> sph_system(const NodeSet3D& nodes, int degree);

/// Drops all cached spherical-harmonic and RBF factorizations.
void clear_factorization_cache();

class SphInterpolant {
 public:
  SphInterpolant(int degree, Samples3D coeffs, double cond_estimate);

  int degree() const { return degree_; }
  const Samples3D& coeffs() const { return coeffs_; }
  double cond_estimate() const { return cond_; }

 private:
  int degree_;
  Samples3D coeffs_;
  double cond_;
};

/// Requires nodes.size() == (degree+1)².
SphInterpolant sph_fit(const NodeSet3D& nodes, const Samples3D& data, int degree);
Samples3D sph_eval(const SphInterpolant& p, const NodeSet3D& eval, Partial partial);
Vec3 sph_eval(const SphInterpolant& p, double lambda, double theta, Partial partial);

/// Degree L with (L+1)² == n, or −1 when n is not a perfect square.
int sph_degree_for(std::size_t n);

/// CSV with header "coordinate,index,value"; one row per coefficient.
void write_coefficients_csv(std::ostream& out, const Eigen::MatrixXd& coeffs);

}  // namespace membrane
