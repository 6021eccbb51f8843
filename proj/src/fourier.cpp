#include "membrane/fourier.hpp"

#include "cache.hpp"
#include "membrane/errors.hpp"

#include <spdlog/spdlog.h>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>

namespace membrane {

namespace {

void require_even(int n) {
  if (n < 2 || n % 2 != 0)
    throw InvalidArgument("trigonometric interpolation needs an even node count, got " +
                          std::to_string(n));
}

// d^order/dλ^order of cos(kλ) and sin(kλ).
std::pair<double, double> trig_pair(double k, double lambda, int order) {
  const double c = std::cos(k * lambda), s = std::sin(k * lambda);
  switch (order) {
    case 0: return {c, s};
    case 1: return {-k * s, k * c};
    case 2: return {-k * k * c, -k * k * s};
  }
  throw InvalidArgument("derivative order must be 0, 1 or 2, got " + std::to_string(order));
}

Samples2D fft_trig_coefficients(const Samples2D& data) {
  const int n = static_cast<int>(data.rows());
  const int half = n / 2;
  thread_local Eigen::FFT<double> fft;  // keeps its plans across calls
  // Both coordinates in one complex transform: z = x + iy.
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n)), spec;
  // Node j (1-based) sits at −π + 2πj/n; sample n lands at phase 0.
  for (int j = 1; j <= n; ++j) z[j % n] = {data(j - 1, 0), data(j - 1, 1)};
  fft.fwd(spec, z);
  Samples2D coeffs(n, 2);
  for (int k = 0; k <= half; ++k) {
    const std::complex<double> zk = spec[k], zc = std::conj(spec[(n - k) % n]);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const std::complex<double> X[2] = {sign * 0.5 * (zk + zc),
                                       sign * std::complex<double>(0.0, -0.5) * (zk - zc)};
    for (int d = 0; d < 2; ++d) {
      if (k == 0) {
        coeffs(0, d) = X[d].real() / n;
      } else if (k == half) {
        coeffs(2 * k - 1, d) = X[d].real() / n;
      } else {
        coeffs(2 * k - 1, d) = 2.0 * X[d].real() / n;
        coeffs(2 * k, d) = -2.0 * X[d].imag() / n;
      }
    }
  }
  return coeffs;
}

// ℓ(ℓ+1)/2 + m
constexpr int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }

// dP̄_ℓ^m/dθ expressed through P̄_ℓ^{m±1}; applied to any table of
// functions that satisfies the same ladder relation.
double ladder(const Eigen::VectorXd& f, int l, int m) {
  if (m == 0) return l == 0 ? 0.0 : std::sqrt(double(l) * (l + 1)) * f[tri_index(l, 1)];
  const double up = m + 1 <= l ? std::sqrt(double(l + m + 1) * (l - m)) * f[tri_index(l, m + 1)] : 0.0;
  const double down = std::sqrt(double(l + m) * (l - m + 1)) * f[tri_index(l, m - 1)];
  return 0.5 * (up - down);
}

}  // namespace

TrigInterpolant::TrigInterpolant(Samples2D coeffs, double cond_estimate, SolverPath path)
    : coeffs_(std::move(coeffs)), cond_(cond_estimate), path_(path) {
  require_even(static_cast<int>(coeffs_.rows()));
}

Eigen::RowVectorXd trig_basis_row(double lambda, int n, int order) {
  require_even(n);
  Eigen::RowVectorXd row(n);
  curve_partial(order);
  row[0] = order == 0 ? 1.0 : 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    const auto [c, s] = trig_pair(k, lambda, order);
    row[2 * k - 1] = c;
    if (k < n / 2) row[2 * k] = s;
  }
  return row;
}

OperatorMatrix trig_operator(std::span<const double> lambdas, int n, int order, Exec exec) {
  OperatorMatrix op{Eigen::MatrixXd(static_cast<Eigen::Index>(lambdas.size()), n),
                    curve_partial(order), Basis::trig};
  require_even(n);
  for_each_index(exec, static_cast<std::ptrdiff_t>(lambdas.size()),
                 [&](std::ptrdiff_t i) { op.matrix.row(i) = trig_basis_row(lambdas[i], n, order); });
  return op;
}

TrigInterpolant trig_fit(const NodeSet2D& nodes, const Samples2D& data, SolverPath path) {
  const int n = static_cast<int>(nodes.size());
  require_even(n);
  if (data.rows() != n)
    throw InvalidArgument("trig_fit: " + std::to_string(data.rows()) + " data rows for " +
                          std::to_string(n) + " nodes");
  if (path == SolverPath::automatic) path = nodes.is_equispaced() ? SolverPath::fft : SolverPath::dense;
  if (path == SolverPath::fft) {
    if (!nodes.is_equispaced()) throw InvalidArgument("trig_fit: FFT path needs equispaced nodes");
    return {fft_trig_coefficients(data), 1.0, SolverPath::fft};
  }
  const auto a = trig_operator(nodes.angles(), n, 0, Exec::serial).matrix;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double cond = detail::condition_from_rcond(lu.rcond());
  if (!(cond <= kMaxCondition))
    throw SingularSystemError("trigonometric interpolation matrix is numerically singular", cond);
  return {lu.solve(data), cond, SolverPath::dense};
}

Samples2D trig_eval(const TrigInterpolant& p, const NodeSet2D& eval, int order) {
  return trig_operator(eval.angles(), p.size(), order).matrix * p.coeffs();
}

Vec2 trig_eval(const TrigInterpolant& p, double lambda, int order) {
  return (trig_basis_row(lambda, p.size(), order) * p.coeffs()).transpose();
}

LegendreTable normalized_legendre(double theta, int degree) {
  if (degree < 0) throw InvalidArgument("degree must be >= 0");
  const int size = tri_index(degree, degree) + 1;
  LegendreTable t;
  t.degree = degree;
  t.p.setZero(size);
  t.dp.setZero(size);
  t.d2p.setZero(size);
  const double x = std::sin(theta), c = std::cos(theta);
  auto& P = t.p;
  P[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= degree; ++m)
    P[tri_index(m, m)] = std::sqrt((2.0 * m + 1) / (2.0 * m)) * c * P[tri_index(m - 1, m - 1)];
  for (int m = 0; m < degree; ++m)
    P[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3) * x * P[tri_index(m, m)];
  for (int m = 0; m <= degree; ++m) {
    for (int l = m + 2; l <= degree; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1));
      P[tri_index(l, m)] = a * (x * P[tri_index(l - 1, m)] - b * P[tri_index(l - 2, m)]);
    }
  }
  for (int l = 0; l <= degree; ++l)
    for (int m = 0; m <= l; ++m) t.dp[tri_index(l, m)] = ladder(t.p, l, m);
  for (int l = 0; l <= degree; ++l)
    for (int m = 0; m <= l; ++m) t.d2p[tri_index(l, m)] = ladder(t.dp, l, m);
  return t;
}

Eigen::RowVectorXd sph_basis_row(double lambda, double theta, int degree, Partial partial) {
  const auto table = normalized_legendre(theta, degree);
  const int lo = lambda_order(partial);
  const Eigen::VectorXd& leg = theta_order(partial) == 0 ? table.p
                               : theta_order(partial) == 1 ? table.dp
                                                           : table.d2p;
  Eigen::RowVectorXd row(sph_size(degree));
  for (int l = 0; l <= degree; ++l) {
    const int base = l * l;
    row[base] = lo == 0 ? leg[tri_index(l, 0)] : 0.0;
    for (int m = 1; m <= l; ++m) {
      const auto [c, s] = trig_pair(m, lambda, lo);
      row[base + 2 * m - 1] = s * leg[tri_index(l, m)];
      row[base + 2 * m] = c * leg[tri_index(l, m)];
    }
  }
  return row;
}

OperatorMatrix sph_operator(const NodeSet3D& eval, int degree, Partial partial, Exec exec) {
  if (degree < 0) throw InvalidArgument("degree must be >= 0");
  OperatorMatrix op{Eigen::MatrixXd(static_cast<Eigen::Index>(eval.size()), sph_size(degree)),
                    partial, Basis::spherical_harmonic};
  for_each_index(exec, static_cast<std::ptrdiff_t>(eval.size()), [&](std::ptrdiff_t i) {
    op.matrix.row(i) = sph_basis_row(eval[i].lambda, eval[i].theta, degree, partial);
  });
  return op;
}

SphSystem::SphSystem(NodeSet3D nodes, int degree) : nodes_(std::move(nodes)), degree_(degree) {
  if (degree < 0) throw InvalidArgument("degree must be >= 0");
  if (static_cast<int>(nodes_.size()) != sph_size(degree))
    throw InvalidArgument("degree " + std::to_string(degree) + " needs " +
                          std::to_string(sph_size(degree)) + " nodes, got " +
                          std::to_string(nodes_.size()));
  lu_.compute(sph_operator(nodes_, degree, Partial::val, Exec::serial).matrix);
  cond_ = detail::condition_from_rcond(lu_.rcond());
  if (!(cond_ <= kMaxCondition)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", cond_);
    throw SingularSystemError(std::string("spherical harmonic interpolation matrix is numerically "
                                          "singular (condition estimate ") +
                                  buf + "); use maximal-determinant nodes",
                              cond_);
  }
  if (nodes_.kind() != NodeKind::maximal_determinant)
    spdlog::debug("spherical harmonic fit on {} nodes of kind {}: condition estimate {:.3g}",
                  nodes_.size(), to_string(nodes_.kind()), cond_);
}

Eigen::MatrixXd SphSystem::solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

namespace {
detail::FactorCache<SphSystem>& sph_cache() {
  static detail::FactorCache<SphSystem> cache(16);
  return cache;
}
}  // namespace

std::shared_ptr<const SphSystem> sph_system(const NodeSet3D& nodes, int degree) {
  return sph_cache().get(
      [&](const SphSystem& s) { return s.degree() == degree && s.nodes() == nodes; },
      [&] { return std::make_shared<const SphSystem>(nodes, degree); });
}

void clear_factorization_cache() {
  sph_cache().clear();
  detail::clear_rbf_cache();
}

SphInterpolant::SphInterpolant(int degree, Samples3D coeffs, double cond_estimate)
    : degree_(degree), coeffs_(std::move(coeffs)), cond_(cond_estimate) {
  if (coeffs_.rows() != sph_size(degree))
    throw InvalidArgument("coefficient count does not match degree");
}

SphInterpolant sph_fit(const NodeSet3D& nodes, const Samples3D& data, int degree) {
  if (data.rows() != static_cast<Eigen::Index>(nodes.size()))
    throw InvalidArgument("sph_fit: data rows do not match node count");
  const auto system = sph_system(nodes, degree);
  return {degree, system->solve(data), system->cond_estimate()};
}

Samples3D sph_eval(const SphInterpolant& p, const NodeSet3D& eval, Partial partial) {
  return sph_operator(eval, p.degree(), partial).matrix * p.coeffs();
}

Vec3 sph_eval(const SphInterpolant& p, double lambda, double theta, Partial partial) {
  return (sph_basis_row(lambda, theta, p.degree(), partial) * p.coeffs()).transpose();
}

int sph_degree_for(std::size_t n) {
  const auto root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  return static_cast<std::size_t>(root) * root == n && root >= 1 ? root - 1 : -1;
}

void write_coefficients_csv(std::ostream& out, const Eigen::MatrixXd& coeffs) {
  static constexpr const char* kNames[] = {"x", "y", "z"};
  out << "coordinate,index,value\n";
  char buf[64];
  for (Eigen::Index d = 0; d < coeffs.cols(); ++d) {
    for (Eigen::Index k = 0; k < coeffs.rows(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", coeffs(k, d));
      out << (d < 3 ? kNames[d] : std::to_string(d).c_str()) << ',' << k << ',' << buf << '\n';
    }
  }
}

}  // namespace membrane
