#include "membrane/rbf.hpp"

#include "cache.hpp"
#include "membrane/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>

namespace membrane {

namespace {

std::string format_cond(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", c);
  return buf;
}

// ψ and its λ-derivatives along the circle for Δ = λ − λ_k.
double circle_kernel(const RadialKernel& k, double delta, int order) {
  const double s = std::sin(0.5 * delta);
  const double t = 4.0 * s * s;
  switch (order) {
    case 0: return k.psi(t);
    case 1: return k.dpsi(t) * 2.0 * std::sin(delta);
    case 2: {
      const double tp = 2.0 * std::sin(delta);
      return k.d2psi(t) * tp * tp + k.dpsi(t) * 2.0 * std::cos(delta);
    }
  }
  throw InvalidArgument("derivative order must be 0, 1 or 2, got " + std::to_string(order));
}

// Unit vector at (λ, θ) and its partials needed for t = ‖u − u_k‖².
struct SphereFrame {
  Vec3 u, ul, ut, ull, ult, utt;
};

SphereFrame sphere_frame(double lambda, double theta) {
  const double cl = std::cos(lambda), sl = std::sin(lambda);
  const double ct = std::cos(theta), st = std::sin(theta);
  SphereFrame f;
  f.u = {cl * ct, sl * ct, st};
  f.ul = {-sl * ct, cl * ct, 0.0};
  f.ut = {-cl * st, -sl * st, ct};
  f.ull = {-cl * ct, -sl * ct, 0.0};
  f.ult = {sl * st, -cl * st, 0.0};
  f.utt = -f.u;
  return f;
}

double sphere_kernel(const RadialKernel& k, const SphereFrame& f, const Vec3& uk, Partial p) {
  const double t = (f.u - uk).squaredNorm();
  switch (p) {
    case Partial::val: return k.psi(t);
    case Partial::dl: return k.dpsi(t) * (-2.0 * f.ul.dot(uk));
    case Partial::dt: return k.dpsi(t) * (-2.0 * f.ut.dot(uk));
    case Partial::dll: {
      const double ta = -2.0 * f.ul.dot(uk);
      return k.d2psi(t) * ta * ta + k.dpsi(t) * (-2.0 * f.ull.dot(uk));
    }
    case Partial::dlt: {
      const double ta = -2.0 * f.ul.dot(uk), tb = -2.0 * f.ut.dot(uk);
      return k.d2psi(t) * ta * tb + k.dpsi(t) * (-2.0 * f.ult.dot(uk));
    }
    case Partial::dtt: {
      const double tb = -2.0 * f.ut.dot(uk);
      return k.d2psi(t) * tb * tb + k.dpsi(t) * (-2.0 * f.utt.dot(uk));
    }
  }
  return 0.0;
}

Samples2D circulant_solve(const NodeSet2D& nodes, const Samples2D& data, const RadialKernel& k,
                          double& cond) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double s = std::sin(kPi * j / n);
    row[j] = k.psi(4.0 * s * s);
  }
  thread_local Eigen::FFT<double> fft;  // keeps its plans across calls
  std::vector<std::complex<double>> mu;
  fft.fwd(mu, row);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& m : mu) {
    lo = std::min(lo, std::abs(m.real()));
    hi = std::max(hi, std::abs(m.real()));
  }
  cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxRbfCondition))
    throw SingularSystemError("RBF circulant system is numerically singular (condition estimate " +
                                  format_cond(cond) + "); increase epsilon",
                              cond);
  Samples2D coeffs(n, 2);
  std::vector<double> col(static_cast<std::size_t>(n)), back;
  std::vector<std::complex<double>> spec;
  for (int d = 0; d < 2; ++d) {
    for (int j = 0; j < n; ++j) col[j] = data(j, d);
    fft.fwd(spec, col);
    for (int j = 0; j < n; ++j) spec[j] /= mu[j].real();
    fft.inv(back, spec);
    for (int j = 0; j < n; ++j) coeffs(j, d) = back[j];
  }
  return coeffs;
}

detail::FactorCache<RbfSystem3D>& rbf_cache() {
  static detail::FactorCache<RbfSystem3D> cache(16);
  return cache;
}

}  // namespace

void detail::clear_rbf_cache() { rbf_cache().clear(); }

std::string_view to_string(KernelFamily f) { return f == KernelFamily::mq ? "mq" : "imq"; }

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "mq") return KernelFamily::mq;
  if (name == "imq") return KernelFamily::imq;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (known: mq, imq)");
}

RadialKernel::RadialKernel(KernelFamily family, double epsilon) : family_(family), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("shape parameter epsilon must be positive and finite");
}

double RadialKernel::psi(double t) const {
  const double u = 1.0 + epsilon_ * epsilon_ * t;
  return family_ == KernelFamily::mq ? std::sqrt(u) : 1.0 / std::sqrt(u);
}

double RadialKernel::dpsi(double t) const {
  const double e2 = epsilon_ * epsilon_;
  const double u = 1.0 + e2 * t;
  return family_ == KernelFamily::mq ? 0.5 * e2 / std::sqrt(u) : -0.5 * e2 / (u * std::sqrt(u));
}

double RadialKernel::d2psi(double t) const {
  const double e4 = epsilon_ * epsilon_ * epsilon_ * epsilon_;
  const double u = 1.0 + epsilon_ * epsilon_ * t;
  const double su = std::sqrt(u);
  return family_ == KernelFamily::mq ? -0.25 * e4 / (u * su) : 0.75 * e4 / (u * u * su);
}

double chordal_distance_circle(double lambda1, double lambda2) {
  return 2.0 * std::abs(std::sin(0.5 * (lambda1 - lambda2)));
}

double chordal_distance_sphere(SphericalPoint a, SphericalPoint b) {
  return std::min(2.0, (to_unit_vector(a) - to_unit_vector(b)).norm());
}

RbfInterpolant2D::RbfInterpolant2D(NodeSet2D nodes, RadialKernel kernel, Samples2D coeffs,
                                   double cond_estimate, SolverPath path)
    : nodes_(std::move(nodes)),
      kernel_(kernel),
      coeffs_(std::move(coeffs)),
      cond_(cond_estimate),
      path_(path) {}

RbfInterpolant3D::RbfInterpolant3D(NodeSet3D nodes, RadialKernel kernel, Samples3D coeffs,
                                   double cond_estimate)
    : nodes_(std::move(nodes)), kernel_(kernel), coeffs_(std::move(coeffs)), cond_(cond_estimate) {}

Eigen::MatrixXd rbf_system_matrix_2d(const NodeSet2D& nodes, const RadialKernel& kernel) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = kernel.psi(0.0);
    for (Eigen::Index j = i + 1; j < n; ++j)
      a(i, j) = a(j, i) = circle_kernel(kernel, nodes[i] - nodes[j], 0);
  }
  return a;
}

Eigen::MatrixXd rbf_system_matrix_3d(const NodeSet3D& nodes, const RadialKernel& kernel, Exec exec) {
  const auto& u = nodes.unit_vectors();
  const auto n = u.cols();
  Eigen::MatrixXd a(n, n);
  // Each row computes its full length; (i, j) and (j, i) evaluate the same
  // expression with the operands swapped, which is exact for ‖·‖².
  for_each_index(exec, n, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vec3 d = i < j ? Vec3(u.col(i) - u.col(j)) : Vec3(u.col(j) - u.col(i));
      a(i, j) = kernel.psi(d.squaredNorm());
    }
  });
  return a;
}

RbfInterpolant2D rbf_fit_2d(const NodeSet2D& nodes, const Samples2D& data,
                            const RadialKernel& kernel, SolverPath path) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  if (n < 1) throw InvalidArgument("rbf_fit_2d: no nodes");
  if (data.rows() != n) throw InvalidArgument("rbf_fit_2d: data rows do not match node count");
  if (path == SolverPath::automatic) path = nodes.is_equispaced() ? SolverPath::fft : SolverPath::dense;
  if (path == SolverPath::fft) {
    if (!nodes.is_equispaced()) throw InvalidArgument("rbf_fit_2d: FFT path needs equispaced nodes");
    double cond = 0.0;
    Samples2D coeffs = circulant_solve(nodes, data, kernel, cond);
    return {nodes, kernel, std::move(coeffs), cond, SolverPath::fft};
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(rbf_system_matrix_2d(nodes, kernel));
  const double cond = detail::condition_from_rcond(lu.rcond());
  if (!(cond <= kMaxRbfCondition))
    throw SingularSystemError("RBF system is numerically singular (condition estimate " +
                                  format_cond(cond) + "); increase epsilon",
                              cond);
  return {nodes, kernel, lu.solve(data), cond, SolverPath::dense};
}

RbfSystem3D::RbfSystem3D(NodeSet3D nodes, RadialKernel kernel)
    : nodes_(std::move(nodes)), kernel_(kernel) {
  if (nodes_.size() < 4) throw InvalidArgument("3D RBF fits need at least 4 nodes");
  Eigen::MatrixXd a = rbf_system_matrix_3d(nodes_, kernel_, Exec::serial);
  if (kernel_.family() == KernelFamily::imq) {
    llt_.emplace(a);
    if (llt_->info() != Eigen::Success)
      throw SingularSystemError("IMQ kernel matrix is not numerically positive definite; "
                                "increase epsilon",
                                std::numeric_limits<double>::infinity());
    cond_ = detail::condition_from_rcond(llt_->rcond());
  } else {
    lu_.emplace(a);
    cond_ = detail::condition_from_rcond(lu_->rcond());
  }
  if (!(cond_ <= kMaxRbfCondition))
    throw SingularSystemError("RBF system is numerically singular (condition estimate " +
                                  format_cond(cond_) + "); increase epsilon",
                              cond_);
}

Eigen::MatrixXd RbfSystem3D::solve(const Eigen::MatrixXd& rhs) const {
  return llt_ ? Eigen::MatrixXd(llt_->solve(rhs)) : Eigen::MatrixXd(lu_->solve(rhs));
}

std::shared_ptr<const RbfSystem3D> rbf_system_3d(const NodeSet3D& nodes, const RadialKernel& kernel) {
  return rbf_cache().get(
      [&](const RbfSystem3D& s) { return s.kernel() == kernel && s.nodes() == nodes; },
      [&] { return std::make_shared<const RbfSystem3D>(nodes, kernel); });
}

RbfInterpolant3D rbf_fit_3d(const NodeSet3D& nodes, const Samples3D& data,
                            const RadialKernel& kernel) {
  if (data.rows() != static_cast<Eigen::Index>(nodes.size()))
    throw InvalidArgument("rbf_fit_3d: data rows do not match node count");
  const auto system = rbf_system_3d(nodes, kernel);
  return {nodes, kernel, system->solve(data), system->cond_estimate()};
}

OperatorMatrix rbf_operator_2d(std::span<const double> lambdas, const NodeSet2D& nodes,
                               const RadialKernel& kernel, int order, Exec exec) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  OperatorMatrix op{Eigen::MatrixXd(static_cast<Eigen::Index>(lambdas.size()), n),
                    curve_partial(order), Basis::rbf_circle};
  for_each_index(exec, static_cast<std::ptrdiff_t>(lambdas.size()), [&](std::ptrdiff_t i) {
    for (Eigen::Index k = 0; k < n; ++k)
      op.matrix(i, k) = circle_kernel(kernel, lambdas[i] - nodes[k], order);
  });
  return op;
}

OperatorMatrix rbf_operator_3d(const NodeSet3D& eval, const NodeSet3D& nodes,
                               const RadialKernel& kernel, Partial partial, Exec exec) {
  const auto& u = nodes.unit_vectors();
  OperatorMatrix op{Eigen::MatrixXd(static_cast<Eigen::Index>(eval.size()), u.cols()), partial,
                    Basis::rbf_sphere};
  for_each_index(exec, static_cast<std::ptrdiff_t>(eval.size()), [&](std::ptrdiff_t i) {
    const auto f = sphere_frame(eval[i].lambda, eval[i].theta);
    for (Eigen::Index k = 0; k < u.cols(); ++k)
      op.matrix(i, k) = sphere_kernel(kernel, f, u.col(k), partial);
  });
  return op;
}

Samples2D rbf_eval_2d(const RbfInterpolant2D& s, const NodeSet2D& eval, int order) {
  return rbf_operator_2d(eval.angles(), s.nodes(), s.kernel(), order).matrix * s.coeffs();
}

Vec2 rbf_eval_2d(const RbfInterpolant2D& s, double lambda, int order) {
  const double l[] = {lambda};
  return (rbf_operator_2d(l, s.nodes(), s.kernel(), order, Exec::serial).matrix * s.coeffs())
      .transpose();
}

Samples3D rbf_eval_3d(const RbfInterpolant3D& s, const NodeSet3D& eval, Partial partial) {
  return rbf_operator_3d(eval, s.nodes(), s.kernel(), partial).matrix * s.coeffs();
}

Vec3 rbf_eval_3d(const RbfInterpolant3D& s, double lambda, double theta, Partial partial) {
  const auto f = sphere_frame(lambda, theta);
  const auto& u = s.nodes().unit_vectors();
  Vec3 out = Vec3::Zero();
  for (Eigen::Index k = 0; k < u.cols(); ++k)
    out += sphere_kernel(s.kernel(), f, u.col(k), partial) * s.coeffs().row(k).transpose();
  return out;
}

std::vector<EpsilonGap> epsilon_limit_gap(const NodeSet2D& nodes, const Samples2D& data,
                                          std::span<const double> epsilons, int grid) {
  if (!nodes.is_equispaced()) throw InvalidArgument("epsilon_limit_gap needs equispaced nodes");
  if (nodes.size() > 12) throw InvalidArgument("epsilon_limit_gap needs n <= 12");
  if (grid < 1) throw InvalidArgument("epsilon_limit_gap: grid must be positive");
  const auto trig = trig_fit(nodes, data);
  std::vector<double> dense(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) dense[i] = kPi * (static_cast<double>(2 * (i + 1) - grid) / grid);
  const Samples2D p = trig_operator(dense, trig.size(), 0, Exec::serial).matrix * trig.coeffs();

  std::vector<EpsilonGap> out;
  for (double eps : epsilons) {
    EpsilonGap row{eps, std::numeric_limits<double>::quiet_NaN(), 0.0, {}};
    try {
      const auto s = rbf_fit_2d(nodes, data, RadialKernel(KernelFamily::mq, eps));
      row.cond_estimate = s.cond_estimate();
      const Samples2D v =
          rbf_operator_2d(dense, s.nodes(), s.kernel(), 0, Exec::serial).matrix * s.coeffs();
      row.gap = (v - p).rowwise().norm().maxCoeff();
    } catch (const Error& e) {
      row.error = e.what();
      if (const auto* se = dynamic_cast<const SingularSystemError*>(&e))
        row.cond_estimate = se->cond_estimate();
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace membrane
