#include "membrane/points.hpp"

#include "membrane/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace membrane {

namespace {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

// 53 random bits mapped to [0, 1); avoids the implementation-defined
// std::uniform_real_distribution so seeds give the same sets everywhere.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void normalize_columns(Eigen::Matrix3Xd& p) {
  for (Eigen::Index i = 0; i < p.cols(); ++i) p.col(i).normalize();
}

std::vector<SphericalPoint> to_spherical(const Eigen::Matrix3Xd& p) {
  std::vector<SphericalPoint> out(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index i = 0; i < p.cols(); ++i) out[i] = from_unit_vector(p.col(i));
  return out;
}

}  // namespace

NodeSet2D::NodeSet2D(std::vector<double> angles) : angles_(std::move(angles)) {
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double a = angles_[i];
    if (!(a > -kPi && a <= kPi))
      throw ValidationError("node angle " + std::to_string(i) + " outside (-pi, pi]");
    if (i > 0 && !(a > angles_[i - 1]))
      throw ValidationError("node angles must be strictly increasing (index " +
                            std::to_string(i) + ")");
  }
}

NodeSet2D equispaced_circle(int n) {
  if (n < 4 || n % 2 != 0)
    throw InvalidArgument("equispaced_circle: n must be even and >= 4, got " + std::to_string(n));
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) angles[k - 1] = kPi * (static_cast<double>(2 * k - n) / n);
  NodeSet2D set(std::move(angles));
  set.equispaced_ = true;
  return set;
}

Vec3 to_unit_vector(SphericalPoint p) {
  const double ct = std::cos(p.theta);
  return {std::cos(p.lambda) * ct, std::sin(p.lambda) * ct, std::sin(p.theta)};
}

SphericalPoint from_unit_vector(const Vec3& u) {
  double lambda = std::atan2(u.y(), u.x());
  if (lambda <= -kPi) lambda = kPi;
  const double theta = std::atan2(u.z(), std::hypot(u.x(), u.y()));
  return {lambda, theta};
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::minimal_energy: return "minimal-energy";
    case NodeKind::maximal_determinant: return "maximal-determinant";
    case NodeKind::fibonacci: return "fibonacci";
    case NodeKind::loaded: return "loaded";
  }
  return "?";
}

NodeSet3D::NodeSet3D(std::vector<SphericalPoint> points, NodeKind kind)
    : points_(std::move(points)), kind_(kind), unit_(3, static_cast<Eigen::Index>(points_.size())) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.lambda > -kPi && p.lambda <= kPi))
      throw ValidationError("point " + std::to_string(i) + ": lambda outside (-pi, pi]");
    if (!(p.theta >= -kPi / 2 && p.theta <= kPi / 2))
      throw ValidationError("point " + std::to_string(i) + ": theta outside [-pi/2, pi/2]");
    unit_.col(static_cast<Eigen::Index>(i)) = to_unit_vector(p);
  }
  // Coincident unit vectors are exactly the zero-distance pairs; a sort finds
  // them without the quadratic scan.
  std::vector<Eigen::Index> order(points_.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto key = [&](Eigen::Index i) {
    return std::array<double, 3>{unit_(0, i), unit_(1, i), unit_(2, i)};
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (key(order[k]) == key(order[k - 1]))
      throw ValidationError("points " + std::to_string(order[k - 1]) + " and " +
                            std::to_string(order[k]) + " coincide");
  }
}

double min_chordal_distance(const NodeSet3D& set) {
  if (set.size() < 2) throw InvalidArgument("min_chordal_distance needs at least 2 points");
  const auto& u = set.unit_vectors();
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < u.cols(); ++i)
    for (Eigen::Index j = i + 1; j < u.cols(); ++j) best = std::min(best, (u.col(i) - u.col(j)).norm());
  return best;
}

double riesz_energy(const Eigen::Matrix3Xd& p, Exec exec) {
  const Eigen::Index n = p.cols();
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  for_each_index(exec, n, [&](std::ptrdiff_t i) {
    double e = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) e += 1.0 / (p.col(i) - p.col(j)).norm();
    row[i] = e;
  });
  return 0.5 * std::accumulate(row.begin(), row.end(), 0.0);
}

double riesz_energy_and_gradient(const Eigen::Matrix3Xd& p, Eigen::Matrix3Xd& g, Exec exec) {
  const Eigen::Index n = p.cols();
  g.resize(3, n);
  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  const double* x = p.data();
  for_each_index(exec, n, [&](std::ptrdiff_t i) {
    const double xi = x[3 * i], yi = x[3 * i + 1], zi = x[3 * i + 2];
    double e = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
    auto accumulate_range = [&](Eigen::Index begin, Eigen::Index end) {
      for (Eigen::Index j = begin; j < end; ++j) {
        const double dx = xi - x[3 * j], dy = yi - x[3 * j + 1], dz = zi - x[3 * j + 2];
        const double inv_r = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
        const double inv_r3 = inv_r * inv_r * inv_r;
        e += inv_r;
        gx -= dx * inv_r3;
        gy -= dy * inv_r3;
        gz -= dz * inv_r3;
      }
    };
    accumulate_range(0, i);
    accumulate_range(i + 1, n);
    const double radial = gx * xi + gy * yi + gz * zi;
    g(0, i) = gx - radial * xi;
    g(1, i) = gy - radial * yi;
    g(2, i) = gz - radial * zi;
    row[i] = e;
  });
  return 0.5 * std::accumulate(row.begin(), row.end(), 0.0);
}

MinimalEnergyResult minimal_energy_sphere(int n, std::uint64_t seed, int max_iters, double tol,
                                          Exec exec) {
  if (n < 2) throw InvalidArgument("minimal_energy_sphere: n must be >= 2");
  if (max_iters < 0) throw InvalidArgument("minimal_energy_sphere: max_iters must be >= 0");

  std::mt19937_64 rng(seed);
  Eigen::Matrix3Xd p(3, n);
  for (int i = 0; i < n; ++i) {
    const double z = 2.0 * unit_uniform(rng) - 1.0;
    const double phi = 2.0 * kPi * unit_uniform(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    p.col(i) = Vec3(r * std::cos(phi), r * std::sin(phi), z);
  }

  Eigen::Matrix3Xd g, trial, trial_g;
  double energy = riesz_energy_and_gradient(p, g, exec);
  double gmax = g.colwise().norm().maxCoeff();
  double step = 0.1 / std::max(gmax, 1e-300);

  MinimalEnergyResult result{NodeSet3D({}, NodeKind::minimal_energy)};
  int it = 0;
  bool stalled = false;
  // Nonmonotone Armijo test against the largest of the last few energies,
  // the usual companion of Barzilai–Borwein steps.
  constexpr std::size_t kMemory = 10;
  std::vector<double> recent{energy};
  for (; it < max_iters && gmax > tol; ++it) {
    const double g2 = g.squaredNorm();
    const double reference = *std::max_element(recent.begin(), recent.end());
    bool accepted = false;
    double trial_energy = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      trial = p - step * g;
      normalize_columns(trial);
      trial_energy = riesz_energy_and_gradient(trial, trial_g, exec);
      if (trial_energy <= reference - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    const Eigen::Matrix3Xd s = trial - p;
    const double sy = (s.array() * (trial_g - g).array()).sum();
    const double ss = s.squaredNorm();
    step = sy > 0.0 ? ss / sy : 2.0 * step;

    p.swap(trial);
    g.swap(trial_g);
    energy = trial_energy;
    if (recent.size() == kMemory) recent.erase(recent.begin());
    recent.push_back(energy);
    gmax = g.colwise().norm().maxCoeff();
  }

  result.nodes = NodeSet3D(to_spherical(p), NodeKind::minimal_energy);
  result.energy = riesz_energy(result.nodes.unit_vectors(), exec);
  result.gradient_norm = gmax;
  result.iterations = it;
  result.converged = gmax <= tol && !stalled;
  return result;
}

NodeSet3D fibonacci_sphere(int n) {
  if (n < 1) throw InvalidArgument("fibonacci_sphere: n must be >= 1");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<SphericalPoint> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    pts[i] = {wrap_angle(golden * i), std::asin(z)};
  }
  return NodeSet3D(std::move(pts), NodeKind::fibonacci);
}

void save_point_set(const NodeSet3D& set, const std::filesystem::path& path, PointFormat format) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  char buf[96];
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (format == PointFormat::angles) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", set[i].lambda, set[i].theta);
    } else {
      const Vec3 u = set.unit_vectors().col(static_cast<Eigen::Index>(i));
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", u.x(), u.y(), u.z());
    }
    out << buf;
  }
  if (!out) throw InvalidArgument("failed writing " + path.string());
}

NodeSet3D load_point_set(const std::filesystem::path& path, PointFormat format, NodeKind kind) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open point set " + path.string());
  const std::size_t expected = format == PointFormat::angles ? 2 : 3;
  std::vector<SphericalPoint> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError(line_no, "not a number: '" + token + "'");
      values.push_back(v);
    }
    if (values.size() != expected)
      throw ParseError(line_no, "expected " + std::to_string(expected) + " values, got " +
                                    std::to_string(values.size()));
    if (format == PointFormat::angles) {
      pts.push_back({values[0], values[1]});
    } else {
      Vec3 u(values[0], values[1], values[2]);
      const double norm = u.norm();
      if (std::abs(norm - 1.0) > 1e-6)
        throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                              ": vector is not unit length (norm " + std::to_string(norm) + ")");
      pts.push_back(from_unit_vector(u / norm));
    }
  }
  return NodeSet3D(std::move(pts), kind);
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("MEMBRANE_CACHE_DIR"); env && *env) return env;
  return ".membrane_cache";
}

std::string minimal_energy_file_name(int n, std::uint64_t seed) {
  return "me_" + std::to_string(n) + "_" + std::to_string(seed) + ".txt";
}

NodeSet3D cached_minimal_energy(int n, std::uint64_t seed, const std::filesystem::path& cache_dir) {
  const auto path = cache_dir / minimal_energy_file_name(n, seed);
  if (std::filesystem::exists(path))
    return load_point_set(path, PointFormat::angles, NodeKind::minimal_energy);
  auto result = minimal_energy_sphere(n, seed);
  std::filesystem::create_directories(cache_dir);
  // Write then rename so concurrent readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&result));
  save_point_set(result.nodes, tmp, PointFormat::angles);
  std::filesystem::rename(tmp, path);
  return result.nodes;
}

}  // namespace membrane
