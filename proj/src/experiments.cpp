#include "membrane/experiments.hpp"

#include "membrane/errors.hpp"
#include "membrane/fourier.hpp"
#include "membrane/mechanics.hpp"
#include "membrane/points.hpp"
#include "membrane/pwl.hpp"
#include "membrane/shapes.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <tuple>

namespace membrane {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const MaterialParams& study_params() {
  static const MaterialParams p(kStudyK0, kStudyGamma);
  return p;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

template <class Config>
void check_object(const Config& c) {
  const bool custom = c.dimension == 2 ? c.custom_2d.has_value() : c.custom_3d.has_value();
  if (custom) {
    if (c.object.empty() || c.object.find_first_of(",\n\"") != std::string::npos)
      bad_field("object", "custom object label must be non-empty CSV-safe text");
  } else if (c.object != "object1" && c.object != "object2") {
    bad_field("object", "unknown object '" + c.object + "' (known: object1, object2)");
  }
}

template <class Config>
TestObject2D resolve_2d(const Config& c) {
  return c.custom_2d ? *c.custom_2d : object_2d_preset(c.object);
}

template <class Config>
TestObject3D resolve_3d(const Config& c) {
  return c.custom_3d ? *c.custom_3d : object_3d_preset(c.object);
}

void check_dimension(int dim) {
  if (dim != 2 && dim != 3) bad_field("dimension", "must be 2 or 3, got " + std::to_string(dim));
}

void check_count(const std::string& field, int n, int dim) {
  if (n < 4) bad_field(field, "must be at least 4, got " + std::to_string(n));
  if (dim == 2 && n % 2 != 0) bad_field(field, "must be even in 2D, got " + std::to_string(n));
}

void check_epsilon(const std::string& field, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) bad_field(field, "must be positive and finite");
}

std::filesystem::path cache_or_default(const std::filesystem::path& p) {
  return p.empty() ? default_cache_dir() : p;
}

// Positions, unit normals and forces at a set of sites, one row each.
struct Fields {
  Eigen::MatrixXd x, normal, force;
};

Fields fields_2d(const Eigen::MatrixXd& x, const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2) {
  Fields f{x, {}, {}};
  normals_and_forces_2d(d1, d2, study_params(), f.normal, f.force);
  return f;
}

Fields fields_3d(const std::array<Eigen::MatrixXd, 6>& p) {
  const Eigen::Index m = p[0].rows();
  Fields f{p[0], Eigen::MatrixXd(m, 3), Eigen::MatrixXd(m, 3)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const Jet3D j{p[0].row(i).transpose(), p[1].row(i).transpose(), p[2].row(i).transpose(),
                  p[3].row(i).transpose(), p[4].row(i).transpose(), p[5].row(i).transpose()};
    f.normal.row(i) = frame_3d(j).normal_unit.transpose();
    f.force.row(i) = surface_tension_force(j, study_params()).transpose();
  }
  return f;
}

Fields truth_2d(const TestObject2D& obj, const NodeSet2D& sites, Exec exec) {
  const auto jets = reference_jets_2d(obj, sites.angles(), exec);
  const Eigen::Index m = static_cast<Eigen::Index>(jets.size());
  Eigen::MatrixXd x(m, 2), d1(m, 2), d2(m, 2);
  for (Eigen::Index i = 0; i < m; ++i) {
    x.row(i) = jets[i].jet.x.transpose();
    d1.row(i) = jets[i].jet.d1.transpose();
    d2.row(i) = jets[i].jet.d2.transpose();
  }
  return fields_2d(x, d1, d2);
}

Fields truth_3d(const TestObject3D& obj, const NodeSet3D& sites, Exec exec) {
  const auto jets = reference_jets_3d(obj, sites.points(), exec);
  const Eigen::Index m = static_cast<Eigen::Index>(jets.size());
  std::array<Eigen::MatrixXd, 6> p;
  for (auto& a : p) a.resize(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& j = jets[i].jet;
    p[0].row(i) = j.x.transpose();
    p[1].row(i) = j.dl.transpose();
    p[2].row(i) = j.dt.transpose();
    p[3].row(i) = j.dll.transpose();
    p[4].row(i) = j.dlt.transpose();
    p[5].row(i) = j.dtt.transpose();
  }
  return fields_3d(p);
}

Samples2D sample_2d(const TestObject2D& obj, const NodeSet2D& nodes) {
  Samples2D d(nodes.size(), 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) d.row(i) = eval_object_2d(obj, nodes[i]).transpose();
  return d;
}

Samples3D sample_3d(const TestObject3D& obj, const NodeSet3D& nodes) {
  Samples3D d(nodes.size(), 3);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    d.row(i) = eval_object_3d(obj, nodes[i].lambda, nodes[i].theta).transpose();
  return d;
}

std::optional<NodeSet3D> load_md(const std::filesystem::path& dir, int n) {
  if (dir.empty()) return std::nullopt;
  const auto path = dir / ("md_" + std::to_string(n) + ".txt");
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto set = load_point_set(path, PointFormat::unit_vectors, NodeKind::maximal_determinant);
  if (static_cast<int>(set.size()) != n)
    throw ValidationError(path.string() + " holds " + std::to_string(set.size()) + " points, expected " +
                          std::to_string(n));
  return set;
}

struct Fit {
  Fields fields;
  double cond = kNaN;
};

Fit fit_2d(Model model, const TestObject2D& obj, int n, const NodeSet2D& sites,
           const RadialKernel& kernel) {
  const auto nodes = equispaced_circle(n);
  const auto data = sample_2d(obj, nodes);
  std::array<Eigen::MatrixXd, 3> d;
  double cond;
  if (model == Model::fourier) {
    const auto p = trig_fit(nodes, data);
    for (int k = 0; k < 3; ++k) d[k] = trig_operator(sites.angles(), n, k, Exec::serial).matrix * p.coeffs();
    cond = p.cond_estimate();
  } else {
    const auto s = rbf_fit_2d(nodes, data, kernel);
    for (int k = 0; k < 3; ++k)
      d[k] = rbf_operator_2d(sites.angles(), nodes, kernel, k, Exec::serial).matrix * s.coeffs();
    cond = s.cond_estimate();
  }
  return {fields_2d(d[0], d[1], d[2]), cond};
}

Fit fit_3d(Model model, const TestObject3D& obj, const NodeSet3D& nodes, const NodeSet3D& sites,
           const RadialKernel& kernel) {
  const auto data = sample_3d(obj, nodes);
  std::array<Eigen::MatrixXd, 6> d;
  double cond;
  if (model == Model::fourier) {
    const int degree = sph_degree_for(nodes.size());
    if (degree < 0)
      throw InvalidArgument("spherical harmonic model needs a square node count, got " +
                            std::to_string(nodes.size()));
    const auto p = sph_fit(nodes, data, degree);
    for (int k = 0; k < 6; ++k)
      d[k] = sph_operator(sites, degree, kAllPartials[k], Exec::serial).matrix * p.coeffs();
    cond = p.cond_estimate();
  } else {
    const auto s = rbf_fit_3d(nodes, data, kernel);
    for (int k = 0; k < 6; ++k)
      d[k] = rbf_operator_3d(sites, nodes, kernel, kAllPartials[k], Exec::serial).matrix * s.coeffs();
    cond = s.cond_estimate();
  }
  return {fields_3d(d), cond};
}

// PWL normals and forces at the IB points (the sample sites themselves).
// Spring forces are divided by Δλ² so they approximate K0 ∂²x/∂λ².
Fields pwl_2d(const Fields& truth) {
  const Eigen::Index m = truth.x.rows();
  std::vector<Vec2> pts(m);
  for (Eigen::Index i = 0; i < m; ++i) pts[i] = truth.x.row(i).transpose();
  const ClosedPolyline curve(std::move(pts));
  const auto normals = pwl_normals_2d(curve, Exec::serial);
  const auto forces = spring_force_2d(curve, kStudyK0);
  const double dl = 2 * kPi / static_cast<double>(m);
  Fields f{truth.x, Eigen::MatrixXd(m, 2), Eigen::MatrixXd(m, 2)};
  for (Eigen::Index i = 0; i < m; ++i) {
    f.normal.row(i) = normals[i].transpose();
    f.force.row(i) = forces[i].transpose() / (dl * dl);
  }
  return f;
}

Fields pwl_3d(const Fields& truth, const NodeSet3D& sites) {
  const Eigen::Index m = truth.x.rows();
  std::vector<Vec3> pts(m), dirs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    pts[i] = truth.x.row(i).transpose();
    dirs[i] = sites.unit_vectors().col(i);
  }
  const auto mesh = triangulate_sphere_like(pts, dirs);
  const auto normals = vertex_normals_angle_weighted(mesh, Exec::serial);
  Fields f{truth.x, Eigen::MatrixXd(m, 3), Eigen::MatrixXd::Constant(m, 3, kNaN)};
  for (Eigen::Index i = 0; i < m; ++i) f.normal.row(i) = normals[i].transpose();
  return f;
}

const Eigen::MatrixXd& field(const Fields& f, Quantity q) {
  switch (q) {
    case Quantity::shape: return f.x;
    case Quantity::normal: return f.normal;
    default: return f.force;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::pwl: return "pwl";
    case Model::fourier: return "fourier";
    default: return "rbf";
  }
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::shape: return "shape";
    case Quantity::normal: return "normal";
    default: return "force";
  }
}

Model parse_model(std::string_view name) {
  if (name == "pwl") return Model::pwl;
  if (name == "fourier") return Model::fourier;
  if (name == "rbf") return Model::rbf;
  throw ConfigError("unknown model '" + std::string(name) + "' (known: pwl, fourier, rbf)");
}

Quantity parse_quantity(std::string_view name) {
  if (name == "shape") return Quantity::shape;
  if (name == "normal") return Quantity::normal;
  if (name == "force") return Quantity::force;
  throw ConfigError("unknown quantity '" + std::string(name) + "' (known: shape, normal, force)");
}

void StudyConfig::validate() const {
  check_dimension(dimension);
  check_object(*this);
  if (models.empty()) bad_field("models", "empty");
  if (quantities.empty()) bad_field("quantities", "empty");
  if (n_list.empty()) bad_field("n_list", "empty");
  for (int n : n_list) check_count("n_list", n, dimension);
  check_count("m", m, dimension);
  if (m < *std::max_element(n_list.begin(), n_list.end())) bad_field("m", "must be >= max(n_list)");
  check_epsilon("epsilon", epsilon);
}

void SweepConfig::validate() const {
  check_dimension(dimension);
  check_object(*this);
  check_count("n", n, dimension);
  check_count("m", m, dimension);
  if (epsilons.empty()) bad_field("epsilons", "empty epsilon grid");
  for (double e : epsilons) check_epsilon("epsilons", e);
}

void TimingConfig::validate() const {
  check_dimension(dimension);
  check_object(*this);
  check_count("n", n, dimension);
  check_count("m", m, dimension);
  check_epsilon("epsilon", epsilon);
  if (trials < 1) bad_field("trials", "must be at least 1, got " + std::to_string(trials));
  if (warmup < 0) bad_field("warmup", "must be >= 0");
}

const ErrorRow* ErrorReport::find(Model model, int n, Quantity quantity) const {
  for (const auto& r : rows)
    if (r.model == model && r.n == n && r.quantity == quantity) return &r;
  return nullptr;
}

double max_two_norm_error(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& truth) {
  if (approx.rows() != truth.rows() || approx.cols() != truth.cols())
    throw InvalidArgument("max_two_norm_error: shape mismatch");
  if (approx.rows() == 0) return 0.0;
  return (approx - truth).rowwise().norm().maxCoeff();
}

ErrorReport convergence_study(const StudyConfig& cfg, Exec exec) {
  cfg.validate();
  const auto cache = cache_or_default(cfg.cache_dir);
  const RadialKernel kernel(cfg.kernel, cfg.epsilon);

  struct Task {
    Model model;
    int n;
  };
  std::vector<Task> tasks;
  for (Model model : cfg.models) {
    if (model == Model::pwl) {
      tasks.push_back({model, cfg.m});
      continue;
    }
    for (int n : cfg.n_list) tasks.push_back({model, n});
  }

  std::vector<Fit> fits(tasks.size());
  std::vector<std::string> status(tasks.size(), "ok");
  auto run = [&](auto&& fit_one) {
    for_each_index(exec, static_cast<std::ptrdiff_t>(tasks.size()), [&](std::ptrdiff_t i) {
      try {
        fits[i] = fit_one(tasks[i]);
      } catch (const Error& e) {
        status[i] = e.kind();
        if (const auto* se = dynamic_cast<const SingularSystemError*>(&e)) fits[i].cond = se->cond_estimate();
      }
    });
  };

  Fields truth;
  if (cfg.dimension == 2) {
    const auto obj = resolve_2d(cfg);
    const auto sites = equispaced_circle(cfg.m);
    truth = truth_2d(obj, sites, exec);
    run([&](const Task& t) -> Fit {
      if (t.model == Model::pwl) return {pwl_2d(truth), kNaN};
      return fit_2d(t.model, obj, t.n, sites, kernel);
    });
  } else {
    const auto obj = resolve_3d(cfg);
    const auto sites = cached_minimal_energy(cfg.m, cfg.seed, cache);
    truth = truth_3d(obj, sites, exec);
    // Node sets first, one per distinct N, so no file is generated twice.
    std::vector<int> ns;
    for (const auto& t : tasks)
      if (t.model != Model::pwl) ns.push_back(t.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<std::optional<NodeSet3D>> me(ns.size()), md(ns.size());
    for_each_index(exec, static_cast<std::ptrdiff_t>(ns.size()), [&](std::ptrdiff_t i) {
      me[i] = cached_minimal_energy(ns[i], cfg.seed, cache);
      md[i] = load_md(cfg.md_dir, ns[i]);
    });
    auto index_of = [&](int n) { return std::lower_bound(ns.begin(), ns.end(), n) - ns.begin(); };
    run([&](const Task& t) -> Fit {
      if (t.model == Model::pwl) return {pwl_3d(truth, sites), kNaN};
      const auto k = index_of(t.n);
      const NodeSet3D& nodes = (t.model == Model::fourier && md[k]) ? *md[k] : *me[k];
      return fit_3d(t.model, obj, nodes, sites, kernel);
    });
  }

  ErrorReport report{cfg, {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    for (Quantity q : cfg.quantities) {
      if (t.model == Model::pwl && (q == Quantity::shape || (q == Quantity::force && cfg.dimension == 3)))
        continue;
      ErrorRow row;
      row.dimension = cfg.dimension;
      row.object = cfg.object;
      row.model = t.model;
      row.n = t.n;
      row.m = cfg.m;
      row.epsilon = t.model == Model::rbf ? cfg.epsilon : kNaN;
      row.quantity = q;
      row.cond_estimate = fits[i].cond;
      row.status = status[i];
      row.max_error = status[i] == "ok" ? max_two_norm_error(field(fits[i].fields, q), field(truth, q)) : kNaN;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("logspace: count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return out;
}

std::vector<SweepRow> shape_param_sweep(const SweepConfig& cfg, Exec exec) {
  cfg.validate();
  std::vector<SweepRow> rows(cfg.epsilons.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = {cfg.object, cfg.n, cfg.m, cfg.epsilons[i], kNaN, kNaN};

  auto run = [&](auto&& error_for) {
    for_each_index(exec, static_cast<std::ptrdiff_t>(rows.size()), [&](std::ptrdiff_t i) {
      try {
        const RadialKernel kernel(cfg.kernel, rows[i].epsilon);
        std::tie(rows[i].max_error, rows[i].cond_estimate) = error_for(kernel);
      } catch (const SingularSystemError& e) {
        rows[i].cond_estimate = e.cond_estimate();
      }
    });
  };

  if (cfg.dimension == 2) {
    const auto obj = resolve_2d(cfg);
    const auto nodes = equispaced_circle(cfg.n);
    const auto sites = equispaced_circle(cfg.m);
    const auto data = sample_2d(obj, nodes);
    const auto truth = sample_2d(obj, sites);
    run([&](const RadialKernel& k) {
      const auto s = rbf_fit_2d(nodes, data, k);
      const Eigen::MatrixXd x = rbf_operator_2d(sites.angles(), nodes, k, 0, Exec::serial).matrix * s.coeffs();
      return std::pair{max_two_norm_error(x, truth), s.cond_estimate()};
    });
  } else {
    const auto cache = cache_or_default(cfg.cache_dir);
    const auto obj = resolve_3d(cfg);
    const auto nodes = cached_minimal_energy(cfg.n, cfg.seed, cache);
    const auto sites = cached_minimal_energy(cfg.m, cfg.seed, cache);
    const auto data = sample_3d(obj, nodes);
    const auto truth = sample_3d(obj, sites);
    run([&](const RadialKernel& k) {
      // Solve directly: a sweep never reuses a factorization.
      const RbfSystem3D system(nodes, k);
      const Eigen::MatrixXd c = system.solve(data);
      const Eigen::MatrixXd x = rbf_operator_3d(sites, nodes, k, Partial::val, Exec::serial).matrix * c;
      return std::pair{max_two_norm_error(x, truth), system.cond_estimate()};
    });
  }
  return rows;
}

TimingRow summarize_trials(std::span<const double> seconds) {
  if (seconds.empty()) throw InvalidArgument("summarize_trials: no trials");
  const double n = static_cast<double>(seconds.size());
  const double mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / n;
  double var = 0.0;
  for (double s : seconds) var += (s - mean) * (s - mean);
  std::vector<double> sorted(seconds.begin(), seconds.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  TimingRow row;
  row.trials = static_cast<int>(seconds.size());
  row.mean_s = mean;
  row.stddev_s = std::sqrt(var / n);
  row.median_s = median;
  return row;
}

TimingRow timing_bench(const TimingConfig& cfg) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  static volatile double sink = 0.0;
  std::function<void()> pipeline;

  // Everything captured below is set up outside the timed region.
  if (cfg.dimension == 2) {
    const auto obj = resolve_2d(cfg);
    const auto sites = equispaced_circle(cfg.m);
    if (cfg.model == Model::pwl) {
      const ClosedPolyline curve([&] {
        std::vector<Vec2> pts;
        for (double l : sites.angles()) pts.push_back(eval_object_2d(obj, l));
        return pts;
      }());
      pipeline = [curve] {
        const auto n = pwl_normals_2d(curve, Exec::serial);
        const auto f = spring_force_2d(curve, kStudyK0);
        sink = sink + n.back().x() + f.back().y();
      };
    } else {
      const auto nodes = equispaced_circle(cfg.n);
      const Samples2D data = sample_2d(obj, nodes);
      const RadialKernel kernel(cfg.kernel, cfg.epsilon);
      // Value, first and second derivative operators stacked into one matrix.
      struct Buffers {
        Eigen::MatrixXd ops, out, normal, force;
      };
      auto buf = std::make_shared<Buffers>();
      buf->ops.resize(3 * cfg.m, cfg.n);
      for (int k = 0; k < 3; ++k)
        buf->ops.middleRows(k * cfg.m, cfg.m) =
            cfg.model == Model::fourier
                ? trig_operator(sites.angles(), cfg.n, k, Exec::serial).matrix
                : rbf_operator_2d(sites.angles(), nodes, kernel, k, Exec::serial).matrix;
      buf->out.resize(3 * cfg.m, 2);
      const int m = cfg.m;
      std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
      if (cfg.model == Model::rbf)
        lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXd>>(rbf_system_matrix_2d(nodes, kernel));
      pipeline = [=] {
        const Eigen::MatrixXd c = lu ? Eigen::MatrixXd(lu->solve(data))
                                     : Eigen::MatrixXd(trig_fit(nodes, data, SolverPath::fft).coeffs());
        buf->out.noalias() = buf->ops * c;
        normals_and_forces_2d(buf->out.middleRows(m, m), buf->out.bottomRows(m), study_params(),
                              buf->normal, buf->force);
        sink = sink + buf->force(0, 0) + buf->out(0, 0);
      };
    }
  } else {
    const auto cache = cache_or_default(cfg.cache_dir);
    const auto obj = resolve_3d(cfg);
    const auto sites = cached_minimal_energy(cfg.m, cfg.seed, cache);
    if (cfg.model == Model::pwl) {
      std::vector<Vec3> pts, dirs;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        pts.push_back(eval_object_3d(obj, sites[i].lambda, sites[i].theta));
        dirs.push_back(sites.unit_vectors().col(static_cast<Eigen::Index>(i)));
      }
      const auto mesh = std::make_shared<TriMesh>(triangulate_sphere_like(pts, dirs));
      pipeline = [mesh] {
        const auto n = vertex_normals_angle_weighted(*mesh, Exec::serial);
        const auto f = spring_force_3d(*mesh, kStudyK0);
        sink = sink + n.back().x() + f.back().y();
      };
    } else {
      const auto nodes = cached_minimal_energy(cfg.n, cfg.seed, cache);
      const Samples3D data = sample_3d(obj, nodes);
      const RadialKernel kernel(cfg.kernel, cfg.epsilon);
      const int degree = sph_degree_for(nodes.size());
      if (cfg.model == Model::fourier && degree < 0)
        throw InvalidArgument("spherical harmonic model needs a square node count");
      std::array<Eigen::MatrixXd, 6> ops;
      for (int k = 0; k < 6; ++k)
        ops[k] = cfg.model == Model::fourier
                     ? sph_operator(sites, degree, kAllPartials[k], Exec::serial).matrix
                     : rbf_operator_3d(sites, nodes, kernel, kAllPartials[k], Exec::serial).matrix;
      std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> solve;
      if (cfg.model == Model::fourier) {
        auto sys = sph_system(nodes, degree);
        solve = [sys](const Eigen::MatrixXd& b) { return sys->solve(b); };
      } else {
        auto sys = rbf_system_3d(nodes, kernel);
        solve = [sys](const Eigen::MatrixXd& b) { return sys->solve(b); };
      }
      pipeline = [=] {
        const Eigen::MatrixXd c = solve(data);
        std::array<Eigen::MatrixXd, 6> d;
        for (int k = 0; k < 6; ++k) d[k] = ops[k] * c;
        const Fields f = fields_3d(d);
        sink = sink + f.force(0, 0);
      };
    }
  }

  for (int i = 0; i < cfg.warmup; ++i) pipeline();
  std::vector<double> seconds(static_cast<std::size_t>(cfg.trials));
  for (auto& s : seconds) {
    const auto t0 = Clock::now();
    pipeline();
    s = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  TimingRow row = summarize_trials(seconds);
  row.model = cfg.model;
  row.n = cfg.model == Model::pwl ? cfg.m : cfg.n;
  row.m = cfg.m;
  return row;
}

std::vector<EpsilonGap> epsilon_fourier_limit_study(int n, const std::string& object,
                                                    std::span<const double> epsilons) {
  const auto nodes = equispaced_circle(n);
  return epsilon_limit_gap(nodes, sample_2d(object_2d_preset(object), nodes), epsilons);
}

std::vector<std::string> study_preset_names() {
  return {"fig-geom2d", "fig-normals2d", "fig-force2d", "fig-geom3d", "fig-normals3d", "fig-force3d"};
}

std::vector<StudyConfig> study_preset(std::string_view name) {
  const auto names = study_preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown study preset '" + std::string(name) + "' (known: " + known + ")");
  }
  const bool three = name.ends_with("3d");
  StudyConfig base;
  base.dimension = three ? 3 : 2;
  if (three) {
    base.n_list = {16, 36, 64, 121, 256, 529};
    base.m = 1024;
    base.kernel = KernelFamily::imq;
  } else {
    for (int n = 8; n <= 56; n += 8) base.n_list.push_back(n);
    base.m = 100;
    base.kernel = KernelFamily::mq;
  }
  if (name.starts_with("fig-geom")) {
    base.models = {Model::fourier, Model::rbf};
    base.quantities = {Quantity::shape};
  } else if (name.starts_with("fig-normals")) {
    base.models = {Model::pwl, Model::fourier, Model::rbf};
    base.quantities = {Quantity::normal};
  } else {
    base.models = three ? std::vector{Model::fourier, Model::rbf}
                        : std::vector{Model::pwl, Model::fourier, Model::rbf};
    base.quantities = {Quantity::force};
  }
  StudyConfig a = base, b = base;
  a.object = "object1";
  a.epsilon = 0.9;
  b.object = "object2";
  b.epsilon = three ? 1.5 : 3.6;
  return {a, b};
}

std::vector<std::string> sweep_preset_names() {
  return {"fig-2dshape1", "fig-2dshape2", "fig-3dshape1", "fig-3dshape2"};
}

std::vector<SweepConfig> sweep_preset(std::string_view name) {
  static const std::map<std::string_view, std::pair<int, int>> dims = {
      {"fig-2dshape1", {2, 24}}, {"fig-2dshape2", {2, 56}},
      {"fig-3dshape1", {3, 256}}, {"fig-3dshape2", {3, 529}}};
  const auto it = dims.find(name);
  if (it == dims.end())
    throw ConfigError("unknown sweep preset '" + std::string(name) +
                      "' (known: fig-2dshape1, fig-2dshape2, fig-3dshape1, fig-3dshape2)");
  SweepConfig base;
  base.dimension = it->second.first;
  base.n = it->second.second;
  base.m = base.dimension == 2 ? 100 : 1024;
  base.kernel = base.dimension == 2 ? KernelFamily::mq : KernelFamily::imq;
  base.epsilons = logspace(-2, 1, 31);
  SweepConfig a = base, b = base;
  a.object = "object1";
  b.object = "object2";
  return {a, b};
}

void write_convergence_csv(std::ostream& out, std::span<const ErrorRow> rows) {
  out << "dim,object,model,N,M,epsilon,quantity,max_error,cond_estimate,status\n";
  for (const auto& r : rows)
    out << r.dimension << ',' << r.object << ',' << to_string(r.model) << ',' << r.n << ',' << r.m << ','
        << fmt(r.epsilon) << ',' << to_string(r.quantity) << ',' << fmt(r.max_error) << ','
        << fmt(r.cond_estimate) << ',' << r.status << '\n';
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "object,N,M,epsilon,max_error,cond_estimate\n";
  for (const auto& r : rows)
    out << r.object << ',' << r.n << ',' << r.m << ',' << fmt(r.epsilon) << ',' << fmt(r.max_error) << ','
        << fmt(r.cond_estimate) << '\n';
}

void write_timing_csv(std::ostream& out, std::span<const TimingRow> rows) {
  out << "model,N,M,trials,mean_s,stddev_s,median_s\n";
  for (const auto& r : rows)
    out << to_string(r.model) << ',' << r.n << ',' << r.m << ',' << r.trials << ',' << fmt(r.mean_s) << ','
        << fmt(r.stddev_s) << ',' << fmt(r.median_s) << '\n';
}

void write_epsilon_csv(std::ostream& out, std::span<const EpsilonGap> rows) {
  out << "epsilon,gap,cond_estimate,status\n";
  for (const auto& r : rows) {
    out << fmt(r.epsilon) << ',' << fmt(r.gap) << ',' << fmt(r.cond_estimate) << ','
        << (r.error.empty() ? "ok" : "failed") << '\n';
  }
}

}  // namespace membrane
