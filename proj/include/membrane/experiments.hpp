#pragma once

#include "membrane/parallel.hpp"
#include "membrane/rbf.hpp"
#include "membrane/shapes.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace membrane {

// In 3D, `fourier` is the spherical-harmonic model.
enum class Model { pwl, fourier, rbf };
enum class Quantity { shape, normal, force };

std::string_view to_string(Model m);
std::string_view to_string(Quantity q);
Model parse_model(std::string_view name);
Quantity parse_quantity(std::string_view name);

// Material constants used by every study.
inline constexpr double kStudyK0 = 0.2;
inline constexpr double kStudyGamma = 0.2;

struct StudyConfig {
  int dimension = 2;
  std::string object = "object1";
  // When set for the config's dimension, replaces the preset and `object`
  // becomes a free-form label.
  std::optional<TestObject2D> custom_2d;
  std::optional<TestObject3D> custom_3d;
  std::vector<Model> models = {Model::fourier, Model::rbf};
  std::vector<Quantity> quantities = {Quantity::shape, Quantity::normal, Quantity::force};
  std::vector<int> n_list;
  int m = 100;  // sample sites; also the PWL IB-point count
  KernelFamily kernel = KernelFamily::mq;
  double epsilon = 0.9;
  std::uint64_t seed = 1;  // minimal-energy node and sample-site seed (3D)
  std::filesystem::path cache_dir;
  // Optional directory of maximal-determinant sets md_<N>.txt (unit vectors);
  // missing files fall back to minimal-energy nodes.
  std::filesystem::path md_dir;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ErrorRow {
  int dimension = 2;
  std::string object;
  Model model = Model::fourier;
  int n = 0;
  int m = 0;
  double epsilon = 0.0;        // NaN unless the model is RBF
  Quantity quantity = Quantity::shape;
  double max_error = 0.0;      // NaN when the fit failed
  double cond_estimate = 0.0;  // NaN for PWL
  std::string status = "ok";   // otherwise the error kind
};

struct ErrorReport {
  StudyConfig config;
  std::vector<ErrorRow> rows;

  /// The unique row for (model, n, quantity); PWL rows have n == m.
  const ErrorRow* find(Model model, int n, Quantity quantity) const;
};

/// max_j ‖approx_j − truth_j‖₂ over matching rows.
double max_two_norm_error(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& truth);

/// Fits every (model, N) of the config and compares position, normal and
/// force at the sample sites against reference jets. PWL contributes one row
/// per quantity at M IB points (normal only in 3D). Fit failures become rows
/// with status set to the error kind. Rows run in parallel under
/// Exec::parallel; each is computed serially so output is deterministic.
ErrorReport convergence_study(const StudyConfig& cfg, Exec exec = Exec::parallel);

struct SweepConfig {
  int dimension = 2;
  std::string object = "object1";
  // When set for the config's dimension, replaces the preset and `object`
  // becomes a free-form label.
  std::optional<TestObject2D> custom_2d;
  std::optional<TestObject3D> custom_3d;
  int n = 24;
  int m = 100;
  KernelFamily kernel = KernelFamily::mq;
  std::vector<double> epsilons;
  std::uint64_t seed = 1;
  std::filesystem::path cache_dir;

  void validate() const;
};

struct SweepRow {
  std::string object;
  int n = 0;
  int m = 0;
  double epsilon = 0.0;
  double max_error = 0.0;  // NaN when the fit failed
  double cond_estimate = 0.0;
};

/// RBF shape error at the sample sites for each ε.
std::vector<SweepRow> shape_param_sweep(const SweepConfig& cfg, Exec exec = Exec::parallel);

/// `count` values from 10^lo to 10^hi, evenly spaced in the exponent.
std::vector<double> logspace(double lo, double hi, int count);

struct TimingConfig {
  int dimension = 2;
  std::string object = "object1";
  // When set for the config's dimension, replaces the preset and `object`
  // becomes a free-form label.
  std::optional<TestObject2D> custom_2d;
  std::optional<TestObject3D> custom_3d;
  Model model = Model::fourier;
  int n = 56;
  int m = 100;
  KernelFamily kernel = KernelFamily::mq;
  double epsilon = 0.9;
  int trials = 100;
  int warmup = 3;
  std::uint64_t seed = 1;
  std::filesystem::path cache_dir;

  void validate() const;
};

struct TimingRow {
  Model model = Model::fourier;
  int n = 0;
  int m = 0;
  int trials = 0;
  double mean_s = 0.0;
  double stddev_s = 0.0;
  double median_s = 0.0;
};

/// Wallclock of fit + evaluate + normals + forces with factorizations and
/// operator matrices prepared outside the timed region. PWL times normals
/// and forces at its M IB points. Runs on the calling thread only.
TimingRow timing_bench(const TimingConfig& cfg);

/// Summary statistics of per-trial seconds (population standard deviation).
TimingRow summarize_trials(std::span<const double> seconds);

/// RBF–trigonometric gap on n equispaced samples of a 2D object preset.
std::vector<EpsilonGap> epsilon_fourier_limit_study(int n, const std::string& object,
                                                    std::span<const double> epsilons);

// Figure presets; each expands to one config per object. Unknown names throw
// ConfigError listing the known ones.
std::vector<std::string> study_preset_names();
std::vector<StudyConfig> study_preset(std::string_view name);
std::vector<std::string> sweep_preset_names();
std::vector<SweepConfig> sweep_preset(std::string_view name);

void write_convergence_csv(std::ostream& out, std::span<const ErrorRow> rows);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_timing_csv(std::ostream& out, std::span<const TimingRow> rows);
void write_epsilon_csv(std::ostream& out, std::span<const EpsilonGap> rows);

}  // namespace membrane
