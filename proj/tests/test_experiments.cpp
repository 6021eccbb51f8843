#include "membrane/errors.hpp"
#include "membrane/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace membrane;

namespace {

std::filesystem::path test_cache() {
  const auto p = std::filesystem::temp_directory_path() / "membrane_test_experiments";
  std::filesystem::create_directories(p);
  return p;
}

StudyConfig small_2d(const std::string& object) {
  StudyConfig c;
  c.object = object;
  c.models = {Model::pwl, Model::fourier, Model::rbf};
  c.n_list = {16, 32, 56};
  c.epsilon = object == "object1" ? 0.9 : 3.6;
  return c;
}

std::string csv(const ErrorReport& r) {
  std::ostringstream out;
  write_convergence_csv(out, r.rows);
  return out.str();
}

}  // namespace

TEST(MaxTwoNormError, Basics) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(7, 3);
  EXPECT_EQ(max_two_norm_error(a, a), 0.0);
  Eigen::MatrixXd b = a;
  b.row(4) += Eigen::RowVector3d(3, 4, 0);
  EXPECT_NEAR(max_two_norm_error(b, a), 5.0, 1e-14);
  EXPECT_THROW(max_two_norm_error(a, a.topRows(3)), InvalidArgument);
  EXPECT_EQ(max_two_norm_error(Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 2)), 0.0);
}

TEST(MaxTwoNormError, BruteForce) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(40, 2), b(40, 2);
  for (int i = 0; i < 40; ++i)
    for (int d = 0; d < 2; ++d) a(i, d) = g(rng), b(i, d) = g(rng);
  double best = 0;
  for (int i = 0; i < 40; ++i) best = std::max(best, std::hypot(a(i, 0) - b(i, 0), a(i, 1) - b(i, 1)));
  EXPECT_NEAR(max_two_norm_error(a, b), best, 1e-15 * best);
}

TEST(ConvergenceStudy, RowLayout2D) {
  const auto r = convergence_study(small_2d("object1"));
  // PWL: shape is exact at its own points, so only normal and force rows.
  EXPECT_EQ(r.rows.size(), 2u + 2 * 3 * 3);
  ASSERT_NE(r.find(Model::pwl, 100, Quantity::normal), nullptr);
  EXPECT_EQ(r.find(Model::pwl, 100, Quantity::shape), nullptr);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_GE(row.max_error, 0.0);
    EXPECT_EQ(std::isnan(row.epsilon), row.model != Model::rbf);
    EXPECT_EQ(std::isnan(row.cond_estimate), row.model == Model::pwl);
  }
}

TEST(ConvergenceStudy, SmoothObjectConvergesSpectrally) {
  const auto r = convergence_study(small_2d("object1"));
  for (Model m : {Model::fourier, Model::rbf})
    for (Quantity q : {Quantity::shape, Quantity::normal, Quantity::force}) {
      const double e16 = r.find(m, 16, q)->max_error, e32 = r.find(m, 32, q)->max_error,
                   e56 = r.find(m, 56, q)->max_error;
      EXPECT_LT(e32, e16) << to_string(m) << ' ' << to_string(q);
      EXPECT_LT(e56, e32) << to_string(m) << ' ' << to_string(q);
    }
  EXPECT_LT(r.find(Model::fourier, 56, Quantity::shape)->max_error,
            1e-3 * r.find(Model::fourier, 16, Quantity::shape)->max_error);
}

TEST(ConvergenceStudy, RoughObjectForceConvergesSlowly) {
  // Two continuous derivatives: the force error cannot decay spectrally.
  const auto r = convergence_study(small_2d("object2"));
  const double ratio = r.find(Model::fourier, 56, Quantity::force)->max_error /
                       r.find(Model::fourier, 32, Quantity::force)->max_error;
  EXPECT_GT(ratio, 0.1);
}

TEST(ConvergenceStudy, SerialMatchesParallelBytes) {
  const auto c = small_2d("object2");
  EXPECT_EQ(csv(convergence_study(c, Exec::serial)), csv(convergence_study(c, Exec::parallel)));
  EXPECT_EQ(csv(convergence_study(c)), csv(convergence_study(c)));
}

TEST(ConvergenceStudy, FailedFitBecomesRow) {
  StudyConfig c;
  c.models = {Model::rbf};
  c.quantities = {Quantity::shape};
  c.n_list = {56};
  c.epsilon = 1e-8;
  const auto r = convergence_study(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].status, "singular-system");
  EXPECT_TRUE(std::isnan(r.rows[0].max_error));
  EXPECT_GT(r.rows[0].cond_estimate, 1e12);
}

TEST(ConvergenceStudy, Small3D) {
  StudyConfig c;
  c.dimension = 3;
  c.models = {Model::pwl, Model::fourier, Model::rbf};
  c.quantities = {Quantity::shape, Quantity::normal, Quantity::force};
  c.n_list = {16, 36};
  c.m = 64;
  c.kernel = KernelFamily::imq;
  c.cache_dir = test_cache();
  const auto r = convergence_study(c);
  // PWL reports normals only in 3D.
  EXPECT_EQ(r.rows.size(), 1u + 2 * 2 * 3);
  for (const auto& row : r.rows) EXPECT_EQ(row.status, "ok");
  EXPECT_LT(r.find(Model::fourier, 36, Quantity::shape)->max_error,
            r.find(Model::fourier, 16, Quantity::shape)->max_error);
  EXPECT_EQ(csv(r), csv(convergence_study(c)));
}

TEST(StudyConfig, ValidationNamesField) {
  auto expect_field = [](StudyConfig c, const std::string& field) {
    try {
      c.validate();
      FAIL() << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find("'" + field + "'"), std::string::npos) << e.what();
    }
  };
  StudyConfig ok;
  ok.n_list = {8, 16};
  EXPECT_NO_THROW(ok.validate());
  auto c = ok;
  c.dimension = 4;
  expect_field(c, "dimension");
  c = ok;
  c.object = "blob";
  expect_field(c, "object");
  c = ok;
  c.n_list = {};
  expect_field(c, "n_list");
  c = ok;
  c.n_list = {9};
  expect_field(c, "n_list");
  c = ok;
  c.n_list = {200};
  expect_field(c, "m");
  c = ok;
  c.epsilon = -1;
  expect_field(c, "epsilon");
  c = ok;
  c.models = {};
  expect_field(c, "models");
  EXPECT_THROW(convergence_study(c), ConfigError);
}

TEST(Sweep, SingleEpsilonAndEmptyGrid) {
  SweepConfig c;
  c.epsilons = {0.9};
  const auto rows = shape_param_sweep(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].max_error, 0.0);
  EXPECT_LT(rows[0].max_error, 1e-2);
  EXPECT_GT(rows[0].cond_estimate, 1.0);
  c.epsilons = {};
  EXPECT_THROW(shape_param_sweep(c), ConfigError);
}

TEST(Sweep, FailedEpsilonIsNaNRow) {
  SweepConfig c;
  c.n = 56;
  c.epsilons = {1e-8, 1.0};
  const auto rows = shape_param_sweep(c);
  EXPECT_TRUE(std::isnan(rows[0].max_error));
  EXPECT_GT(rows[0].cond_estimate, 1e12);
  EXPECT_FALSE(std::isnan(rows[1].max_error));
}

TEST(Sweep, SmoothObjectErrorRisesPastOptimum) {
  SweepConfig c;
  c.epsilons = logspace(-1, 1, 21);
  const auto rows = shape_param_sweep(c);
  // The smallest ε are refused; NaN rows never win.
  std::size_t best = rows.size() - 1;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].max_error < rows[best].max_error) best = i;
  ASSERT_LT(best + 4, rows.size());
  for (std::size_t i = best + 1; i < rows.size(); ++i) EXPECT_GT(rows[i].max_error, rows[i - 1].max_error) << i;
  EXPECT_GT(rows.back().max_error, 5 * rows[best].max_error);
}

TEST(Sweep, Logspace) {
  const auto v = logspace(-2, 1, 31);
  ASSERT_EQ(v.size(), 31u);
  EXPECT_DOUBLE_EQ(v.front(), 0.01);
  EXPECT_DOUBLE_EQ(v.back(), 10.0);
  EXPECT_DOUBLE_EQ(v[10], 0.1);
  EXPECT_EQ(logspace(0, 3, 1), std::vector<double>{1.0});
  EXPECT_THROW(logspace(0, 1, 0), InvalidArgument);
}

TEST(Timing, SummarizeTrials) {
  const std::vector<double> one{2.5};
  const auto a = summarize_trials(one);
  EXPECT_EQ(a.mean_s, 2.5);
  EXPECT_EQ(a.stddev_s, 0.0);
  EXPECT_EQ(a.median_s, 2.5);
  const std::vector<double> four{1, 2, 3, 6};
  const auto b = summarize_trials(four);
  EXPECT_DOUBLE_EQ(b.mean_s, 3.0);
  EXPECT_DOUBLE_EQ(b.stddev_s, std::sqrt(3.5));
  EXPECT_DOUBLE_EQ(b.median_s, 2.5);
  EXPECT_THROW(summarize_trials({}), InvalidArgument);
}

TEST(Timing, RunsEveryModel) {
  for (Model m : {Model::pwl, Model::fourier, Model::rbf}) {
    TimingConfig c;
    c.model = m;
    c.trials = 5;
    const auto row = timing_bench(c);
    EXPECT_EQ(row.trials, 5);
    EXPECT_GT(row.mean_s, 0.0);
    EXPECT_EQ(row.n, m == Model::pwl ? 100 : 56);
  }
  TimingConfig c;
  c.trials = 0;
  EXPECT_THROW(timing_bench(c), ConfigError);
}

TEST(Timing, DoublingSampleSitesRoughlyDoublesTime) {
  for (Model m : {Model::fourier, Model::rbf}) {
    TimingConfig c;
    c.model = m;
    c.trials = 200;
    c.m = 2000;
    const double t1 = timing_bench(c).median_s;
    c.m = 4000;
    const double t2 = timing_bench(c).median_s;
    EXPECT_GT(t2 / t1, 2.0 / 4.0) << to_string(m);
    EXPECT_LT(t2 / t1, 2.0 * 4.0) << to_string(m);
  }
}

TEST(Presets, ExpandToBothObjects) {
  for (const auto& name : study_preset_names()) {
    const auto cs = study_preset(name);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].object, "object1");
    EXPECT_EQ(cs[1].object, "object2");
    for (const auto& c : cs) EXPECT_NO_THROW(c.validate()) << name;
  }
  for (const auto& name : sweep_preset_names())
    for (const auto& c : sweep_preset(name)) {
      EXPECT_NO_THROW(c.validate()) << name;
      EXPECT_EQ(c.epsilons.size(), 31u);
    }
  const auto f = study_preset("fig-force3d");
  EXPECT_EQ(f[0].m, 1024);
  EXPECT_EQ(f[0].kernel, KernelFamily::imq);
  EXPECT_EQ(f[1].epsilon, 1.5);
}

TEST(Presets, UnknownNameListsKnown) {
  try {
    study_preset("fig-nope");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fig-normals2d"), std::string::npos);
  }
  try {
    sweep_preset("x");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fig-3dshape2"), std::string::npos);
  }
}

TEST(Parsing, NamesRoundTrip) {
  for (Model m : {Model::pwl, Model::fourier, Model::rbf}) EXPECT_EQ(parse_model(to_string(m)), m);
  for (Quantity q : {Quantity::shape, Quantity::normal, Quantity::force})
    EXPECT_EQ(parse_quantity(to_string(q)), q);
  EXPECT_THROW(parse_model("spline"), ConfigError);
  EXPECT_THROW(parse_quantity("stress"), ConfigError);
}

TEST(EpsilonLimit, GapShrinksAndCsv) {
  const std::vector<double> eps{1, 0.5, 0.25};
  const auto rows = epsilon_fourier_limit_study(8, "object1", eps);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[2].gap, rows[0].gap);
  std::ostringstream out;
  write_epsilon_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, 32), "epsilon,gap,cond_estimate,status");
}

TEST(ConvergenceStudy, CustomEllipseIsExact) {
  StudyConfig c;
  c.object = "ellipse";
  c.custom_2d = TestObject2D(IdealShape2D(0.3, -0.1, 0.5, 0.2), 0.0, 1.0, Profile::smooth);
  c.models = {Model::fourier};
  c.quantities = {Quantity::shape, Quantity::normal, Quantity::force};
  c.n_list = {4, 8};
  const auto r = convergence_study(c);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.object, "ellipse");
    EXPECT_LE(row.max_error, 1e-12) << to_string(row.quantity) << ' ' << row.n;
  }
  c.object = "a,b";
  EXPECT_THROW(c.validate(), ConfigError);
  c.custom_2d.reset();
  c.object = "ellipse";
  EXPECT_THROW(c.validate(), ConfigError);
}
