// Serial reference vs OpenMP branch of every Exec-tagged kernel. The second
// benchmark argument selects the branch: 0 serial, 1 parallel.

#include "membrane/fourier.hpp"
#include "membrane/points.hpp"
#include "membrane/pwl.hpp"
#include "membrane/rbf.hpp"
#include "membrane/shapes.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace membrane;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

std::vector<Vec3> sphere_vectors(const NodeSet3D& set) {
  std::vector<Vec3> out;
  for (Eigen::Index i = 0; i < set.unit_vectors().cols(); ++i) out.push_back(set.unit_vectors().col(i));
  return out;
}

void BM_RieszGradient(benchmark::State& state) {
  const Eigen::Matrix3Xd p = fibonacci_sphere(static_cast<int>(state.range(0))).unit_vectors();
  Eigen::Matrix3Xd g;
  for (auto _ : state) benchmark::DoNotOptimize(riesz_energy_and_gradient(p, g, exec_of(state)));
  label(state);
}

void BM_TrigOperator(benchmark::State& state) {
  const auto sites = equispaced_circle(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(trig_operator(sites.angles(), 56, 2, exec_of(state)));
  label(state);
}

void BM_SphOperator(benchmark::State& state) {
  const auto sites = fibonacci_sphere(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(sph_operator(sites, sph_degree_for(256), Partial::dtt, exec_of(state)));
  label(state);
}

void BM_RbfOperator3D(benchmark::State& state) {
  const auto sites = fibonacci_sphere(static_cast<int>(state.range(0)));
  const auto nodes = fibonacci_sphere(256);
  const RadialKernel k(KernelFamily::imq, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(rbf_operator_3d(sites, nodes, k, Partial::dlt, exec_of(state)));
  label(state);
}

void BM_RbfSystem3D(benchmark::State& state) {
  const auto nodes = fibonacci_sphere(static_cast<int>(state.range(0)));
  const RadialKernel k(KernelFamily::imq, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(rbf_system_matrix_3d(nodes, k, exec_of(state)));
  label(state);
}

void BM_ReferenceJets2D(benchmark::State& state) {
  const auto sites = equispaced_circle(static_cast<int>(state.range(0)));
  const auto obj = object2_2d();
  for (auto _ : state) benchmark::DoNotOptimize(reference_jets_2d(obj, sites.angles(), exec_of(state)));
  label(state);
}

void BM_ReferenceJets3D(benchmark::State& state) {
  const auto sites = fibonacci_sphere(static_cast<int>(state.range(0)));
  const auto obj = object1_3d();
  for (auto _ : state) benchmark::DoNotOptimize(reference_jets_3d(obj, sites.points(), exec_of(state)));
  label(state);
}

void BM_MeshNormals(benchmark::State& state) {
  const auto dirs = sphere_vectors(fibonacci_sphere(static_cast<int>(state.range(0))));
  const TriMesh mesh = triangulate_sphere_like(dirs);
  for (auto _ : state) benchmark::DoNotOptimize(vertex_normals_angle_weighted(mesh, exec_of(state)));
  label(state);
}

void BM_PolylineNormals(benchmark::State& state) {
  const auto sites = equispaced_circle(static_cast<int>(state.range(0)));
  std::vector<Vec2> pts;
  for (double l : sites.angles()) pts.push_back(eval_object_2d(object1_2d(), l));
  const ClosedPolyline curve(pts);
  for (auto _ : state) benchmark::DoNotOptimize(pwl_normals_2d(curve, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_RieszGradient)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrigOperator)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SphOperator)->ArgsProduct({{1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RbfOperator3D)->ArgsProduct({{1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RbfSystem3D)->ArgsProduct({{256, 529}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReferenceJets2D)->ArgsProduct({{100}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReferenceJets3D)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeshNormals)->ArgsProduct({{1024}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PolylineNormals)->ArgsProduct({{100, 10000}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
