// Serial reference kernels against their OpenMP counterparts, plus one full
// conditional particle filter sweep per backend. The range argument is the
// number of particles.

#include <basisid/kernels.hpp>
#include <basisid/smc.hpp>
#include <basisid/systems.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace basisid;
using kernels::Backend;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd M(r, c);
  for (auto& v : M.reshaped()) v = nd(rng);
  return M;
}

ModelParams bench_model() {
  auto m = ModelParams::zeros(2, 1, FeatureMap{BasisSpec::fourier(4, 3.0, 2), BasisSpec::linear(2)});
  m.Gamma_f = 0.05 * gaussian(2, m.regressor_size(), 1);
  m.Gamma_g(0, m.regressor_size() - 2) = 1.0;
  return m;
}

void regressors(benchmark::State& state, Backend backend) {
  const auto m = bench_model();
  const Eigen::MatrixXd X = gaussian(2, state.range(0), 2);
  Eigen::MatrixXd Z(m.regressor_size(), X.cols());
  for (auto _ : state) {
    kernels::regressors(backend, m, X, nullptr, Z);
    benchmark::DoNotOptimize(Z.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void log_normal_columns(benchmark::State& state, Backend backend) {
  const Eigen::MatrixXd R = gaussian(4, state.range(0), 3);
  const Eigen::MatrixXd L = Eigen::MatrixXd::Identity(4, 4) * 0.7;
  Eigen::VectorXd out;
  for (auto _ : state) {
    kernels::log_normal_columns(backend, R, L, 4 * std::log(0.49), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void weighted_outer(benchmark::State& state, Backend backend) {
  const Eigen::MatrixXd A = gaussian(20, state.range(0), 4), B = gaussian(20, state.range(0), 5);
  const Eigen::VectorXd w = gaussian(state.range(0), 1, 6).cwiseAbs();
  Eigen::MatrixXd out;
  for (auto _ : state) {
    kernels::weighted_outer(backend, A, B, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void cpf_sweep(benchmark::State& state, Backend backend) {
  const auto m = bench_model();
  const auto g = systems::generate_from_model(m, {}, 200, 7, true);
  Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(200, 2);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cond = cpf_as(m, g.data, cond, {static_cast<int>(state.range(0)), ++seed, Resampling::multinomial, backend})
               .trajectory;
    benchmark::DoNotOptimize(cond.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(regressors, serial, Backend::serial)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(regressors, omp, Backend::parallel)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(log_normal_columns, serial, Backend::serial)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(log_normal_columns, omp, Backend::parallel)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(weighted_outer, serial, Backend::serial)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(weighted_outer, omp, Backend::parallel)->RangeMultiplier(8)->Range(64, 32768);
BENCHMARK_CAPTURE(cpf_sweep, serial, Backend::serial)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK_CAPTURE(cpf_sweep, omp, Backend::parallel)->Arg(10)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
