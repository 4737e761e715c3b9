#include "basisid/systems.hpp"

#include "basisid/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace basisid::systems {

double example1_f(double x) { return -10.0 * x / (1.0 + 3.0 * x * x); }

Generated generate_example1(Eigen::Index T, std::uint64_t seed) {
  if (T < 1) throw InvalidArgument("T must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double sq = std::sqrt(kExample1Q), sr = std::sqrt(kExample1R);
  Generated g;
  g.states.resize(T, 1);
  g.data.y.resize(T, 1);
  g.data.u.resize(T, 0);
  double x = normal(rng);
  for (Eigen::Index t = 0; t < T; ++t) {
    g.states(t, 0) = x;
    g.data.y(t, 0) = x + sr * normal(rng);
    x = example1_f(x) + sq * normal(rng);
  }
  return g;
}

ModelParams linear_model(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& B, const Eigen::MatrixXd& D) {
  const auto nx = static_cast<int>(A.rows());
  const auto ny = static_cast<int>(C.rows());
  if (A.cols() != nx || C.cols() != nx) throw DimensionError("A must be n_x x n_x and C n_y x n_x");
  const int nu = static_cast<int>(std::max(B.cols(), D.cols()));
  FeatureMap bu;
  if (nu > 0) bu = FeatureMap{BasisSpec::linear(nu)};
  ModelParams m = ModelParams::zeros(nx, ny, FeatureMap{BasisSpec::linear(nx)}, nu, bu);
  m.Gamma_f.leftCols(nx) = A;
  m.Gamma_g.leftCols(nx) = C;
  if (B.size()) m.Gamma_f.rightCols(nu) = B;
  if (D.size()) m.Gamma_g.rightCols(nu) = D;
  m.Q = Q;
  m.R = R;
  m.validate();
  return m;
}

Generated generate_from_model(const ModelParams& model, const Eigen::MatrixXd& u, Eigen::Index T,
                              std::uint64_t seed, bool with_noise) {
  Eigen::VectorXd x1 = model.init_mean;
  if (with_noise) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    Eigen::VectorXd eps(model.nx());
    for (auto& e : eps) e = normal(rng);
    x1 += Eigen::MatrixXd(model.init_cov.llt().matrixL()) * eps;
  }
  auto sim = simulate(model, u, T, {x1.data(), static_cast<std::size_t>(x1.size())}, seed, with_noise);
  Generated g;
  g.states = std::move(sim.x);
  g.data.y = std::move(sim.y);
  g.data.u = model.nu > 0 ? Eigen::MatrixXd(u.topRows(T)) : Eigen::MatrixXd(T, 0);
  return g;
}

double grid_rmse(const std::function<double(double)>& a, const std::function<double(double)>& b, double lo,
                 double hi, int points) {
  if (points < 2 || !(hi > lo)) throw InvalidArgument("grid_rmse needs hi > lo and at least 2 points");
  double s = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double d = a(x) - b(x);
    s += d * d;
  }
  return std::sqrt(s / points);
}

std::pair<double, double> central_interval(const Eigen::VectorXd& values, double mass) {
  if (values.size() == 0) throw InvalidArgument("central_interval of an empty sample");
  if (!(mass > 0.0 && mass <= 1.0)) throw InvalidArgument("mass must lie in (0, 1]");
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i];
  };
  return {quantile((1.0 - mass) / 2.0), quantile((1.0 + mass) / 2.0)};
}

}  // namespace basisid::systems
