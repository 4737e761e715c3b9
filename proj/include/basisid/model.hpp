#pragma once

#include "basisid/basis.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace basisid {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// theta = {[A B], [C D], Q, R} plus the initial-state distribution p(x_1).
///
///   x_{t+1} = Gamma_f [phi_x(x_t); phi_u(u_t)] + w_t,  w_t ~ N(0, Q)
///   y_t     = Gamma_g [phi_x(x_t); phi_u(u_t)] + e_t,  e_t ~ N(0, R)
///
/// Autonomous models have an empty basis_u and nu == 0.
struct ModelParams {
  int nu = 0;
  FeatureMap basis_x;
  FeatureMap basis_u;
  Eigen::MatrixXd Gamma_f;
  Eigen::MatrixXd Gamma_g;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::VectorXd init_mean;
  Eigen::MatrixXd init_cov;

  int nx() const { return static_cast<int>(Q.rows()); }
  int ny() const { return static_cast<int>(R.rows()); }
  int mx() const { return basis_x.feature_count(); }
  int mu() const { return basis_u.feature_count(); }
  int regressor_size() const { return mx() + mu(); }

  /// Zero Gamma blocks, identity covariances and N(0, I) initial state.
  static ModelParams zeros(int nx, int ny, FeatureMap basis_x, int nu = 0, FeatureMap basis_u = {});

  /// Throws InvariantError naming the first violated invariant.
  void validate() const;

  /// z = [phi_x(x); phi_u(u)] written into `out`; no argument checks.
  void regressor_into(const double* x, const double* u, double* out) const;
};

/// Row-wise learnability of one model equation. Where `mask` is false the
/// coefficient is held at `fixed`; `learn_noise` controls Q (state) or R
/// (measurement).
struct EquationStructure {
  BoolMatrix mask;
  Eigen::MatrixXd fixed;
  bool learn_noise = true;

  bool fully_known() const { return !learn_noise && !mask.any(); }
  bool operator==(const EquationStructure& o) const {
    return learn_noise == o.learn_noise && mask.rows() == o.mask.rows() &&
           mask.cols() == o.mask.cols() && (mask == o.mask).all() && fixed == o.fixed;
  }
};

struct StructureSpec {
  EquationStructure state;
  EquationStructure measurement;

  /// Every coefficient and both noise covariances learnable.
  static StructureSpec learn_all(const ModelParams& model);
  /// Fills empty masks with "learn everything" and empty fixed matrices with
  /// the model's current coefficients, then checks shapes.
  void resolve(const ModelParams& model);
  /// Copies the fixed coefficients into the model.
  void apply_fixed(ModelParams& model) const;
};

/// Input-output record; u has zero columns for autonomous systems.
struct Dataset {
  Eigen::MatrixXd u;
  Eigen::MatrixXd y;

  Eigen::Index T() const { return y.rows(); }
  int nu() const { return static_cast<int>(u.cols()); }
  int ny() const { return static_cast<int>(y.cols()); }
  void validate() const;
};

Eigen::VectorXd regressor(const ModelParams& model, std::span<const double> x, std::span<const double> u = {});
Eigen::VectorXd step_mean(const ModelParams& model, std::span<const double> x, std::span<const double> u = {});
Eigen::VectorXd obs_mean(const ModelParams& model, std::span<const double> x, std::span<const double> u = {});

struct SimulationResult {
  Eigen::MatrixXd x;  // T x nx
  Eigen::MatrixXd y;  // T x ny
};

/// Iterates the model for T steps from x1. `u` is T x nu (ignored when nu == 0).
/// Throws DivergenceError with the failing time index on a non-finite state.
SimulationResult simulate(const ModelParams& model, const Eigen::MatrixXd& u, Eigen::Index T,
                          std::span<const double> x1, std::uint64_t seed, bool with_noise);

struct ErrorMetrics {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double rmse = 0.0;
};

/// Statistics of y_true - y_sim over all entries.
ErrorMetrics metrics(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_sim);

}  // namespace basisid
