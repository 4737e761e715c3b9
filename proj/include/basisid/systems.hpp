#pragma once

#include "basisid/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <utility>

// Reference systems for data generation and evaluation.
namespace basisid::systems {

/// f(x) = -10 x / (1 + 3 x^2).
double example1_f(double x);

inline constexpr double kExample1Q = 0.1;
inline constexpr double kExample1R = 0.5;

struct Generated {
  Dataset data;
  Eigen::MatrixXd states;  // T x n_x
};

/// x_{t+1} = example1_f(x_t) + w_t, y_t = x_t + e_t with w ~ N(0, 0.1),
/// e ~ N(0, 0.5) and x_1 ~ N(0, 1).
Generated generate_example1(Eigen::Index T, std::uint64_t seed);

/// Linear-Gaussian model expressed with linear bases:
/// x_{t+1} = A x_t + B u_t + w_t, y_t = C x_t + D u_t + e_t.
/// B and D may be empty for autonomous systems.
ModelParams linear_model(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, const Eigen::MatrixXd& Q,
                         const Eigen::MatrixXd& R, const Eigen::MatrixXd& B = {}, const Eigen::MatrixXd& D = {});

/// Simulates `model` for T steps with x_1 drawn from its initial distribution
/// (or fixed at the initial mean when `with_noise` is false).
Generated generate_from_model(const ModelParams& model, const Eigen::MatrixXd& u, Eigen::Index T,
                              std::uint64_t seed, bool with_noise);

/// Root-mean-square difference of two scalar functions on `points` equally
/// spaced nodes of [lo, hi].
double grid_rmse(const std::function<double(double)>& a, const std::function<double(double)>& b, double lo,
                 double hi, int points = 201);

/// [q_{(1-mass)/2}, q_{(1+mass)/2}] empirical quantiles (linear interpolation).
std::pair<double, double> central_interval(const Eigen::VectorXd& values, double mass = 0.95);

}  // namespace basisid::systems
