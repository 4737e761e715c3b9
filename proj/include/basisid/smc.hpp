#pragma once

#include "basisid/kernels.hpp"
#include "basisid/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace basisid {

using Rng = std::mt19937_64;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

enum class Resampling { multinomial, systematic };

std::string to_string(Resampling r);
Resampling parse_resampling(const std::string& s);

/// Weighted trajectory ensemble from one conditional particle filter sweep.
///
/// Particles are stored as generated: states[t].col(i) is particle i at time
/// t, and ancestors(t, i) is the index at time t of the parent of particle i
/// at time t + 1. Indices are 0-based; the conditioned particle is N - 1.
/// Full trajectories are recovered with trace().
struct ParticleSystem {
  std::vector<Eigen::MatrixXd> states;  // T entries of n_x x N
  IndexMatrix ancestors;                // (T - 1) x N
  Eigen::MatrixXd filter_weights;       // T x N, each row sums to 1
  Eigen::VectorXd final_weights;        // N, equals the last row of filter_weights

  Eigen::Index T() const { return static_cast<Eigen::Index>(states.size()); }
  int N() const { return states.empty() ? 0 : static_cast<int>(states.front().cols()); }
  int nx() const { return states.empty() ? 0 : static_cast<int>(states.front().rows()); }

  /// Particle index at every time along the trajectory ending in particle i at T.
  std::vector<int> lineage(int i) const;
  /// T x n_x trajectory ending in particle i at time T.
  Eigen::MatrixXd trace(int i) const;
};

/// Log of the Gaussian density of y under mean obs_mean(model, x, u) and covariance R.
double log_measurement_weight(const ModelParams& model, std::span<const double> y, std::span<const double> x,
                              std::span<const double> u = {});
double measurement_weight(const ModelParams& model, std::span<const double> y, std::span<const double> x,
                          std::span<const double> u = {});

/// `count` independent categorical draws with probabilities proportional to
/// `weights`. Throws DegenerateWeights when no weight is positive and finite.
std::vector<int> multinomial_resample(std::span<const double> weights, int count, Rng& rng);
/// Stratified-by-one-uniform variant; same contract as multinomial_resample.
std::vector<int> systematic_resample(std::span<const double> weights, int count, Rng& rng);

/// Normalizes log-weights in place into probabilities using log-sum-exp.
/// Returns false (and leaves uniform weights) when every entry is -inf or NaN.
bool normalize_log_weights(const Eigen::VectorXd& log_weights, Eigen::VectorXd& probabilities);

/// Probabilities of the ancestor of the conditioned particle:
/// proportional to w_t^j N(conditioned_next; step_mean(x_t^j, u_t), Q).
Eigen::VectorXd ancestor_weights(const ModelParams& model, const Eigen::MatrixXd& particles_t,
                                 std::span<const double> u_t, std::span<const double> conditioned_next,
                                 const Eigen::VectorXd& filter_weights_t);

struct CpfOptions {
  int N = 5;
  std::uint64_t seed = 0;
  Resampling resampling = Resampling::multinomial;
  kernels::Backend backend = kernels::Backend::parallel;
};

struct CpfResult {
  Eigen::MatrixXd trajectory;  // T x n_x
  ParticleSystem system;
  int selected = 0;            // J
  std::size_t degenerate_steps = 0;
};

/// Conditional particle filter with ancestor sampling. `conditioned` is the
/// T x n_x reference trajectory pinned to particle N - 1. The bootstrap
/// proposal draws from the transition density; weights at every t,
/// including the last, use the measurement y_t. If every weight underflows
/// at some step the filter resamples uniformly and counts the event.
CpfResult cpf_as(const ModelParams& model, const Dataset& data, const Eigen::MatrixXd& conditioned,
                 const CpfOptions& options);

/// Bootstrap particle filter one-step-ahead output predictions E[y_t | y_{1:t-1}] (T x n_y).
Eigen::MatrixXd predict_outputs(const ModelParams& model, const Dataset& data, int N, std::uint64_t seed);

}  // namespace basisid
