#pragma once

#include "basisid/basis.hpp"
#include "basisid/kernels.hpp"
#include "basisid/model.hpp"
#include "basisid/smc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace basisid {

/// Second moments of one regression equation zeta_t = Gamma z_t + v_t:
/// Phi = E[zeta zeta^T], Psi = E[zeta z^T], Sigma = E[z z^T], each averaged over time.
struct SuffStats {
  Eigen::MatrixXd Phi;
  Eigen::MatrixXd Psi;
  Eigen::MatrixXd Sigma;

  bool empty() const { return Phi.size() == 0 && Sigma.size() == 0; }
};

enum class Equation { state, measurement };

/// gamma_k = 1 for k <= burn_in + 1, then (k - burn_in)^(-exponent).
struct GammaSchedule {
  double exponent = 0.7;
  int burn_in = 0;

  void validate() const;
};

double gamma_value(const GammaSchedule& schedule, long k);

/// Weighted, 1/T-scaled moments of the particle system for one equation.
/// Each trajectory carries its final weight w_T^i at every time step.
SuffStats iteration_stats(const ParticleSystem& system, const ModelParams& model, const Dataset& data,
                          Equation equation, kernels::Backend backend = kernels::Backend::parallel);

/// (1 - gamma) * old + gamma * fresh. An empty `old` is treated as zero.
SuffStats blend_stats(const SuffStats& old, const SuffStats& fresh, double gamma);

struct MStepResult {
  Eigen::MatrixXd Gamma;
  Eigen::MatrixXd Pi;
  int floor_activations = 0;
};

/// Closed-form maximizer of the blended auxiliary function.
///
/// Each row solves (Sigma_SS + P_S/T) g_S = Psi_rS - Sigma_SF f over its
/// learnable columns S, holding the masked columns F at `structure.fixed`.
/// Pi is the residual second moment Phi - Psi G^T - G Psi^T + G Sigma G^T,
/// symmetrized and with eigenvalues floored at 1e-9. When
/// `structure.learn_noise` is false Pi is returned as `current_noise`.
/// `precision` is the diagonal of P over all regressor columns.
MStepResult m_step(const SuffStats& stats, const Eigen::VectorXd& precision, Eigen::Index T,
                   const EquationStructure& structure, const Eigen::MatrixXd& current_noise,
                   const std::string& equation_name = "equation");

struct PsaemConfig {
  int N = 5;
  long K = 100;
  GammaSchedule gamma;
  PriorSpec prior;
  StructureSpec structure;
  std::uint64_t seed = 1;
  ModelParams init_model;
  long trace_period = 1;
  Resampling resampling = Resampling::multinomial;
  kernels::Backend backend = kernels::Backend::parallel;

  void validate() const;
};

struct IterationRecord {
  long k = 0;
  double gamma = 0.0;
  double trace_Q = 0.0;
  double trace_R = 0.0;
  std::size_t degenerate_steps = 0;
  int floor_activations = 0;
};

struct TraceEntry {
  long k = 0;
  Eigen::MatrixXd Gamma_f;
  Eigen::MatrixXd Gamma_g;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

struct PsaemResult {
  ModelParams model;
  std::vector<TraceEntry> trace;
  std::vector<IterationRecord> diagnostics;
  Eigen::MatrixXd trajectory;  // final conditioned trajectory, T x n_x
  std::size_t degenerate_steps = 0;
  int floor_activations = 0;
};

/// Called after every iteration; returning false stops the run early.
using IterationObserver = std::function<bool(const IterationRecord&, const ModelParams&)>;

/// Particle stochastic-approximation EM. Starts from config.init_model and a
/// zero conditioned trajectory; DivergenceError is rethrown carrying the
/// iteration number.
PsaemResult psaem_identify(const Dataset& data, const PsaemConfig& config, const IterationObserver& observer = {});

/// Seed of the particle filter in iteration k, derived from the run seed.
std::uint64_t iteration_seed(std::uint64_t seed, long k);

/// Default starting point: zero coefficients except 0.5 on the diagonal of
/// the linear-feature block of the state equation, Q = R = (mean output
/// variance) * I, and p(x_1) = N(0, I).
ModelParams default_initial_model(int nx, FeatureMap basis_x, const Dataset& data, FeatureMap basis_u = {});

}  // namespace basisid
