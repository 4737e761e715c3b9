#pragma once

#include "basisid/model.hpp"

#include <Eigen/Dense>

#include <string>

// Data-parallel inner loops of the particle filter and the E-step.
//
// Every kernel exists twice: `serial::` is the plain-loop reference kept for
// testing, `omp::` is the OpenMP version used by default. The per-particle
// kernels produce bitwise-identical results in both versions; the reductions
// agree to rounding and are deterministic for any thread count because the
// partition into chunks does not depend on the number of threads.
namespace basisid::kernels {

enum class Backend { serial, parallel };

std::string to_string(Backend backend);
Backend parse_backend(const std::string& s);

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

namespace serial {

/// Z.col(i) = [phi_x(X.col(i)); phi_u(u)]. Z must be q x N.
void regressors(const ModelParams& model, const Eigen::MatrixXd& X, const double* u, Eigen::MatrixXd& Z);

/// out[i] = log N(residuals.col(i); 0, LL^T) for a lower Cholesky factor L.
void log_normal_columns(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& chol_lower,
                        double log_det, Eigen::VectorXd& out);

/// out = sum_i w[i] * A.col(i) * B.col(i)^T; out is resized to A.rows() x B.rows().
void weighted_outer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& w,
                    Eigen::MatrixXd& out);

}  // namespace serial

namespace omp {

void regressors(const ModelParams& model, const Eigen::MatrixXd& X, const double* u, Eigen::MatrixXd& Z);
void log_normal_columns(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& chol_lower,
                        double log_det, Eigen::VectorXd& out);
void weighted_outer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& w,
                    Eigen::MatrixXd& out);

}  // namespace omp

inline void regressors(Backend b, const ModelParams& model, const Eigen::MatrixXd& X, const double* u,
                       Eigen::MatrixXd& Z) {
  b == Backend::serial ? serial::regressors(model, X, u, Z) : omp::regressors(model, X, u, Z);
}

inline void log_normal_columns(Backend b, const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& chol_lower,
                               double log_det, Eigen::VectorXd& out) {
  b == Backend::serial ? serial::log_normal_columns(residuals, chol_lower, log_det, out)
                       : omp::log_normal_columns(residuals, chol_lower, log_det, out);
}

inline void weighted_outer(Backend b, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::VectorXd& w, Eigen::MatrixXd& out) {
  b == Backend::serial ? serial::weighted_outer(A, B, w, out) : omp::weighted_outer(A, B, w, out);
}

}  // namespace basisid::kernels
