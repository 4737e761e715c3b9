#include "basisid/error.hpp"
#include "basisid/kernels.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace basisid::kernels {

std::string to_string(Backend backend) { return backend == Backend::serial ? "serial" : "parallel"; }

Backend parse_backend(const std::string& s) {
  if (s == "serial") return Backend::serial;
  if (s == "parallel") return Backend::parallel;
  throw InvalidArgument("unknown backend '" + s + "'");
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void regressors(const ModelParams& model, const Eigen::MatrixXd& X, const double* u, Eigen::MatrixXd& Z) {
  Z.resize(model.regressor_size(), X.cols());
  for (Eigen::Index i = 0; i < X.cols(); ++i) model.regressor_into(X.col(i).data(), u, Z.col(i).data());
}

void log_normal_columns(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& chol_lower, double log_det,
                        Eigen::VectorXd& out) {
  const Eigen::Index d = residuals.rows();
  const double c = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
  out.resize(residuals.cols());
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < residuals.cols(); ++i) {
    // Forward substitution L v = r.
    for (Eigen::Index a = 0; a < d; ++a) {
      double s = residuals(a, i);
      for (Eigen::Index b = 0; b < a; ++b) s -= chol_lower(a, b) * v[b];
      v[a] = s / chol_lower(a, a);
    }
    out[i] = c - 0.5 * v.squaredNorm();
  }
}

void weighted_outer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& w,
                    Eigen::MatrixXd& out) {
  out = Eigen::MatrixXd::Zero(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    const double wi = w[i];
    if (wi == 0.0) continue;
    for (Eigen::Index c = 0; c < B.rows(); ++c) {
      const double bc = wi * B(c, i);
      for (Eigen::Index r = 0; r < A.rows(); ++r) out(r, c) += A(r, i) * bc;
    }
  }
}

}  // namespace serial

}  // namespace basisid::kernels
