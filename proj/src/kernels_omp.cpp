#include "basisid/kernels.hpp"

#include <vector>

namespace basisid::kernels::omp {

namespace {

// Below this much work per call the thread team costs more than it saves.
constexpr Eigen::Index kMinParallelWork = 1 << 14;
// Fixed reduction chunk; independent of the thread count so sums are reproducible.
constexpr Eigen::Index kChunk = 256;

}  // namespace

void regressors(const ModelParams& model, const Eigen::MatrixXd& X, const double* u, Eigen::MatrixXd& Z) {
  const Eigen::Index n = X.cols();
  const Eigen::Index q = model.regressor_size();
  Z.resize(q, n);
  const bool big = n * (q + 1) >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index i = 0; i < n; ++i) model.regressor_into(X.col(i).data(), u, Z.col(i).data());
}

void log_normal_columns(const Eigen::MatrixXd& residuals, const Eigen::MatrixXd& chol_lower, double log_det,
                        Eigen::VectorXd& out) {
  const Eigen::Index n = residuals.cols();
  const Eigen::Index d = residuals.rows();
  out.resize(n);
  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  const bool big = n * d * d >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - begin);
    Eigen::VectorXd part;
    serial::log_normal_columns(residuals.middleCols(begin, len), chol_lower, log_det, part);
    out.segment(begin, len) = part;
  }
}

void weighted_outer(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& w,
                    Eigen::MatrixXd& out) {
  const Eigen::Index n = A.cols();
  const Eigen::Index chunks = (n + kChunk - 1) / kChunk;
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(chunks));
  const bool big = n * A.rows() * B.rows() >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    const Eigen::Index begin = c * kChunk;
    const Eigen::Index len = std::min(kChunk, n - begin);
    partial[static_cast<std::size_t>(c)].noalias() =
        (A.middleCols(begin, len) * w.segment(begin, len).asDiagonal()) * B.middleCols(begin, len).transpose();
  }
  out = Eigen::MatrixXd::Zero(A.rows(), B.rows());
  for (const auto& p : partial) out += p;
}

}  // namespace basisid::kernels::omp
