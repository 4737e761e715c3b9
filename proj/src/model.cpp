#include "basisid/model.hpp"

#include "basisid/error.hpp"

#include <cmath>
#include <random>

namespace basisid {

namespace {

bool symmetric_positive_definite(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

ModelParams ModelParams::zeros(int nx, int ny, FeatureMap basis_x, int nu, FeatureMap basis_u) {
  ModelParams m;
  m.nu = nu;
  m.basis_x = std::move(basis_x);
  m.basis_u = std::move(basis_u);
  const int q = m.regressor_size();
  m.Gamma_f = Eigen::MatrixXd::Zero(nx, q);
  m.Gamma_g = Eigen::MatrixXd::Zero(ny, q);
  m.Q = Eigen::MatrixXd::Identity(nx, nx);
  m.R = Eigen::MatrixXd::Identity(ny, ny);
  m.init_mean = Eigen::VectorXd::Zero(nx);
  m.init_cov = Eigen::MatrixXd::Identity(nx, nx);
  return m;
}

void ModelParams::validate() const {
  if (nx() < 1) throw InvariantError("n_x >= 1");
  if (ny() < 1) throw InvariantError("n_y >= 1");
  if (nu < 0) throw InvariantError("n_u >= 0");
  try {
    basis_x.validate(nx());
    basis_u.validate(nu);
  } catch (const Error& e) {
    throw InvariantError(std::string("basis valid: ") + e.what());
  }
  const int q = regressor_size();
  if (Gamma_f.rows() != nx() || Gamma_f.cols() != q) throw InvariantError("Gamma_f is n_x x (m_x + m_u)");
  if (Gamma_g.rows() != ny() || Gamma_g.cols() != q) throw InvariantError("Gamma_g is n_y x (m_x + m_u)");
  if (!Gamma_f.allFinite()) throw InvariantError("Gamma_f finite");
  if (!Gamma_g.allFinite()) throw InvariantError("Gamma_g finite");
  if (!symmetric_positive_definite(Q)) throw InvariantError("Q positive definite");
  if (!symmetric_positive_definite(R)) throw InvariantError("R positive definite");
  if (init_mean.size() != nx() || !init_mean.allFinite()) throw InvariantError("init_mean is a finite n_x vector");
  if (init_cov.rows() != nx() || !symmetric_positive_definite(init_cov))
    throw InvariantError("init_cov positive definite");
}

void ModelParams::regressor_into(const double* x, const double* u, double* out) const {
  basis_x.eval_into(x, out);
  if (!basis_u.empty()) basis_u.eval_into(u, out + mx());
}

StructureSpec StructureSpec::learn_all(const ModelParams& model) {
  StructureSpec s;
  s.resolve(model);
  return s;
}

namespace {

void resolve_equation(EquationStructure& eq, const Eigen::MatrixXd& gamma, const char* name) {
  if (eq.mask.size() == 0) eq.mask = BoolMatrix::Constant(gamma.rows(), gamma.cols(), true);
  if (eq.fixed.size() == 0) eq.fixed = gamma;
  if (eq.mask.rows() != gamma.rows() || eq.mask.cols() != gamma.cols())
    throw DimensionError(std::string(name) + " mask must match the coefficient matrix shape");
  if (eq.fixed.rows() != gamma.rows() || eq.fixed.cols() != gamma.cols())
    throw DimensionError(std::string(name) + " fixed values must match the coefficient matrix shape");
  if (!eq.fixed.allFinite()) throw InvalidArgument(std::string(name) + " fixed values must be finite");
}

void apply_equation(const EquationStructure& eq, Eigen::MatrixXd& gamma) {
  for (Eigen::Index r = 0; r < gamma.rows(); ++r)
    for (Eigen::Index c = 0; c < gamma.cols(); ++c)
      if (!eq.mask(r, c)) gamma(r, c) = eq.fixed(r, c);
}

}  // namespace

void StructureSpec::resolve(const ModelParams& model) {
  resolve_equation(state, model.Gamma_f, "state");
  resolve_equation(measurement, model.Gamma_g, "measurement");
}

void StructureSpec::apply_fixed(ModelParams& model) const {
  apply_equation(state, model.Gamma_f);
  apply_equation(measurement, model.Gamma_g);
}

void Dataset::validate() const {
  if (y.cols() < 1) throw InvalidArgument("dataset has no output columns");
  if (y.rows() < 1) throw InvalidArgument("dataset is empty");
  if (u.cols() > 0 && u.rows() != y.rows()) throw DimensionError("u and y have different lengths");
  if (!y.allFinite() || !u.allFinite()) throw InvalidArgument("dataset contains non-finite values");
}

namespace {

void check_args(const ModelParams& model, std::span<const double> x, std::span<const double> u) {
  if (static_cast<int>(x.size()) != model.nx())
    throw DimensionError("state has length " + std::to_string(x.size()) + ", model n_x is " +
                         std::to_string(model.nx()));
  if (static_cast<int>(u.size()) != model.nu)
    throw DimensionError("input has length " + std::to_string(u.size()) + ", model n_u is " +
                         std::to_string(model.nu));
}

}  // namespace

Eigen::VectorXd regressor(const ModelParams& model, std::span<const double> x, std::span<const double> u) {
  check_args(model, x, u);
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite state");
  Eigen::VectorXd z(model.regressor_size());
  model.regressor_into(x.data(), u.data(), z.data());
  return z;
}

Eigen::VectorXd step_mean(const ModelParams& model, std::span<const double> x, std::span<const double> u) {
  return model.Gamma_f * regressor(model, x, u);
}

Eigen::VectorXd obs_mean(const ModelParams& model, std::span<const double> x, std::span<const double> u) {
  return model.Gamma_g * regressor(model, x, u);
}

SimulationResult simulate(const ModelParams& model, const Eigen::MatrixXd& u, Eigen::Index T,
                          std::span<const double> x1, std::uint64_t seed, bool with_noise) {
  model.validate();
  if (static_cast<int>(x1.size()) != model.nx()) throw DimensionError("x1 must have length n_x");
  if (model.nu > 0 && (u.rows() < T || u.cols() != model.nu))
    throw DimensionError("input sequence must be T x n_u");

  const int nx = model.nx(), ny = model.ny();
  SimulationResult out{Eigen::MatrixXd(T, nx), Eigen::MatrixXd(T, ny)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::MatrixXd Lq = model.Q.llt().matrixL();
  const Eigen::MatrixXd Lr = model.R.llt().matrixL();

  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x1.data(), nx);
  Eigen::VectorXd z(model.regressor_size());
  Eigen::VectorXd ut(model.nu), noise_x(nx), noise_y(ny);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (!x.allFinite()) throw DivergenceError(static_cast<std::size_t>(t));
    if (model.nu > 0) ut = u.row(t).transpose();
    model.regressor_into(x.data(), ut.data(), z.data());
    out.x.row(t) = x.transpose();
    Eigen::VectorXd y = model.Gamma_g * z;
    if (with_noise) {
      for (int i = 0; i < ny; ++i) noise_y[i] = normal(rng);
      y += Lr * noise_y;
    }
    out.y.row(t) = y.transpose();
    x = model.Gamma_f * z;
    if (with_noise) {
      for (int i = 0; i < nx; ++i) noise_x[i] = normal(rng);
      x += Lq * noise_x;
    }
  }
  if (!out.y.allFinite()) {
    for (Eigen::Index t = 0; t < T; ++t)
      if (!out.y.row(t).allFinite()) throw DivergenceError(static_cast<std::size_t>(t));
  }
  return out;
}

ErrorMetrics metrics(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_sim) {
  if (y_true.rows() != y_sim.rows() || y_true.cols() != y_sim.cols())
    throw DimensionError("metrics: series have different shapes");
  if (y_true.size() == 0) throw InvalidArgument("metrics: empty series");
  const Eigen::ArrayXXd e = (y_true - y_sim).array();
  const double n = static_cast<double>(e.size());
  ErrorMetrics m;
  m.mean = e.sum() / n;
  m.std = std::sqrt((e - m.mean).square().sum() / n);
  m.rmse = std::sqrt(e.square().sum() / n);
  return m;
}

}  // namespace basisid
