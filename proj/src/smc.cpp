#include "basisid/smc.hpp"

#include "basisid/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace basisid {

std::string to_string(Resampling r) { return r == Resampling::multinomial ? "multinomial" : "systematic"; }

Resampling parse_resampling(const std::string& s) {
  if (s == "multinomial") return Resampling::multinomial;
  if (s == "systematic") return Resampling::systematic;
  throw InvalidArgument("unknown resampling scheme '" + s + "'");
}

std::vector<int> ParticleSystem::lineage(int i) const {
  const auto T_ = T();
  std::vector<int> idx(static_cast<std::size_t>(T_));
  idx.back() = i;
  for (Eigen::Index t = T_ - 2; t >= 0; --t)
    idx[static_cast<std::size_t>(t)] = ancestors(t, idx[static_cast<std::size_t>(t + 1)]);
  return idx;
}

Eigen::MatrixXd ParticleSystem::trace(int i) const {
  const auto idx = lineage(i);
  Eigen::MatrixXd traj(T(), nx());
  for (Eigen::Index t = 0; t < T(); ++t) traj.row(t) = states[static_cast<std::size_t>(t)].col(idx[static_cast<std::size_t>(t)]).transpose();
  return traj;
}

namespace {

struct GaussianFactor {
  Eigen::MatrixXd lower;
  double log_det = 0.0;
};

GaussianFactor factor(const Eigen::MatrixXd& cov, const char* name) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidArgument(std::string(name) + " is not positive definite");
  GaussianFactor f;
  f.lower = llt.matrixL();
  f.log_det = 2.0 * f.lower.diagonal().array().log().sum();
  if (!std::isfinite(f.log_det)) throw InvalidArgument(std::string(name) + " is not positive definite");
  return f;
}

double clean(double lw) { return std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw; }

void cumulative_into(std::span<const double> weights, std::vector<double>& cum) {
  cum.resize(weights.size());
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w < 0.0 || std::isnan(w)) throw InvalidArgument("resampling weights must be nonnegative");
    if (std::isfinite(w)) s += w;
    cum[i] = s;
  }
  if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateWeights();
}

int pick(const std::vector<double>& cum, double u) {
  // First index whose cumulative weight exceeds u; zero-weight entries are never chosen.
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  while (it != cum.begin() && *it == *(it - 1)) --it;
  return static_cast<int>(it - cum.begin());
}

void multinomial_into(const std::vector<double>& cum, int count, Rng& rng, std::vector<int>& out) {
  std::uniform_real_distribution<double> uniform(0.0, cum.back());
  out.resize(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& o : out) o = pick(cum, uniform(rng));
}

void systematic_into(const std::vector<double>& cum, int count, Rng& rng, std::vector<int>& out) {
  out.resize(static_cast<std::size_t>(std::max(count, 0)));
  if (out.empty()) return;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double step = cum.back() / count;
  const double u0 = uniform(rng) * step;
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = pick(cum, u0 + i * step);
}

}  // namespace

double log_measurement_weight(const ModelParams& model, std::span<const double> y, std::span<const double> x,
                              std::span<const double> u) {
  if (static_cast<int>(y.size()) != model.ny()) throw DimensionError("measurement has wrong length");
  const auto f = factor(model.R, "R");
  const Eigen::VectorXd mean = obs_mean(model, x, u);
  const Eigen::MatrixXd resid = Eigen::Map<const Eigen::VectorXd>(y.data(), model.ny()) - mean;
  Eigen::VectorXd out;
  kernels::serial::log_normal_columns(resid, f.lower, f.log_det, out);
  return out[0];
}

double measurement_weight(const ModelParams& model, std::span<const double> y, std::span<const double> x,
                          std::span<const double> u) {
  return std::exp(log_measurement_weight(model, y, x, u));
}

std::vector<int> multinomial_resample(std::span<const double> weights, int count, Rng& rng) {
  std::vector<double> cum;
  cumulative_into(weights, cum);
  std::vector<int> out;
  multinomial_into(cum, count, rng, out);
  return out;
}

std::vector<int> systematic_resample(std::span<const double> weights, int count, Rng& rng) {
  std::vector<double> cum;
  cumulative_into(weights, cum);
  std::vector<int> out;
  systematic_into(cum, count, rng, out);
  return out;
}

bool normalize_log_weights(const Eigen::VectorXd& log_weights, Eigen::VectorXd& probabilities) {
  const Eigen::Index n = log_weights.size();
  probabilities.resize(n);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) max_lw = std::max(max_lw, clean(log_weights[i]));
  if (!std::isfinite(max_lw)) {
    probabilities.setConstant(1.0 / static_cast<double>(n));
    return false;
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    probabilities[i] = std::exp(clean(log_weights[i]) - max_lw);
    total += probabilities[i];
  }
  probabilities /= total;
  return true;
}

namespace {

// Buffers reused across time steps.
struct AncestorWork {
  Eigen::MatrixXd resid;
  Eigen::VectorXd log_trans;
};

// log w^j + log N(next; means.col(j), Q), normalized. Returns false on degeneracy.
bool ancestor_probabilities(const Eigen::VectorXd& filter_weights, const Eigen::MatrixXd& means,
                            const Eigen::VectorXd& next, const GaussianFactor& q, kernels::Backend backend,
                            AncestorWork& work, Eigen::VectorXd& probabilities) {
  work.resid = (-means).colwise() + next;
  kernels::log_normal_columns(backend, work.resid, q.lower, q.log_det, work.log_trans);
  work.log_trans.array() += filter_weights.array().log();
  return normalize_log_weights(work.log_trans, probabilities);
}

}  // namespace

Eigen::VectorXd ancestor_weights(const ModelParams& model, const Eigen::MatrixXd& particles_t,
                                 std::span<const double> u_t, std::span<const double> conditioned_next,
                                 const Eigen::VectorXd& filter_weights_t) {
  model.validate();
  if (particles_t.rows() != model.nx() || filter_weights_t.size() != particles_t.cols())
    throw DimensionError("ancestor_weights: particle and weight shapes disagree");
  if (static_cast<int>(conditioned_next.size()) != model.nx() || static_cast<int>(u_t.size()) != model.nu)
    throw DimensionError("ancestor_weights: state or input has wrong length");
  const auto q = factor(model.Q, "Q");
  Eigen::MatrixXd Z;
  kernels::serial::regressors(model, particles_t, u_t.data(), Z);
  const Eigen::MatrixXd means = model.Gamma_f * Z;
  Eigen::VectorXd p;
  AncestorWork work;
  if (!ancestor_probabilities(filter_weights_t, means,
                              Eigen::Map<const Eigen::VectorXd>(conditioned_next.data(), model.nx()), q,
                              kernels::Backend::serial, work, p))
    throw DegenerateWeights();
  return p;
}

CpfResult cpf_as(const ModelParams& model, const Dataset& data, const Eigen::MatrixXd& conditioned,
                 const CpfOptions& options) {
  model.validate();
  data.validate();
  const int N = options.N;
  const Eigen::Index T = data.T();
  const int nx = model.nx();
  if (N < 1) throw InvalidArgument("particle count N must be >= 1");
  if (data.ny() != model.ny()) throw DimensionError("dataset and model output dimensions differ");
  if (model.nu > 0 && data.nu() != model.nu) throw DimensionError("dataset and model input dimensions differ");
  if (conditioned.rows() != T || conditioned.cols() != nx)
    throw DimensionError("conditioned trajectory must be T x n_x");

  const auto q = factor(model.Q, "Q");
  const auto r = factor(model.R, "R");
  const auto p1 = factor(model.init_cov, "init_cov");
  const auto backend = options.backend;

  Rng rng(options.seed);
  std::normal_distribution<double> normal;

  CpfResult result;
  ParticleSystem& sys = result.system;
  sys.states.assign(static_cast<std::size_t>(T), Eigen::MatrixXd(nx, N));
  sys.ancestors.resize(std::max<Eigen::Index>(T - 1, 0), N);
  sys.filter_weights.resize(T, N);

  std::vector<double> cum;
  std::vector<int> drawn;
  const auto draw = [&](const Eigen::VectorXd& w, int count) -> const std::vector<int>& {
    cumulative_into(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), cum);
    if (options.resampling == Resampling::multinomial) multinomial_into(cum, count, rng, drawn);
    else systematic_into(cum, count, rng, drawn);
    return drawn;
  };

  Eigen::VectorXd eps(nx);
  {
    auto& X = sys.states[0];
    for (int i = 0; i < N - 1; ++i) {
      for (int d = 0; d < nx; ++d) eps[d] = normal(rng);
      X.col(i) = model.init_mean + p1.lower * eps;
    }
    X.col(N - 1) = conditioned.row(0).transpose();
  }

  Eigen::MatrixXd Z, means, resid;
  Eigen::VectorXd log_w, w, anc_p;
  AncestorWork work;
  Eigen::VectorXd ut(model.nu);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& X = sys.states[static_cast<std::size_t>(t)];
    if (!X.allFinite()) throw DivergenceError(static_cast<std::size_t>(t));
    if (model.nu > 0) ut = data.u.row(t).transpose();
    kernels::regressors(backend, model, X, ut.data(), Z);

    // Measurement weights.
    resid.noalias() = -(model.Gamma_g * Z);
    resid.colwise() += data.y.row(t).transpose();
    kernels::log_normal_columns(backend, resid, r.lower, r.log_det, log_w);
    if (!normalize_log_weights(log_w, w)) ++result.degenerate_steps;
    sys.filter_weights.row(t) = w.transpose();
    if (t == T - 1) break;

    // Resample and propagate the free particles.
    means.noalias() = model.Gamma_f * Z;
    auto& Xn = sys.states[static_cast<std::size_t>(t + 1)];
    const auto& parents = draw(w, N - 1);
    for (int i = 0; i < N - 1; ++i) {
      const int a = parents[static_cast<std::size_t>(i)];
      sys.ancestors(t, i) = a;
      for (int d = 0; d < nx; ++d) eps[d] = normal(rng);
      Xn.col(i) = means.col(a) + q.lower * eps;
    }
    Xn.col(N - 1) = conditioned.row(t + 1).transpose();

    // Ancestor sampling for the conditioned particle.
    if (!ancestor_probabilities(w, means, Xn.col(N - 1), q, backend, work, anc_p)) ++result.degenerate_steps;
    sys.ancestors(t, N - 1) = draw(anc_p, 1)[0];
  }

  sys.final_weights = sys.filter_weights.row(T - 1).transpose();
  result.selected = draw(sys.final_weights, 1)[0];
  result.trajectory = sys.trace(result.selected);
  return result;
}

Eigen::MatrixXd predict_outputs(const ModelParams& model, const Dataset& data, int N, std::uint64_t seed) {
  model.validate();
  data.validate();
  if (N < 1) throw InvalidArgument("particle count N must be >= 1");
  if (data.ny() != model.ny()) throw DimensionError("dataset and model output dimensions differ");
  if (model.nu > 0 && data.nu() != model.nu) throw DimensionError("dataset and model input dimensions differ");
  const auto q = factor(model.Q, "Q");
  const auto r = factor(model.R, "R");
  const auto p1 = factor(model.init_cov, "init_cov");
  const int nx = model.nx();
  Rng rng(seed);
  std::normal_distribution<double> normal;

  Eigen::MatrixXd X(nx, N), Xn(nx, N), Z, pred, resid, means;
  Eigen::VectorXd eps(nx), log_w, w, ut(model.nu);
  for (int i = 0; i < N; ++i) {
    for (int d = 0; d < nx; ++d) eps[d] = normal(rng);
    X.col(i) = model.init_mean + p1.lower * eps;
  }
  Eigen::MatrixXd out(data.T(), model.ny());
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    if (!X.allFinite()) throw DivergenceError(static_cast<std::size_t>(t));
    if (model.nu > 0) ut = data.u.row(t).transpose();
    kernels::omp::regressors(model, X, ut.data(), Z);
    pred.noalias() = model.Gamma_g * Z;
    out.row(t) = pred.rowwise().mean().transpose();
    resid = (-pred).colwise() + data.y.row(t).transpose();
    kernels::omp::log_normal_columns(resid, r.lower, r.log_det, log_w);
    normalize_log_weights(log_w, w);
    means.noalias() = model.Gamma_f * Z;
    const auto parents = multinomial_resample(std::span<const double>(w.data(), static_cast<std::size_t>(N)), N, rng);
    for (int i = 0; i < N; ++i) {
      for (int d = 0; d < nx; ++d) eps[d] = normal(rng);
      Xn.col(i) = means.col(parents[static_cast<std::size_t>(i)]) + q.lower * eps;
    }
    X.swap(Xn);
  }
  return out;
}

}  // namespace basisid
