#include "basisid/em.hpp"

#include "basisid/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace basisid {

void GammaSchedule::validate() const {
  if (!(exponent > 0.5 && exponent <= 1.0)) throw InvalidArgument("gamma exponent must lie in (0.5, 1]");
  if (burn_in < 0) throw InvalidArgument("gamma burn_in must be nonnegative");
}

double gamma_value(const GammaSchedule& schedule, long k) {
  if (k < 1) throw InvalidArgument("gamma_value needs k >= 1");
  if (k <= schedule.burn_in + 1) return 1.0;
  return std::pow(static_cast<double>(k - schedule.burn_in), -schedule.exponent);
}

namespace {

struct Moments {
  SuffStats state;
  SuffStats measurement;
};

void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

// Aggregates trajectory weights onto particle nodes: nodes(t, j) is the total
// final weight of the trajectories passing through particle j at time t.
Eigen::MatrixXd node_weights(const ParticleSystem& sys) {
  const Eigen::Index T = sys.T();
  const int N = sys.N();
  Eigen::MatrixXd nw = Eigen::MatrixXd::Zero(T, N);
  nw.row(T - 1) = sys.final_weights.transpose();
  for (Eigen::Index t = T - 2; t >= 0; --t)
    for (int i = 0; i < N; ++i) nw(t, sys.ancestors(t, i)) += nw(t + 1, i);
  return nw;
}

Moments moments(const ParticleSystem& sys, const ModelParams& model, const Dataset& data, bool want_state,
                bool want_measurement, kernels::Backend backend) {
  const Eigen::Index T = sys.T();
  const int N = sys.N();
  const int nx = model.nx();
  const int ny = model.ny();
  const int q = model.regressor_size();
  if (T != data.T() || nx != sys.nx()) throw DimensionError("particle system does not match data/model");
  if (data.ny() != ny) throw DimensionError("dataset and model output dimensions differ");
  if (model.nu > 0 && data.nu() != model.nu) throw DimensionError("dataset and model input dimensions differ");

  const Eigen::MatrixXd nw = node_weights(sys);

  // Regressors of every node that carries weight.
  IndexMatrix column = IndexMatrix::Constant(T, N, -1);
  Eigen::Index n_nodes = 0;
  for (Eigen::Index t = 0; t < T; ++t)
    for (int j = 0; j < N; ++j)
      if (nw(t, j) > 0.0) column(t, j) = static_cast<int>(n_nodes++);

  Eigen::MatrixXd Z(q, n_nodes);
  Eigen::VectorXd w(n_nodes);
  Eigen::MatrixXd Xa, Za;
  Eigen::VectorXd ut(model.nu);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& X = sys.states[static_cast<std::size_t>(t)];
    int active = 0;
    for (int j = 0; j < N; ++j) active += column(t, j) >= 0;
    if (active == 0) continue;
    Xa.resize(nx, active);
    int first = -1, k = 0;
    for (int j = 0; j < N; ++j) {
      if (column(t, j) < 0) continue;
      if (first < 0) first = column(t, j);
      Xa.col(k++) = X.col(j);
      w[column(t, j)] = nw(t, j);
    }
    if (model.nu > 0) ut = data.u.row(t).transpose();
    kernels::regressors(backend, model, Xa, ut.data(), Za);
    Z.middleCols(first, active) = Za;
  }

  const double scale = 1.0 / static_cast<double>(T);
  Moments out;
  if (want_measurement) {
    Eigen::MatrixXd Y(ny, n_nodes);
    for (Eigen::Index t = 0; t < T; ++t)
      for (int j = 0; j < N; ++j)
        if (column(t, j) >= 0) Y.col(column(t, j)) = data.y.row(t).transpose();
    auto& s = out.measurement;
    kernels::weighted_outer(backend, Y, Y, w, s.Phi);
    kernels::weighted_outer(backend, Y, Z, w, s.Psi);
    kernels::weighted_outer(backend, Z, Z, w, s.Sigma);
    s.Phi *= scale;
    s.Psi *= scale;
    s.Sigma *= scale;
    symmetrize(s.Phi);
    symmetrize(s.Sigma);
  }
  if (want_state) {
    Eigen::Index n = 0;
    for (Eigen::Index t = 0; t + 1 < T; ++t)
      for (int i = 0; i < N; ++i) n += nw(t + 1, i) > 0.0;
    Eigen::MatrixXd zeta(nx, n), Zs(q, n);
    Eigen::VectorXd ws(n);
    Eigen::Index c = 0;
    for (Eigen::Index t = 0; t + 1 < T; ++t) {
      const auto& Xn = sys.states[static_cast<std::size_t>(t + 1)];
      for (int i = 0; i < N; ++i) {
        const double wi = nw(t + 1, i);
        if (!(wi > 0.0)) continue;
        zeta.col(c) = Xn.col(i);
        Zs.col(c) = Z.col(column(t, sys.ancestors(t, i)));
        ws[c] = wi;
        ++c;
      }
    }
    auto& s = out.state;
    kernels::weighted_outer(backend, zeta, zeta, ws, s.Phi);
    kernels::weighted_outer(backend, zeta, Zs, ws, s.Psi);
    kernels::weighted_outer(backend, Zs, Zs, ws, s.Sigma);
    s.Phi *= scale;
    s.Psi *= scale;
    s.Sigma *= scale;
    symmetrize(s.Phi);
    symmetrize(s.Sigma);
  }
  return out;
}

}  // namespace

SuffStats iteration_stats(const ParticleSystem& system, const ModelParams& model, const Dataset& data,
                          Equation equation, kernels::Backend backend) {
  auto m = moments(system, model, data, equation == Equation::state, equation == Equation::measurement, backend);
  return equation == Equation::state ? std::move(m.state) : std::move(m.measurement);
}

SuffStats blend_stats(const SuffStats& old, const SuffStats& fresh, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
  if (old.empty()) {
    SuffStats out = fresh;
    out.Phi *= gamma;
    out.Psi *= gamma;
    out.Sigma *= gamma;
    return out;
  }
  if (old.Phi.rows() != fresh.Phi.rows() || old.Phi.cols() != fresh.Phi.cols() ||
      old.Psi.rows() != fresh.Psi.rows() || old.Psi.cols() != fresh.Psi.cols() ||
      old.Sigma.rows() != fresh.Sigma.rows() || old.Sigma.cols() != fresh.Sigma.cols())
    throw DimensionError("blend_stats: statistics have different shapes");
  SuffStats out;
  out.Phi = (1.0 - gamma) * old.Phi + gamma * fresh.Phi;
  out.Psi = (1.0 - gamma) * old.Psi + gamma * fresh.Psi;
  out.Sigma = (1.0 - gamma) * old.Sigma + gamma * fresh.Sigma;
  return out;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_or_throw(const Eigen::MatrixXd& a, const std::string& name, Eigen::Index row) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > std::numeric_limits<double>::epsilon()))
    throw RankDeficiencyError(name, static_cast<std::size_t>(row));
  return llt;
}

}  // namespace

MStepResult m_step(const SuffStats& stats, const Eigen::VectorXd& precision, Eigen::Index T,
                   const EquationStructure& structure, const Eigen::MatrixXd& current_noise,
                   const std::string& equation_name) {
  const Eigen::Index p = stats.Phi.rows();
  const Eigen::Index q = stats.Sigma.rows();
  if (stats.Phi.cols() != p || stats.Sigma.cols() != q || stats.Psi.rows() != p || stats.Psi.cols() != q)
    throw DimensionError("m_step: inconsistent statistic shapes");
  if (precision.size() != q) throw DimensionError("m_step: precision has wrong size");
  if (T < 1) throw InvalidArgument("m_step: T must be >= 1");
  if (structure.mask.rows() != p || structure.mask.cols() != q || structure.fixed.rows() != p ||
      structure.fixed.cols() != q)
    throw DimensionError("m_step: structure does not match the statistics");

  const Eigen::MatrixXd A = stats.Sigma + (precision / static_cast<double>(T)).asDiagonal().toDenseMatrix();
  MStepResult out;
  out.Gamma = structure.fixed;

  if (structure.mask.all()) {
    const auto llt = factor_or_throw(A, equation_name, 0);
    out.Gamma = llt.solve(stats.Psi.transpose()).transpose();
  } else {
    for (Eigen::Index r = 0; r < p; ++r) {
      std::vector<Eigen::Index> active, fixed;
      for (Eigen::Index c = 0; c < q; ++c) (structure.mask(r, c) ? active : fixed).push_back(c);
      if (active.empty()) continue;
      const auto na = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd As(na, na);
      Eigen::VectorXd b(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        double rhs = stats.Psi(r, active[a]);
        for (Eigen::Index f : fixed) rhs -= stats.Sigma(active[a], f) * structure.fixed(r, f);
        b[a] = rhs;
        for (Eigen::Index a2 = 0; a2 < na; ++a2) As(a, a2) = A(active[a], active[a2]);
      }
      const auto llt = factor_or_throw(As, equation_name, r);
      const Eigen::VectorXd g = llt.solve(b);
      for (Eigen::Index a = 0; a < na; ++a) out.Gamma(r, active[a]) = g[a];
    }
  }
  if (!out.Gamma.allFinite()) throw RankDeficiencyError(equation_name, 0);

  if (!structure.learn_noise) {
    out.Pi = current_noise;
    return out;
  }
  const Eigen::MatrixXd GPsiT = out.Gamma * stats.Psi.transpose();
  Eigen::MatrixXd Pi = stats.Phi - GPsiT - GPsiT.transpose() + out.Gamma * stats.Sigma * out.Gamma.transpose();
  symmetrize(Pi);
  constexpr double kFloor = 1e-9;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pi);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < kFloor) {
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kFloor);
    Pi = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    symmetrize(Pi);
    // Rounding in the reconstruction can dip just below the floor again.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(Pi, Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() < kFloor)
      Pi += (kFloor - check.eigenvalues().minCoeff()) * Eigen::MatrixXd::Identity(p, p);
    out.floor_activations = 1;
  }
  out.Pi = std::move(Pi);
  return out;
}

void PsaemConfig::validate() const {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (K < 0) throw InvalidArgument("K must be >= 0");
  if (trace_period < 1) throw InvalidArgument("trace_period must be >= 1");
  gamma.validate();
  prior.validate();
  init_model.validate();
}

std::uint64_t iteration_seed(std::uint64_t seed, long k) {
  const auto ku = static_cast<std::uint64_t>(k);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(ku), static_cast<std::uint32_t>(ku >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

PsaemResult psaem_identify(const Dataset& data, const PsaemConfig& config, const IterationObserver& observer) {
  config.validate();
  data.validate();
  const auto T = data.T();
  ModelParams model = config.init_model;
  if (data.ny() != model.ny()) throw DimensionError("dataset and model output dimensions differ");
  if (model.nu > 0 && data.nu() != model.nu) throw DimensionError("dataset and model input dimensions differ");

  StructureSpec structure = config.structure;
  structure.resolve(model);
  structure.apply_fixed(model);
  model.validate();

  const bool learn_state = !structure.state.fully_known();
  const bool learn_meas = !structure.measurement.fully_known();
  FeatureMap all;
  all.blocks = model.basis_x.blocks;
  all.blocks.insert(all.blocks.end(), model.basis_u.blocks.begin(), model.basis_u.blocks.end());
  const Eigen::VectorXd precision = all.precision(config.prior);

  PsaemResult result;
  auto snapshot = [&](long k) {
    result.trace.push_back({k, model.Gamma_f, model.Gamma_g, model.Q, model.R});
  };
  snapshot(0);

  Eigen::MatrixXd trajectory = Eigen::MatrixXd::Zero(T, model.nx());
  SuffStats stats_f, stats_g;
  CpfOptions cpf_options{config.N, 0, config.resampling, config.backend};

  for (long k = 1; k <= config.K; ++k) {
    cpf_options.seed = iteration_seed(config.seed, k);
    IterationRecord rec;
    rec.k = k;
    rec.gamma = gamma_value(config.gamma, k);
    try {
      CpfResult cpf = cpf_as(model, data, trajectory, cpf_options);
      rec.degenerate_steps = cpf.degenerate_steps;
      auto m = moments(cpf.system, model, data, learn_state, learn_meas, config.backend);
      trajectory = std::move(cpf.trajectory);
      if (learn_state) {
        stats_f = blend_stats(stats_f, m.state, rec.gamma);
        auto res = m_step(stats_f, precision, T, structure.state, model.Q, "state equation");
        model.Gamma_f = std::move(res.Gamma);
        model.Q = std::move(res.Pi);
        rec.floor_activations += res.floor_activations;
      }
      if (learn_meas) {
        stats_g = blend_stats(stats_g, m.measurement, rec.gamma);
        auto res = m_step(stats_g, precision, T, structure.measurement, model.R, "measurement equation");
        model.Gamma_g = std::move(res.Gamma);
        model.R = std::move(res.Pi);
        rec.floor_activations += res.floor_activations;
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.time(), static_cast<std::size_t>(k));
    }
    rec.trace_Q = model.Q.trace();
    rec.trace_R = model.R.trace();
    result.degenerate_steps += rec.degenerate_steps;
    result.floor_activations += rec.floor_activations;
    result.diagnostics.push_back(rec);
    if (k % config.trace_period == 0 || k == config.K) snapshot(k);
    if (observer && !observer(rec, model)) {
      if (result.trace.back().k != k) snapshot(k);
      break;
    }
  }
  result.model = std::move(model);
  result.trajectory = std::move(trajectory);
  return result;
}

ModelParams default_initial_model(int nx, FeatureMap basis_x, const Dataset& data, FeatureMap basis_u) {
  data.validate();
  ModelParams m = ModelParams::zeros(nx, data.ny(), std::move(basis_x), data.nu(), std::move(basis_u));
  int col = 0;
  for (const auto& b : m.basis_x.blocks) {
    if (b.kind == BasisKind::linear)
      for (int d = 0; d < b.dims; ++d)
        if (b.input(d) < nx) m.Gamma_f(b.input(d), col + d) = 0.5;
    col += b.feature_count();
  }
  double var = 0.0;
  for (Eigen::Index c = 0; c < data.y.cols(); ++c) {
    const auto col_y = data.y.col(c).array();
    var += (col_y - col_y.mean()).square().mean();
  }
  var /= static_cast<double>(data.y.cols());
  if (!(var > 0.0) || !std::isfinite(var)) var = 1.0;
  m.Q = var * Eigen::MatrixXd::Identity(nx, nx);
  m.R = var * Eigen::MatrixXd::Identity(data.ny(), data.ny());
  return m;
}

}  // namespace basisid
