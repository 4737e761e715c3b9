#include "basisid/basis.hpp"

#include "basisid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace basisid {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::fourier: return "fourier";
    case BasisKind::linear: return "linear";
    case BasisKind::constant: return "constant";
  }
  return "?";
}

std::string to_string(Composition composition) {
  return composition == Composition::tensor_product ? "tensor_product" : "additive";
}

BasisKind parse_basis_kind(const std::string& s) {
  if (s == "fourier") return BasisKind::fourier;
  if (s == "linear") return BasisKind::linear;
  if (s == "constant") return BasisKind::constant;
  throw InvalidArgument("unknown basis kind '" + s + "'");
}

Composition parse_composition(const std::string& s) {
  if (s == "tensor_product") return Composition::tensor_product;
  if (s == "additive") return Composition::additive;
  throw InvalidArgument("unknown basis composition '" + s + "'");
}

std::string to_string(PriorScheme scheme) {
  switch (scheme) {
    case PriorScheme::none: return "none";
    case PriorScheme::flat: return "flat";
    case PriorScheme::frequency_squared: return "frequency_squared";
  }
  return "?";
}

PriorScheme parse_prior_scheme(const std::string& s) {
  if (s == "none") return PriorScheme::none;
  if (s == "flat") return PriorScheme::flat;
  if (s == "frequency_squared") return PriorScheme::frequency_squared;
  throw InvalidArgument("unknown prior scheme '" + s + "'");
}

BasisSpec BasisSpec::fourier(int m, double L, int dims, Composition composition) {
  BasisSpec s;
  s.kind = BasisKind::fourier;
  s.m = m;
  s.L = L;
  s.dims = dims;
  s.composition = composition;
  return s;
}

BasisSpec BasisSpec::linear(int dims) {
  BasisSpec s;
  s.kind = BasisKind::linear;
  s.m = dims;
  s.dims = dims;
  return s;
}

BasisSpec BasisSpec::constant() {
  BasisSpec s;
  s.kind = BasisKind::constant;
  s.m = 1;
  s.dims = 1;
  return s;
}

int BasisSpec::feature_count() const {
  switch (kind) {
    case BasisKind::linear: return dims;
    case BasisKind::constant: return 1;
    case BasisKind::fourier:
      if (dims == 1) return m;
      if (composition == Composition::additive) return m * dims;
      {
        int total = 1;
        for (int d = 0; d < dims; ++d) total *= m;
        return total;
      }
  }
  return 0;
}

void BasisSpec::validate() const {
  if (dims < 1) throw InvalidArgument("basis dims must be >= 1");
  if (m < 1) throw InvalidArgument("basis count m must be >= 1");
  if (!inputs.empty() && static_cast<int>(inputs.size()) != dims)
    throw InvalidArgument("basis inputs list must have one entry per dimension");
  for (int i : inputs)
    if (i < 0) throw InvalidArgument("basis input index must be nonnegative");
  switch (kind) {
    case BasisKind::fourier:
      if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("fourier basis needs L > 0");
      break;
    case BasisKind::linear:
      if (m != dims) throw InvalidArgument("linear basis requires m == dims");
      break;
    case BasisKind::constant:
      if (m != 1) throw InvalidArgument("constant basis requires m == 1");
      break;
  }
}

void PriorSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("prior lambda must be finite and nonnegative");
}

namespace {

// [1, c1, s1, c2, s2, ...] truncated to m, with the angle-addition recurrence.
void fourier_1d(double x, int m, double L, double* out) {
  x = std::clamp(x, -L, L);
  out[0] = 1.0;
  if (m == 1) return;
  const double theta = std::numbers::pi * x / L;
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double c = c1, s = s1;
  for (int j = 1; j < m; j += 2) {
    out[j] = c;
    if (j + 1 < m) out[j + 1] = s;
    const double cn = c * c1 - s * s1;
    s = s * c1 + c * s1;
    c = cn;
  }
}

int fourier_order_1d(int j) { return (j + 1) / 2; }

void eval_block(const BasisSpec& spec, const double* x, double* out) {
  switch (spec.kind) {
    case BasisKind::constant:
      out[0] = 1.0;
      return;
    case BasisKind::linear:
      for (int d = 0; d < spec.dims; ++d) out[d] = x[spec.input(d)];
      return;
    case BasisKind::fourier:
      break;
  }
  if (spec.dims == 1) {
    fourier_1d(x[spec.input(0)], spec.m, spec.L, out);
    return;
  }
  if (spec.composition == Composition::additive) {
    for (int d = 0; d < spec.dims; ++d) fourier_1d(x[spec.input(d)], spec.m, spec.L, out + d * spec.m);
    return;
  }
  // Tensor product: fill with the last dimension first, then multiply outward.
  constexpr int kStack = 64;
  double stack_buf[kStack];
  std::vector<double> heap;
  double* one = stack_buf;
  if (spec.m > kStack) {
    heap.resize(static_cast<std::size_t>(spec.m));
    one = heap.data();
  }
  int len = spec.m;
  fourier_1d(x[spec.input(spec.dims - 1)], spec.m, spec.L, out);
  for (int d = spec.dims - 2; d >= 0; --d) {
    fourier_1d(x[spec.input(d)], spec.m, spec.L, one);
    // out currently holds `len` entries; expand in place from the back.
    for (int a = spec.m - 1; a >= 0; --a)
      for (int b = len - 1; b >= 0; --b) out[a * len + b] = one[a] * out[b];
    len *= spec.m;
  }
}

}  // namespace

Eigen::VectorXd eval_features(const BasisSpec& spec, std::span<const double> x) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.dims)
    throw DimensionError("basis expects " + std::to_string(spec.dims) + " inputs, got " +
                         std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite basis argument");
  // The block reads through `inputs`; here x is already the block's own argument.
  BasisSpec local = spec;
  local.inputs.clear();
  Eigen::VectorXd out(local.feature_count());
  eval_block(local, x.data(), out.data());
  return out;
}

Eigen::VectorXd clamp_to_domain(const BasisSpec& spec, std::span<const double> x) {
  if (spec.kind != BasisKind::fourier) throw InvalidArgument("clamp_to_domain needs a fourier basis");
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<Eigen::Index>(i)] = std::clamp(x[i], -spec.L, spec.L);
  return out;
}

std::vector<int> frequency_orders(const BasisSpec& spec) {
  const int n = spec.feature_count();
  std::vector<int> orders(static_cast<std::size_t>(n), 1);
  switch (spec.kind) {
    case BasisKind::constant: orders[0] = 0; return orders;
    case BasisKind::linear: return orders;
    case BasisKind::fourier: break;
  }
  if (spec.dims == 1 || spec.composition == Composition::additive) {
    for (int i = 0; i < n; ++i) orders[static_cast<std::size_t>(i)] = fourier_order_1d(i % spec.m);
    return orders;
  }
  for (int i = 0; i < n; ++i) {
    int rest = i;
    double sq = 0.0;
    for (int d = 0; d < spec.dims; ++d) {
      const int k = fourier_order_1d(rest % spec.m);
      rest /= spec.m;
      sq += static_cast<double>(k) * k;
    }
    orders[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil(std::sqrt(sq) - 1e-12));
  }
  return orders;
}

Eigen::VectorXd build_precision(const BasisSpec& spec, const PriorSpec& prior) {
  prior.validate();
  const int n = spec.feature_count();
  switch (prior.scheme) {
    case PriorScheme::none: return Eigen::VectorXd::Zero(n);
    case PriorScheme::flat: return Eigen::VectorXd::Constant(n, prior.lambda);
    case PriorScheme::frequency_squared: break;
  }
  const auto orders = frequency_orders(spec);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    const double k = std::max(1, orders[static_cast<std::size_t>(i)]);
    p[i] = prior.lambda * k * k;
  }
  return p;
}

int FeatureMap::feature_count() const {
  int n = 0;
  for (const auto& b : blocks) n += b.feature_count();
  return n;
}

int FeatureMap::required_dims() const {
  int n = 0;
  for (const auto& b : blocks)
    for (int d = 0; d < b.dims; ++d) n = std::max(n, b.input(d) + 1);
  return n;
}

void FeatureMap::validate(int arg_dims) const {
  for (const auto& b : blocks) b.validate();
  if (required_dims() > arg_dims)
    throw DimensionError("basis reads coordinate " + std::to_string(required_dims() - 1) +
                         " of a " + std::to_string(arg_dims) + "-dimensional argument");
}

void FeatureMap::eval_into(const double* x, double* out) const {
  for (const auto& b : blocks) {
    eval_block(b, x, out);
    out += b.feature_count();
  }
}

Eigen::VectorXd FeatureMap::eval(std::span<const double> x) const {
  validate(static_cast<int>(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite basis argument");
  Eigen::VectorXd out(feature_count());
  eval_into(x.data(), out.data());
  return out;
}

Eigen::VectorXd FeatureMap::precision(const PriorSpec& prior) const {
  Eigen::VectorXd p(feature_count());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    const auto block = build_precision(b, prior);
    p.segment(at, block.size()) = block;
    at += block.size();
  }
  return p;
}

}  // namespace basisid
