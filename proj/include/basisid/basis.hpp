#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace basisid {

enum class BasisKind { fourier, linear, constant };
enum class Composition { tensor_product, additive };

std::string to_string(BasisKind kind);
std::string to_string(Composition composition);
BasisKind parse_basis_kind(const std::string& s);
Composition parse_composition(const std::string& s);

/// One block of basis functions acting on a subset of the coordinates of an
/// argument vector.
///
/// Fourier features in one dimension are ordered
///   [1, cos(pi x/L), sin(pi x/L), cos(2 pi x/L), sin(2 pi x/L), ...]
/// and truncated to `m` entries. In several dimensions `m` is the
/// per-dimension count; `composition` decides whether the per-dimension
/// expansions are multiplied (tensor product, m^dims features, last
/// dimension varying fastest) or concatenated (additive, m*dims features).
/// Linear blocks return the selected coordinates unchanged and constant
/// blocks return [1].
struct BasisSpec {
  BasisKind kind = BasisKind::fourier;
  int m = 1;
  double L = 1.0;
  int dims = 1;
  Composition composition = Composition::tensor_product;
  /// Coordinates of the argument vector this block reads; empty means 0..dims-1.
  std::vector<int> inputs;

  static BasisSpec fourier(int m, double L, int dims = 1,
                           Composition composition = Composition::tensor_product);
  static BasisSpec linear(int dims = 1);
  static BasisSpec constant();

  int feature_count() const;
  int input(int d) const { return inputs.empty() ? d : inputs[static_cast<std::size_t>(d)]; }
  void validate() const;

  bool operator==(const BasisSpec&) const = default;
};

enum class PriorScheme { none, flat, frequency_squared };

std::string to_string(PriorScheme scheme);
PriorScheme parse_prior_scheme(const std::string& s);

/// Zero-mean Gaussian prior on the basis weights, expressed by its diagonal precision.
struct PriorSpec {
  PriorScheme scheme = PriorScheme::none;
  double lambda = 0.0;

  void validate() const;
  bool operator==(const PriorSpec&) const = default;
};

/// Features of `x` (length spec.dims) under a single block. Throws
/// InvalidArgument on non-finite input and DimensionError on a size mismatch.
/// Fourier arguments are clamped to [-L, L] first.
Eigen::VectorXd eval_features(const BasisSpec& spec, std::span<const double> x);

/// Clips every coordinate to [-L, L]. Requires a fourier spec.
Eigen::VectorXd clamp_to_domain(const BasisSpec& spec, std::span<const double> x);

/// Frequency order of every feature: 0 for constants, j for cos/sin of
/// frequency j, and for tensor products the Euclidean norm of the
/// per-dimension frequency vector rounded up. Linear features have order 1.
std::vector<int> frequency_orders(const BasisSpec& spec);

/// Diagonal of the prior precision matrix P for one block.
Eigen::VectorXd build_precision(const BasisSpec& spec, const PriorSpec& prior);

/// Concatenation of basis blocks; this is phi(x) for one argument vector.
struct FeatureMap {
  std::vector<BasisSpec> blocks;

  FeatureMap() = default;
  FeatureMap(std::initializer_list<BasisSpec> b) : blocks(b) {}
  explicit FeatureMap(std::vector<BasisSpec> b) : blocks(std::move(b)) {}

  bool empty() const { return blocks.empty(); }
  int feature_count() const;
  /// Smallest argument length every block can read from.
  int required_dims() const;
  void validate(int arg_dims) const;

  /// Writes feature_count() values to `out`. No argument checks; callers
  /// validate once per batch.
  void eval_into(const double* x, double* out) const;
  Eigen::VectorXd eval(std::span<const double> x) const;

  Eigen::VectorXd precision(const PriorSpec& prior) const;

  bool operator==(const FeatureMap&) const = default;
};

}  // namespace basisid
