#pragma once

#include "basisid/em.hpp"
#include "basisid/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace basisid {

inline constexpr const char* kModelFormat = "basisid-model/1";
inline constexpr const char* kConfigFormat = "basisid-config/1";

/// Comma-separated dataset with a header naming u1..u_nu and y1..y_ny.
/// Accepts LF or CRLF line endings; rejects ragged rows and non-numeric cells
/// with a ParseError carrying the line number.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json feature_map_to_json(const FeatureMap& map);
FeatureMap feature_map_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelParams& model);
/// Rejects a wrong format tag and any invariant violation; unknown fields are
/// reported through `warnings`.
ModelParams model_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

void save_model(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// A run configuration: a flat JSON object of typed keys (see README).
struct RunConfig {
  std::filesystem::path dataset;
  int n_x = 1;
  FeatureMap basis_x;
  FeatureMap basis_u;
  PriorSpec prior;
  int N = 5;
  long K = 100;
  GammaSchedule gamma;
  std::uint64_t seed = 1;
  long trace_period = 1;
  Resampling resampling = Resampling::multinomial;
  kernels::Backend backend = kernels::Backend::parallel;
  std::filesystem::path output_dir;
  nlohmann::json raw;  // original document, for the structure and init keys
  std::vector<std::string> warnings;

  /// Builds the PSAEM configuration for `data`: resolves "auto" domain
  /// half-widths, the initial model and the structure masks.
  PsaemConfig psaem_config(const Dataset& data) const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// `dataset_override`, when set, replaces the configured dataset path.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                           const std::optional<std::filesystem::path>& dataset_override = std::nullopt);
RunConfig load_run_config(const std::filesystem::path& path,
                          const std::optional<std::filesystem::path>& dataset_override = std::nullopt);

/// Domain half-width used when a fourier block has L = "auto": 1.5 x max |y|.
double auto_domain_half_width(const Dataset& data);

/// Evaluates component `dimension` of f(x) along that coordinate axis (other
/// states and all inputs zero).
Eigen::VectorXd function_on_grid(const ModelParams& model, int dimension, const Eigen::VectorXd& grid);

/// Writes "x,f" rows of function_on_grid. Throws InvalidArgument if a grid
/// point lies outside a fourier domain that reads `dimension`.
void export_function_grid(const ModelParams& model, int dimension, const Eigen::VectorXd& grid,
                          const std::filesystem::path& path);

nlohmann::json trace_entry_to_json(const TraceEntry& e);
nlohmann::json iteration_record_to_json(const IterationRecord& r);
/// One JSON document per line.
void write_trace(const std::vector<TraceEntry>& trace, const std::filesystem::path& path);
void write_diagnostics(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

/// Writes `contents` to `path` through a temporary file and rename.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace basisid
