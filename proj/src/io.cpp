#include "basisid/io.hpp"

#include "basisid/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace basisid {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

// ---------------------------------------------------------------- datasets

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

// Column name like "y3" -> ('y', 3); returns false otherwise.
bool parse_column(std::string_view name, char& kind, int& index) {
  name = trim(name);
  if (name.size() < 2 || (name[0] != 'u' && name[0] != 'y')) return false;
  kind = name[0];
  auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
  return ec == std::errc() && ptr == name.data() + name.size() && index >= 1;
}

}  // namespace

Dataset load_dataset(const fs::path& path) {
  if (!fs::exists(path)) throw ParseError("dataset '" + path.string() + "' does not exist");
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::pair<char, int>> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("dataset '" + path.string() + "' is empty");
  int nu = 0, ny = 0;
  std::set<std::pair<char, int>> seen;
  for (auto cell : split_commas(line)) {
    char kind;
    int index;
    if (!parse_column(cell, kind, index))
      throw ParseError("unrecognized column name '" + std::string(trim(cell)) + "'", line_no);
    if (!seen.insert({kind, index}).second) throw ParseError("duplicate column '" + std::string(trim(cell)) + "'", line_no);
    columns.emplace_back(kind, index);
    (kind == 'u' ? nu : ny) = std::max(kind == 'u' ? nu : ny, index);
  }
  if (ny == 0) throw ParseError("dataset has no y columns", line_no);
  if (static_cast<int>(seen.size()) != nu + ny) throw ParseError("column numbering has gaps", line_no);

  std::vector<double> values;
  std::size_t rows = 0;
  const std::size_t width = columns.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != width)
      throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " + std::to_string(width), line_no);
    for (auto cell : cells) {
      double v;
      if (!parse_number(cell, v)) throw ParseError("non-numeric cell '" + std::string(trim(cell)) + "'", line_no);
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("dataset '" + path.string() + "' has no data rows");

  Dataset d;
  d.u.resize(static_cast<Eigen::Index>(rows), nu);
  d.y.resize(static_cast<Eigen::Index>(rows), ny);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      const auto [kind, index] = columns[c];
      (kind == 'u' ? d.u : d.y)(static_cast<Eigen::Index>(r), index - 1) = values[r * width + c];
    }
  return d;
}

void save_dataset(const Dataset& data, const fs::path& path) {
  data.validate();
  std::string out;
  for (int i = 0; i < data.nu(); ++i) out += "u" + std::to_string(i + 1) + ",";
  for (int i = 0; i < data.ny(); ++i) out += "y" + std::to_string(i + 1) + (i + 1 < data.ny() ? "," : "\n");
  for (Eigen::Index t = 0; t < data.T(); ++t) {
    for (int i = 0; i < data.nu(); ++i) out += format_double(data.u(t, i)) + ",";
    for (int i = 0; i < data.ny(); ++i) out += format_double(data.y(t, i)) + (i + 1 < data.ny() ? "," : "\n");
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------- models

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

namespace {

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError("field '" + field + "' must hold numbers");
  return j.get<double>();
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (j.is_object()) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
      throw ParseError("matrix '" + field + "' needs rows, cols and data");
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw ParseError("matrix '" + field + "' has inconsistent size");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number_at(data[static_cast<std::size_t>(r * cols + c)], field);
    return m;
  }
  if (!j.is_array()) throw ParseError("field '" + field + "' must be a matrix");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  if (!j.front().is_array()) {  // a plain list is a column vector
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), 1);
    for (std::size_t i = 0; i < j.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = number_at(j[i], field);
    return m;
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError("matrix '" + field + "' has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number_at(row[static_cast<std::size_t>(c)], field);
  }
  return m;
}

json feature_map_to_json(const FeatureMap& map) {
  json blocks = json::array();
  for (const auto& b : map.blocks) {
    json jb = {{"kind", to_string(b.kind)}, {"m", b.m}, {"dims", b.dims}};
    if (b.kind == BasisKind::fourier) {
      jb["L"] = b.L;
      if (b.dims > 1) jb["composition"] = to_string(b.composition);
    }
    if (!b.inputs.empty()) jb["inputs"] = b.inputs;
    blocks.push_back(std::move(jb));
  }
  return blocks;
}

FeatureMap feature_map_from_json(const json& j) {
  FeatureMap map;
  if (j.is_null()) return map;
  const json blocks = j.is_array() ? j : json::array({j});
  for (const auto& jb : blocks) {
    if (!jb.is_object()) throw ParseError("basis block must be an object");
    BasisSpec b;
    try {
      b.kind = parse_basis_kind(jb.at("kind").get<std::string>());
      b.dims = jb.value("dims", jb.contains("inputs") ? static_cast<int>(jb.at("inputs").size()) : 1);
      switch (b.kind) {
        case BasisKind::fourier:
          b.m = jb.at("m").get<int>();
          if (jb.contains("L") && jb.at("L").is_string()) {
            if (jb.at("L").get<std::string>() != "auto") throw ParseError("basis L must be a number or \"auto\"");
            b.L = std::numeric_limits<double>::quiet_NaN();
          } else {
            b.L = jb.at("L").get<double>();
          }
          b.composition = parse_composition(jb.value("composition", std::string("tensor_product")));
          break;
        case BasisKind::linear: b.m = jb.value("m", b.dims); break;
        case BasisKind::constant: b.m = jb.value("m", 1); break;
      }
      if (jb.contains("inputs")) b.inputs = jb.at("inputs").get<std::vector<int>>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed basis block: ") + e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what());
    }
    map.blocks.push_back(std::move(b));
  }
  return map;
}

json model_to_json(const ModelParams& m) {
  return {{"format", kModelFormat},
          {"n_x", m.nx()},
          {"n_y", m.ny()},
          {"n_u", m.nu},
          {"basis_x", feature_map_to_json(m.basis_x)},
          {"basis_u", feature_map_to_json(m.basis_u)},
          {"Gamma_f", matrix_to_json(m.Gamma_f)},
          {"Gamma_g", matrix_to_json(m.Gamma_g)},
          {"Q", matrix_to_json(m.Q)},
          {"R", matrix_to_json(m.R)},
          {"init_mean", matrix_to_json(m.init_mean)},
          {"init_cov", matrix_to_json(m.init_cov)}};
}

ModelParams model_from_json(const json& j, std::vector<std::string>* warnings) {
  if (!j.is_object()) throw ParseError("model document must be a JSON object");
  if (!j.contains("format")) throw ParseError("model document has no format tag");
  if (j.at("format") != kModelFormat)
    throw ParseError("unsupported model format '" + j.at("format").dump() + "', expected " + kModelFormat);
  static const std::set<std::string> known = {"format", "n_x", "n_y", "n_u", "basis_x", "basis_u", "Gamma_f",
                                              "Gamma_g", "Q", "R", "init_mean", "init_cov"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key) && warnings) warnings->push_back("unknown model field '" + key + "' ignored");

  ModelParams m;
  try {
    m.nu = j.value("n_u", 0);
    m.basis_x = feature_map_from_json(j.at("basis_x"));
    m.basis_u = feature_map_from_json(j.value("basis_u", json::array()));
    m.Gamma_f = matrix_from_json(j.at("Gamma_f"), "Gamma_f");
    m.Gamma_g = matrix_from_json(j.at("Gamma_g"), "Gamma_g");
    m.Q = matrix_from_json(j.at("Q"), "Q");
    m.R = matrix_from_json(j.at("R"), "R");
    m.init_mean = matrix_from_json(j.at("init_mean"), "init_mean").reshaped();
    m.init_cov = matrix_from_json(j.at("init_cov"), "init_cov");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  if (j.contains("n_x") && j.at("n_x").get<int>() != m.nx()) throw InvariantError("n_x matches Q");
  if (j.contains("n_y") && j.at("n_y").get<int>() != m.ny()) throw InvariantError("n_y matches R");
  m.validate();
  return m;
}

void save_model(const ModelParams& model, const fs::path& path) {
  model.validate();
  write_text_file(path, model_to_json(model).dump(2) + "\n");
}

ModelParams load_model(const fs::path& path, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j, warnings);
}

// ---------------------------------------------------------------- config

double auto_domain_half_width(const Dataset& data) {
  const double m = data.y.cwiseAbs().maxCoeff();
  return m > 0.0 ? 1.5 * m : 1.0;
}

namespace {

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "format", "dataset", "n_x", "basis_x", "basis_u", "prior.scheme", "prior.lambda", "N", "K",
      "gamma.exponent", "gamma.burn_in", "seed", "trace_period", "resampling", "backend", "output_dir",
      "structure.state.mask", "structure.state.fixed", "structure.learn_Q", "structure.measurement.mask",
      "structure.measurement.fixed", "structure.learn_R", "init.model", "init.Gamma_f", "init.Gamma_g",
      "init.Q", "init.R", "init.mean", "init.cov"};
  return keys;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("config key '") + key + "' has the wrong type");
  }
}

BoolMatrix parse_mask(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "all") return BoolMatrix::Constant(rows, cols, true);
    if (s == "none") return BoolMatrix::Constant(rows, cols, false);
    throw ParseError("config key '" + key + "' must be \"all\", \"none\" or a matrix of booleans");
  }
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ParseError("config key '" + key + "' must have one row per equation output");
  BoolMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError("config key '" + key + "' rows must have one entry per regressor column");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (v.is_boolean()) m(r, c) = v.get<bool>();
      else if (v.is_number_integer()) m(r, c) = v.get<int>() != 0;
      else throw ParseError("config key '" + key + "' entries must be booleans");
    }
  }
  return m;
}

Eigen::MatrixXd covariance_value(const json& j, int n, const std::string& key) {
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd m = matrix_from_json(j, key);
  if (m.cols() == 1 && m.rows() == n && n > 1) return m.asDiagonal();
  if (m.rows() != n || m.cols() != n) throw ParseError("config key '" + key + "' has the wrong size");
  return m;
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir,
                           const std::optional<fs::path>& dataset_override) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  RunConfig c;
  c.raw = j;
  if (j.contains("format") && j.at("format") != kConfigFormat)
    throw ParseError("unsupported config format " + j.at("format").dump());
  for (const auto& [key, value] : j.items())
    if (!known_config_keys().count(key)) c.warnings.push_back("unknown config key '" + key + "' ignored");

  auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : base_dir / p; };
  if (dataset_override) c.dataset = *dataset_override;
  else if (j.contains("dataset")) c.dataset = resolve(get_or<std::string>(j, "dataset", ""));
  else throw ParseError("config has no dataset and none was given");
  if (!fs::exists(c.dataset)) throw ParseError("dataset '" + c.dataset.string() + "' does not exist");
  if (j.contains("init.model")) {
    c.raw["init.model"] = resolve(get_or<std::string>(j, "init.model", "")).string();
    if (!fs::exists(c.raw["init.model"].get<std::string>()))
      throw ParseError("init.model '" + c.raw["init.model"].get<std::string>() + "' does not exist");
  }

  c.n_x = get_or(j, "n_x", 1);
  if (c.n_x < 1) throw ParseError("n_x must be >= 1");
  if (!j.contains("basis_x") && !j.contains("init.model")) throw ParseError("config needs basis_x");
  c.basis_x = feature_map_from_json(j.value("basis_x", json()));
  c.basis_u = feature_map_from_json(j.value("basis_u", json()));
  try {
    c.prior.scheme = parse_prior_scheme(get_or<std::string>(j, "prior.scheme", "none"));
    c.prior.lambda = get_or(j, "prior.lambda", 0.0);
    c.prior.validate();
    c.N = get_or(j, "N", c.N);
    c.K = get_or(j, "K", c.K);
    c.gamma.exponent = get_or(j, "gamma.exponent", c.gamma.exponent);
    c.gamma.burn_in = get_or(j, "gamma.burn_in", c.gamma.burn_in);
    c.gamma.validate();
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.trace_period = get_or(j, "trace_period", c.trace_period);
    c.resampling = parse_resampling(get_or<std::string>(j, "resampling", "multinomial"));
    c.backend = kernels::parse_backend(get_or<std::string>(j, "backend", "parallel"));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid config: ") + e.what());
  }
  if (c.N < 1) throw ParseError("N must be >= 1");
  if (c.K < 0) throw ParseError("K must be >= 0");
  if (c.trace_period < 1) throw ParseError("trace_period must be >= 1");
  if (j.contains("output_dir")) c.output_dir = resolve(get_or<std::string>(j, "output_dir", ""));
  return c;
}

RunConfig load_run_config(const fs::path& path, const std::optional<fs::path>& dataset_override) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j, path.parent_path(), dataset_override);
}

PsaemConfig RunConfig::psaem_config(const Dataset& data) const {
  data.validate();
  const json& j = raw;
  PsaemConfig pc;
  pc.N = N;
  pc.K = K;
  pc.gamma = gamma;
  pc.prior = prior;
  pc.seed = seed;
  pc.trace_period = trace_period;
  pc.resampling = resampling;
  pc.backend = backend;

  ModelParams m;
  if (j.contains("init.model")) {
    m = load_model(j.at("init.model").get<std::string>());
  } else {
    FeatureMap bx = basis_x, bu = basis_u;
    const double L = auto_domain_half_width(data);
    for (auto* map : {&bx, &bu})
      for (auto& b : map->blocks)
        if (b.kind == BasisKind::fourier && std::isnan(b.L)) b.L = L;
    if (bu.empty() && data.nu() > 0)
      throw InvalidArgument("dataset has inputs but the config has no basis_u");
    m = default_initial_model(n_x, std::move(bx), data, std::move(bu));
  }
  try {
    if (j.contains("init.Gamma_f")) m.Gamma_f = matrix_from_json(j.at("init.Gamma_f"), "init.Gamma_f");
    if (j.contains("init.Gamma_g")) m.Gamma_g = matrix_from_json(j.at("init.Gamma_g"), "init.Gamma_g");
    if (j.contains("init.Q")) m.Q = covariance_value(j.at("init.Q"), m.nx(), "init.Q");
    if (j.contains("init.R")) m.R = covariance_value(j.at("init.R"), m.ny(), "init.R");
    if (j.contains("init.mean")) m.init_mean = matrix_from_json(j.at("init.mean"), "init.mean").reshaped();
    if (j.contains("init.cov")) m.init_cov = covariance_value(j.at("init.cov"), m.nx(), "init.cov");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed init value: ") + e.what());
  }

  const Eigen::Index q = m.regressor_size();
  StructureSpec s;
  if (j.contains("structure.state.mask"))
    s.state.mask = parse_mask(j.at("structure.state.mask"), m.nx(), q, "structure.state.mask");
  if (j.contains("structure.state.fixed"))
    s.state.fixed = matrix_from_json(j.at("structure.state.fixed"), "structure.state.fixed");
  if (j.contains("structure.measurement.mask"))
    s.measurement.mask = parse_mask(j.at("structure.measurement.mask"), m.ny(), q, "structure.measurement.mask");
  if (j.contains("structure.measurement.fixed"))
    s.measurement.fixed = matrix_from_json(j.at("structure.measurement.fixed"), "structure.measurement.fixed");
  s.state.learn_noise = get_or(j, "structure.learn_Q", true);
  s.measurement.learn_noise = get_or(j, "structure.learn_R", true);
  s.resolve(m);
  s.apply_fixed(m);
  m.validate();
  pc.structure = std::move(s);
  pc.init_model = std::move(m);
  pc.validate();
  return pc;
}

// ---------------------------------------------------------------- grids and logs

Eigen::VectorXd function_on_grid(const ModelParams& model, int dimension, const Eigen::VectorXd& grid) {
  if (dimension < 0 || dimension >= model.nx()) throw DimensionError("grid dimension out of range");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.nx());
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(model.nu);
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    x[dimension] = grid[i];
    out[i] = step_mean(model, {x.data(), static_cast<std::size_t>(x.size())},
                       {u.data(), static_cast<std::size_t>(u.size())})[dimension];
  }
  return out;
}

void export_function_grid(const ModelParams& model, int dimension, const Eigen::VectorXd& grid,
                          const fs::path& path) {
  for (const auto& b : model.basis_x.blocks) {
    if (b.kind != BasisKind::fourier) continue;
    for (int d = 0; d < b.dims; ++d) {
      if (b.input(d) != dimension) continue;
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) > b.L)
          throw InvalidArgument("grid point " + format_double(grid[i]) + " lies outside the basis domain [-" +
                                format_double(b.L) + ", " + format_double(b.L) + "]");
    }
  }
  const Eigen::VectorXd f = function_on_grid(model, dimension, grid);
  std::string out = "x,f\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) out += format_double(grid[i]) + "," + format_double(f[i]) + "\n";
  write_text_file(path, out);
}

json trace_entry_to_json(const TraceEntry& e) {
  return {{"k", e.k},
          {"Gamma_f", matrix_to_json(e.Gamma_f)},
          {"Gamma_g", matrix_to_json(e.Gamma_g)},
          {"Q", matrix_to_json(e.Q)},
          {"R", matrix_to_json(e.R)}};
}

json iteration_record_to_json(const IterationRecord& r) {
  return {{"k", r.k},
          {"gamma", r.gamma},
          {"trace_Q", r.trace_Q},
          {"trace_R", r.trace_R},
          {"degenerate_steps", r.degenerate_steps},
          {"floor_activations", r.floor_activations}};
}

void write_trace(const std::vector<TraceEntry>& trace, const fs::path& path) {
  std::string out;
  for (const auto& e : trace) out += trace_entry_to_json(e).dump() + "\n";
  write_text_file(path, out);
}

void write_diagnostics(const std::vector<IterationRecord>& records, const fs::path& path) {
  std::string out;
  for (const auto& r : records) out += iteration_record_to_json(r).dump() + "\n";
  write_text_file(path, out);
}

}  // namespace basisid
