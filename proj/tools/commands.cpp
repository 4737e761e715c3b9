#include "commands.hpp"

#include "basisid/em.hpp"
#include "basisid/error.hpp"
#include "basisid/io.hpp"
#include "basisid/smc.hpp"
#include "basisid/systems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace basisid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void emit(bool as_json, const json& doc, const std::string& text) {
  if (as_json) std::cout << doc.dump(2) << "\n";
  else std::cout << text;
}

std::string fmt(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
  std::string system = "example1";
  long T = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string states_out;
  double a = 0.9, q = 0.1, c = 1.0, r = 0.1, x1 = 1.0;
  bool noise_free = false;
  std::string model;
  std::string inputs;
  bool json = false;
};

int do_generate(const GenerateOptions& o) {
  if (o.T < 1) throw InvalidArgument("--T must be >= 1");
  if (o.system != "file" && (!o.model.empty() || !o.inputs.empty()))
    throw InvalidArgument("--model and --inputs are only valid with --system file");
  if (o.system == "example1" && o.noise_free) throw InvalidArgument("--noise-free is not valid with example1");

  systems::Generated g;
  if (o.system == "example1") {
    g = systems::generate_example1(o.T, o.seed);
  } else if (o.system == "linear") {
    if (!o.noise_free && (!(o.q > 0.0) || !(o.r > 0.0)))
      throw InvalidArgument("--q and --r must be positive (or pass --noise-free)");
    const auto one = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
    ModelParams m = systems::linear_model(one(o.a), one(o.c), one(o.q > 0.0 ? o.q : 1.0), one(o.r > 0.0 ? o.r : 1.0));
    m.init_mean[0] = o.x1;
    g = systems::generate_from_model(m, Eigen::MatrixXd(), o.T, o.seed, !o.noise_free);
  } else if (o.system == "file") {
    if (o.model.empty()) throw InvalidArgument("--system file needs --model");
    std::vector<std::string> warnings;
    const ModelParams m = load_model(o.model, &warnings);
    warn(warnings);
    Eigen::MatrixXd u;
    if (m.nu > 0) {
      if (o.inputs.empty()) throw InvalidArgument("model has inputs; pass --inputs with u columns");
      u = load_dataset(o.inputs).u;
      if (u.cols() != m.nu || u.rows() < o.T) throw DimensionError("--inputs must hold T rows of n_u inputs");
    }
    g = systems::generate_from_model(m, u, o.T, o.seed, !o.noise_free);
  } else {
    throw InvalidArgument("unknown system '" + o.system + "' (expected example1, linear or file)");
  }
  save_dataset(g.data, o.out);
  if (!o.states_out.empty()) {
    Dataset states;
    states.y = g.states;
    states.u.resize(g.states.rows(), 0);
    save_dataset(states, o.states_out);
  }
  json doc = {{"command", "generate"}, {"system", o.system}, {"T", o.T}, {"seed", o.seed}, {"out", o.out}};
  emit(o.json, doc, "wrote " + std::to_string(o.T) + " samples to " + o.out + "\n");
  return kOk;
}

// ---------------------------------------------------------------- identify

struct IdentifyOptions {
  std::string data;
  std::string config;
  std::string out_model;
  std::string out_trace;
  std::string out_diagnostics;
  bool json = false;
};

int do_identify(const IdentifyOptions& o) {
  // Everything is validated before the first output file is written.
  std::optional<fs::path> data_path;
  if (!o.data.empty()) data_path = o.data;
  RunConfig rc = load_run_config(o.config, data_path);
  warn(rc.warnings);
  const Dataset data = load_dataset(rc.dataset);
  const PsaemConfig pc = rc.psaem_config(data);

  auto out_path = [&](const std::string& flag, const std::string& fallback) -> fs::path {
    if (!flag.empty()) return flag;
    return rc.output_dir.empty() ? fs::path(fallback) : rc.output_dir / fallback;
  };
  const fs::path model_path = out_path(o.out_model, "model.json");
  const fs::path trace_path = out_path(o.out_trace, "trace.jsonl");
  const fs::path diag_path = out_path(o.out_diagnostics, "diagnostics.jsonl");

  const PsaemResult res = psaem_identify(data, pc);
  save_model(res.model, model_path);
  write_trace(res.trace, trace_path);
  write_diagnostics(res.diagnostics, diag_path);

  json doc = {{"command", "identify"},
              {"iterations", res.diagnostics.size()},
              {"model", model_path.string()},
              {"trace", trace_path.string()},
              {"diagnostics", diag_path.string()},
              {"degenerate_steps", res.degenerate_steps},
              {"floor_activations", res.floor_activations},
              {"Q", matrix_to_json(res.model.Q)},
              {"R", matrix_to_json(res.model.R)}};
  std::string text = "identified model after " + std::to_string(res.diagnostics.size()) + " iterations\n" +
                     "  model:       " + model_path.string() + "\n" + "  trace:       " + trace_path.string() +
                     "\n" + "  diagnostics: " + diag_path.string() + "\n" +
                     "  trace(Q) = " + fmt(res.model.Q.trace()) + ", trace(R) = " + fmt(res.model.R.trace()) + "\n";
  emit(o.json, doc, text);
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string model;
  std::string data;
  long T = 0;
  std::vector<double> x0;
  bool noise = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string states_out;
  bool json = false;
};

int do_simulate(const SimulateOptions& o) {
  std::vector<std::string> warnings;
  const ModelParams m = load_model(o.model, &warnings);
  warn(warnings);
  Eigen::MatrixXd u;
  Eigen::Index T = o.T;
  if (!o.data.empty()) {
    const Dataset d = load_dataset(o.data);
    if (m.nu > 0 && d.nu() != m.nu) throw DimensionError("dataset and model input dimensions differ");
    u = d.u;
    if (T == 0) T = d.T();
  }
  if (m.nu > 0 && o.data.empty()) throw InvalidArgument("model has inputs; pass --data with u columns");
  if (T < 1) throw InvalidArgument("pass --T or --data to set the horizon");
  Eigen::VectorXd x1 = m.init_mean;
  if (!o.x0.empty()) {
    if (static_cast<int>(o.x0.size()) != m.nx()) throw DimensionError("--x0 must have n_x entries");
    x1 = Eigen::Map<const Eigen::VectorXd>(o.x0.data(), m.nx());
  }
  const auto sim = simulate(m, u, T, {x1.data(), static_cast<std::size_t>(x1.size())}, o.seed, o.noise);
  Dataset out;
  out.y = sim.y;
  out.u = m.nu > 0 ? Eigen::MatrixXd(u.topRows(T)) : Eigen::MatrixXd(T, 0);
  save_dataset(out, o.out);
  if (!o.states_out.empty()) {
    Dataset states;
    states.y = sim.x;
    states.u.resize(T, 0);
    save_dataset(states, o.states_out);
  }
  json doc = {{"command", "simulate"}, {"T", T}, {"noise", o.noise}, {"out", o.out}};
  emit(o.json, doc, "wrote " + std::to_string(T) + " simulated samples to " + o.out + "\n");
  return kOk;
}

// ---------------------------------------------------------------- evaluate / compare

struct EvalOptions {
  std::string model;
  std::vector<std::string> models;
  std::string data;
  std::string truth;
  int dim = 0;
  std::optional<double> grid_lo, grid_hi;
  int particles = 100;
  std::uint64_t seed = 1;
  std::string grid_out;
  bool json = false;
};

std::pair<double, double> inferred_interval(const ModelParams& m, const Dataset& d, int dim, std::uint64_t seed) {
  Eigen::MatrixXd traj = Eigen::MatrixXd::Zero(d.T(), m.nx());
  CpfOptions opt;
  opt.N = 20;
  for (long s = 1; s <= 10; ++s) {
    opt.seed = iteration_seed(seed, s);
    traj = cpf_as(m, d, traj, opt).trajectory;
  }
  return systems::central_interval(traj.col(dim));
}

struct Truth {
  std::function<double(double)> f;
  std::string name;
};

std::optional<Truth> load_truth(const std::string& spec, int dim) {
  if (spec.empty()) return std::nullopt;
  if (spec == "example1") return Truth{systems::example1_f, "example1"};
  auto m = std::make_shared<ModelParams>(load_model(spec));
  if (dim >= m->nx()) throw DimensionError("--dim exceeds the truth model's n_x");
  return Truth{[m, dim](double x) {
                 Eigen::VectorXd g(1);
                 g[0] = x;
                 return function_on_grid(*m, dim, g)[0];
               },
               spec};
}

struct Evaluation {
  std::string name;
  bool ok = true;
  std::string error;
  ErrorMetrics sim;
  double prediction_rmse = 0.0;
  std::optional<double> grid_rmse;
};

Evaluation evaluate_model(const std::string& path, const ModelParams& m, const Dataset& d, const EvalOptions& o,
                          const std::optional<Truth>& truth, std::pair<double, double> interval) {
  Evaluation e;
  e.name = path;
  if (d.ny() != m.ny() || (m.nu > 0 && d.nu() != m.nu))
    throw DimensionError("model '" + path + "' does not match the dataset dimensions");
  try {
    const auto sim = simulate(m, d.u, d.T(), {m.init_mean.data(), static_cast<std::size_t>(m.nx())}, o.seed, false);
    e.sim = metrics(d.y, sim.y);
    const Eigen::MatrixXd pred = predict_outputs(m, d, o.particles, o.seed);
    e.prediction_rmse = metrics(d.y, pred).rmse;
    if (truth) {
      if (o.dim >= m.nx()) throw DimensionError("--dim exceeds the model's n_x");
      const auto fhat = [&](double x) {
        Eigen::VectorXd g(1);
        g[0] = x;
        return function_on_grid(m, o.dim, g)[0];
      };
      e.grid_rmse = systems::grid_rmse(fhat, truth->f, interval.first, interval.second);
    }
  } catch (const DivergenceError& err) {
    e.ok = false;
    e.error = err.what();
  }
  return e;
}

json evaluation_json(const Evaluation& e) {
  json j = {{"model", e.name}, {"ok", e.ok}};
  if (!e.ok) {
    j["error"] = e.error;
    return j;
  }
  j["simulation_error"] = {{"mean", e.sim.mean}, {"std", e.sim.std}, {"rms", e.sim.rmse}};
  j["prediction_rmse"] = e.prediction_rmse;
  if (e.grid_rmse) j["grid_rmse"] = *e.grid_rmse;
  return j;
}

std::pair<double, double> resolve_interval(const EvalOptions& o, const ModelParams& m, const Dataset& d) {
  if (o.grid_lo.has_value() != o.grid_hi.has_value()) throw InvalidArgument("pass both --grid-lo and --grid-hi");
  if (o.grid_lo) {
    if (!(*o.grid_hi > *o.grid_lo)) throw InvalidArgument("--grid-hi must exceed --grid-lo");
    return {*o.grid_lo, *o.grid_hi};
  }
  if (o.dim < 0 || o.dim >= m.nx()) throw DimensionError("--dim out of range");
  return inferred_interval(m, d, o.dim, o.seed);
}

int do_evaluate(const EvalOptions& o) {
  std::vector<std::string> warnings;
  const ModelParams m = load_model(o.model, &warnings);
  warn(warnings);
  const Dataset d = load_dataset(o.data);
  const auto truth = load_truth(o.truth, o.dim);
  std::pair<double, double> interval{0.0, 0.0};
  if (truth || !o.grid_out.empty()) interval = resolve_interval(o, m, d);
  const Evaluation e = evaluate_model(o.model, m, d, o, truth, interval);
  if (!o.grid_out.empty()) {
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(201, interval.first, interval.second);
    export_function_grid(m, o.dim, grid, o.grid_out);
  }

  json doc = evaluation_json(e);
  doc["command"] = "evaluate";
  if (truth) doc["grid_interval"] = {interval.first, interval.second};
  std::string text;
  if (!e.ok) {
    text = "simulation diverged: " + e.error + "\n";
  } else {
    text = "simulation error: mean " + fmt(e.sim.mean) + ", std " + fmt(e.sim.std) + ", rms " + fmt(e.sim.rmse) +
           "\none-step prediction rmse: " + fmt(e.prediction_rmse) + "\n";
    if (e.grid_rmse)
      text += "grid rmse vs " + truth->name + " on [" + fmt(interval.first) + ", " + fmt(interval.second) +
              "]: " + fmt(*e.grid_rmse) + "\n";
  }
  emit(o.json, doc, text);
  return e.ok ? kOk : kDivergence;
}

int do_compare(const EvalOptions& o) {
  if (o.models.empty()) throw InvalidArgument("--models needs at least one model");
  const Dataset d = load_dataset(o.data);
  const auto truth = load_truth(o.truth, o.dim);
  std::vector<ModelParams> models;
  for (const auto& path : o.models) {
    std::vector<std::string> warnings;
    models.push_back(load_model(path, &warnings));
    warn(warnings);
  }
  std::pair<double, double> interval{0.0, 0.0};
  if (truth) interval = resolve_interval(o, models.front(), d);

  std::vector<Evaluation> rows;
  for (std::size_t i = 0; i < models.size(); ++i) rows.push_back(evaluate_model(o.models[i], models[i], d, o, truth, interval));
  const auto score = [&](const Evaluation& e) {
    if (!e.ok) return std::numeric_limits<double>::infinity();
    return e.grid_rmse ? *e.grid_rmse : e.sim.rmse;
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) { return score(a) < score(b); });

  json doc = {{"command", "compare"}, {"ranked_by", truth ? "grid_rmse" : "simulation_rms"}, {"models", json::array()}};
  if (truth) doc["grid_interval"] = {interval.first, interval.second};
  std::string text = "rank  sim_rms      pred_rmse    grid_rmse    model\n";
  int rank = 1;
  for (const auto& e : rows) {
    doc["models"].push_back(evaluation_json(e));
    char line[512];
    if (e.ok)
      std::snprintf(line, sizeof line, "%-5d %-12s %-12s %-12s %s\n", rank, fmt(e.sim.rmse).c_str(),
                    fmt(e.prediction_rmse).c_str(), e.grid_rmse ? fmt(*e.grid_rmse).c_str() : "-", e.name.c_str());
    else
      std::snprintf(line, sizeof line, "%-5d %-12s %-12s %-12s %s\n", rank, "diverged", "-", "-", e.name.c_str());
    text += line;
    ++rank;
  }
  emit(o.json, doc, text);
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Nonlinear state-space identification with basis function expansions and PSAEM"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Simulate a dataset from a reference system");
  g->add_option("--system", gen.system, "example1 | linear | file")->check(CLI::IsMember({"example1", "linear", "file"}));
  g->add_option("--T", gen.T, "Number of samples");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output CSV")->required();
  g->add_option("--states-out", gen.states_out, "Also write the latent states (columns y1..)");
  g->add_option("--a", gen.a, "linear: state coefficient");
  g->add_option("--q", gen.q, "linear: process noise variance");
  g->add_option("--c", gen.c, "linear: output coefficient");
  g->add_option("--r", gen.r, "linear: measurement noise variance");
  g->add_option("--x1", gen.x1, "linear: initial state mean");
  g->add_flag("--noise-free", gen.noise_free, "linear/file: disable noise");
  g->add_option("--model", gen.model, "file: model to replay");
  g->add_option("--inputs", gen.inputs, "file: CSV providing u columns");
  g->add_flag("--json", gen.json, "Structured output");

  IdentifyOptions idf;
  auto* i = app.add_subcommand("identify", "Run PSAEM identification");
  i->add_option("--data", idf.data, "Dataset CSV (overrides the config)");
  i->add_option("--config", idf.config, "Run configuration (JSON)")->required();
  i->add_option("--out-model", idf.out_model, "Identified model file");
  i->add_option("--out-trace", idf.out_trace, "Parameter trace (JSON lines)");
  i->add_option("--out-diagnostics", idf.out_diagnostics, "Per-iteration diagnostics (JSON lines)");
  i->add_flag("--json", idf.json, "Structured output");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate a stored model");
  s->add_option("--model", sim.model, "Model file")->required();
  s->add_option("--data", sim.data, "CSV providing inputs and horizon");
  s->add_option("--T", sim.T, "Horizon (defaults to the dataset length)");
  s->add_option("--x0", sim.x0, "Initial state (defaults to the model's initial mean)");
  s->add_flag("--noise", sim.noise, "Include process and measurement noise");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--out", sim.out, "Output CSV")->required();
  s->add_option("--states-out", sim.states_out, "Also write the simulated states");
  s->add_flag("--json", sim.json, "Structured output");

  EvalOptions ev;
  auto* e = app.add_subcommand("evaluate", "Simulation and prediction errors of a model on a dataset");
  EvalOptions cmp;
  auto* c = app.add_subcommand("compare", "Rank several models on one dataset");
  e->add_option("--model", ev.model, "Model file")->required();
  c->add_option("--models", cmp.models, "Model files")->required();
  for (auto [cmd, opt] : {std::pair{e, &ev}, std::pair{c, &cmp}}) {
    cmd->add_option("--data", opt->data, "Dataset CSV")->required();
    cmd->add_option("--truth-model", opt->truth, "True f: a model file or the builtin 'example1'");
    cmd->add_option("--dim", opt->dim, "State dimension for the function grid");
    cmd->add_option("--grid-lo", opt->grid_lo, "Grid interval lower end (default: central 95% of inferred states)");
    cmd->add_option("--grid-hi", opt->grid_hi, "Grid interval upper end");
    cmd->add_option("--particles", opt->particles, "Particles for one-step prediction");
    cmd->add_option("--seed", opt->seed, "Random seed");
    cmd->add_flag("--json", opt->json, "Structured output");
  }
  e->add_option("--grid-out", ev.grid_out, "Write (x, f(x)) pairs over the grid interval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return do_generate(gen);
    if (*i) return do_identify(idf);
    if (*s) return do_simulate(sim);
    if (*e) return do_evaluate(ev);
    if (*c) return do_compare(cmp);
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kParse;
  } catch (const InvariantError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kParse;
  } catch (const DivergenceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDivergence;
  } catch (const RankDeficiencyError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kRankDeficiency;
  } catch (const DimensionError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  } catch (const InvalidArgument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace basisid::cli
