// Copyright 2026 The blindcal developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "blindcal/analysis.hpp"
#include "blindcal/rng.hpp"
#include "blindcal/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blindcal;

namespace {

// Exit codes: 0 success/converged, 2 non-convergence, 3 schema error,
// 4 numerical abort.
constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitSchema = 3;
constexpr int kExitNumerical = 4;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError("failed to parse '" + path + "': " + e.what());
  }
}

void write_json(const fs::path& path, const json& value) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

// FNV-1a over the canonical dump; used to fingerprint input specs.
std::string content_hash(const json& value) {
  std::string dump = value.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buffer;
}

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::string model_path;
  std::string state_arg;
  std::uint64_t seed = 1;
  long long shots = -1;  // -1: take the config value / default
  int jobs = 1;
};

json load_config(const CommonOptions& opts) {
  if (opts.config_path.empty()) return json::object();
  return load_json(opts.config_path);
}

PhysicalParams zeta_from_config(const json& config) {
  if (!config.contains("zeta")) return PhysicalParams{};
  const json& z = config.at("zeta");
  if (z.is_string() && z.get<std::string>() == "benchmark_defaults") {
    return PhysicalParams::benchmark_defaults();
  }
  return PhysicalParams::from_json(z);
}

// --state accepts a builtin state name or a JSON file path.
std::pair<CircuitSpec, NoiseSpec> load_state(const std::string& arg, const json& config) {
  NoiseSpec noise;
  if (config.contains("noise")) noise = NoiseSpec::from_json(config.at("noise"));
  if (CircuitSpec::is_builtin(arg)) return {CircuitSpec::builtin(arg), noise};
  json doc = load_json(arg);
  if (doc.contains("noise")) noise = NoiseSpec::from_json(doc.at("noise"));
  return {CircuitSpec::from_json(doc), noise};
}

ErrorModelSpec load_model(const std::string& path) {
  if (path.empty()) throw SchemaError("--model is required for this command");
  return ErrorModelSpec::from_json(load_json(path));
}

long long shots_or(const CommonOptions& opts, const json& config, long long fallback) {
  if (opts.shots >= 0) return opts.shots;
  return config.value("shots", fallback);
}

SolverConfig solver_from_config(const json& config, const char* key, SolverConfig base) {
  if (config.contains(key)) return base.with_overrides(config.at(key));
  return base;
}

json meta_block(const CommonOptions& opts, const json& extra) {
  json meta{{"tool_version", kVersion},
            {"seed", opts.seed},
            {"created", timestamp_utc()}};
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  return meta;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOptions& opts) {
  json config = load_config(opts);
  if (opts.state_arg.empty()) throw SchemaError("--state is required for simulate");
  auto [circuit, noise] = load_state(opts.state_arg, config);
  PhysicalParams zeta = zeta_from_config(config);
  long long shots = shots_or(opts, config, 1000);

  DataVector data = simulate_dataset(zeta, circuit, noise, shots, opts.seed);

  json hashes{{"state_hash", content_hash(circuit.to_json())}};
  if (!opts.model_path.empty()) {
    hashes["model_hash"] = content_hash(load_model(opts.model_path).to_json());
  }
  data.meta = meta_block(opts, hashes);
  write_json(fs::path(opts.out_dir) / "counts.json", data.to_json());

  json sidecar{{"command", "simulate"},
               {"tool_version", kVersion},
               {"seed", opts.seed},
               {"shots_per_basis", shots},
               {"zeta", zeta.to_json()},
               {"circuit", circuit.to_json()},
               {"noise", noise.to_json()},
               {"hashes", hashes},
               {"created", timestamp_utc()}};
  write_json(fs::path(opts.out_dir) / "counts.meta.json", sidecar);
  std::cout << "wrote " << (fs::path(opts.out_dir) / "counts.json").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

CalibrationVector xi_from_file(const std::string& path) {
  json doc = load_json(path);
  try {
    if (doc.contains("xi")) return CalibrationVector::from_json(doc.at("xi"));
    return CalibrationVector::from_json(doc);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("calibration file: ") + e.what());
  }
}

int cmd_calibrate(const CommonOptions& opts, const std::string& counts_path,
                  const std::string& mode, const std::string& xi_path) {
  json config = load_config(opts);
  ErrorModelSpec spec = load_model(opts.model_path);
  DataVector data = DataVector::from_json(load_json(counts_path));
  if (data.n != spec.n) throw SchemaError("counts file and model disagree on qubit count");
  MeasurementMap map = MeasurementMap::build(spec);

  json hashes{{"model_hash", content_hash(spec.to_json())},
              {"counts_hash", content_hash(load_json(counts_path))}};

  if (mode == "tomography") {
    if (xi_path.empty()) throw SchemaError("--xi is required in tomography mode");
    CalibrationVector xi = xi_from_file(xi_path);
    SolverConfig tomo = solver_from_config(config, "tomography",
                                           SolverConfig{.epsilon = 1e-8, .max_iters = 300});
    cmat rho = calibrated_tomography(map, data, xi, tomo);
    double residual = relative_residual(map, data_for_map(map, data), xi.values, rho);
    SolverResult result;
    result.rho_hat = rho;
    result.xi_hat = xi;
    result.final_residual = residual;
    result.converged = true;
    result.seed = opts.seed;
    json out = result.to_json();
    out["mode"] = "tomography";
    out["meta"] = meta_block(opts, hashes);
    write_json(fs::path(opts.out_dir) / "result.json", out);
    std::cout << "tomography residual " << residual << "\n";
    return kExitOk;
  }
  if (mode != "blind") throw SchemaError("unknown mode '" + mode + "'");

  if (opts.state_arg.empty()) {
    throw SchemaError("--state (target preparation) is required in blind mode");
  }
  auto [circuit, noise] = load_state(opts.state_arg, config);
  (void)noise;
  cvec target = circuit.target_state();

  CalibrationVector anticipated = ideal_xi(spec);
  if (config.contains("anticipated_xi")) {
    anticipated = CalibrationVector::from_json(config.at("anticipated_xi"));
  }
  SolverConfig solver = solver_from_config(config, "solver", SolverConfig{});
  SolverResult result = blind_calibrate(map, data, solver, anticipated, target, opts.seed);

  json out = result.to_json();
  out["mode"] = "blind";
  out["meta"] = meta_block(opts, hashes);
  write_json(fs::path(opts.out_dir) / "result.json", out);
  std::cout << "blind calibration: residual " << result.final_residual << " after "
            << result.iterations << " iterations ("
            << (result.converged ? "converged" : "not converged") << ")\n";
  return result.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

std::vector<long long> grid_from_config(const json& config, const char* key,
                                        std::vector<long long> fallback) {
  if (!config.contains(key)) return fallback;
  return config.at(key).get<std::vector<long long>>();
}

int cmd_benchmark(const CommonOptions& opts, const std::string& name) {
  json config = load_config(opts);
  PhysicalParams zeta = config.contains("zeta") ? zeta_from_config(config)
                                                : PhysicalParams::benchmark_defaults();
  ErrorModelSpec spec = opts.model_path.empty() ? ErrorModelSpec::nine_parameter(3)
                                                : load_model(opts.model_path);
  SolverConfig solve = solver_from_config(
      config, "solver", SolverConfig{.epsilon = 1e-7, .max_iters = 150, .restarts = 2});
  SolverConfig tomo = solver_from_config(config, "tomography",
                                         SolverConfig{.epsilon = 1e-8, .max_iters = 300});

  Table table;
  if (name == "shot_scaling") {
    CircuitSpec state = CircuitSpec::builtin(config.value("state", std::string("ghz")));
    auto rows = shot_scaling_benchmark(
        spec, state, zeta, grid_from_config(config, "shot_grid", {100, 1000, 10000, 100000}),
        config.value("trials", 20), solve, tomo, opts.seed, opts.jobs);
    table.header = {"shots", "trials", "mean_E", "std_E", "mean_td", "std_td", "seed"};
    for (const auto& r : rows) {
      table.rows.push_back({std::to_string(r.shots), std::to_string(r.trials),
                            fmt(r.mean_E), fmt(r.std_E), fmt(r.mean_td), fmt(r.std_td),
                            std::to_string(r.seed)});
    }
  } else if (name == "param_count") {
    CircuitSpec state = CircuitSpec::builtin(config.value("state", std::string("ghz")));
    auto rows = parameter_count_benchmark(spec.n, state, zeta, shots_or(opts, config, 1000),
                                          config.value("trials", 10), solve, opts.seed,
                                          opts.jobs);
    table.header = {"model", "num_params", "mean_E", "std_E", "seed"};
    for (const auto& r : rows) {
      table.rows.push_back({r.spec_name, std::to_string(r.num_params), fmt(r.mean_E),
                            fmt(r.std_E), std::to_string(r.seed)});
    }
  } else if (name == "projective_vs_expectation") {
    CircuitSpec state = CircuitSpec::builtin(config.value("state", std::string("ghz")));
    auto rows = projective_vs_expectation_benchmark(
        spec, state, zeta, grid_from_config(config, "shot_grid", {100, 1000, 10000}),
        config.value("trials", 20), solve, tomo, opts.seed, opts.jobs);
    table.header = {"shots",   "trials",  "mean_E_projective", "mean_E_expectation",
                    "mean_td_projective", "mean_td_expectation", "seed"};
    for (const auto& r : rows) {
      table.rows.push_back({std::to_string(r.shots), std::to_string(r.trials),
                            fmt(r.mean_E_projective), fmt(r.mean_E_expectation),
                            fmt(r.mean_td_projective), fmt(r.mean_td_expectation),
                            std::to_string(r.seed)});
    }
  } else if (name == "normalization_methods") {
    CircuitSpec state = CircuitSpec::builtin(config.value("state", std::string("ghz")));
    NoiseSpec noise;
    noise.pauli_noise_per_gate = 0.01;
    if (config.contains("noise")) noise = NoiseSpec::from_json(config.at("noise"));
    auto rows = normalization_benchmark(spec, state, noise, zeta,
                                        shots_or(opts, config, 1000),
                                        config.value("trials", 10), solve, tomo, opts.seed,
                                        opts.jobs);
    table.header = {"method", "mean_E", "std_E", "mean_td", "std_td", "seed"};
    for (const auto& r : rows) {
      table.rows.push_back({r.method, fmt(r.mean_E), fmt(r.std_E), fmt(r.mean_td),
                            fmt(r.std_td), std::to_string(r.seed)});
    }
  } else if (name == "td_validity") {
    std::vector<std::string> names =
        config.value("states", std::vector<std::string>{"os1", "ghz"});
    std::vector<CircuitSpec> states;
    for (const auto& n : names) states.push_back(CircuitSpec::builtin(n));
    NoiseSpec noise;
    noise.pauli_noise_per_gate = 0.01;
    if (config.contains("noise")) noise = NoiseSpec::from_json(config.at("noise"));
    std::vector<double> c_grid;
    if (config.contains("c_grid")) {
      c_grid = config.at("c_grid").get<std::vector<double>>();
    } else {
      for (int i = 0; i <= 8; ++i) c_grid.push_back(0.25 * i);
    }
    auto rows = td_validity_sweep(spec, states, names, noise, zeta, c_grid,
                                  shots_or(opts, config, 1000), config.value("trials", 5),
                                  tomo, opts.seed, opts.jobs);
    table.header = {"state",  "c", "mean_td_target", "std_td_target", "mean_td_prepared",
                    "std_td_prepared", "seed"};
    for (const auto& r : rows) {
      table.rows.push_back({r.state, fmt(r.c), fmt(r.mean_td_target), fmt(r.std_td_target),
                            fmt(r.mean_td_prepared), fmt(r.std_td_prepared),
                            std::to_string(r.seed)});
    }
  } else {
    throw SchemaError("unknown benchmark '" + name + "'");
  }

  table.save(opts.out_dir, name);
  json manifest{{"benchmark", name},
                {"tool_version", kVersion},
                {"seed", opts.seed},
                {"zeta", zeta.to_json()},
                {"model", spec.to_json()},
                {"model_hash", content_hash(spec.to_json())},
                {"solver", solve.to_json()},
                {"tomography", tomo.to_json()},
                {"created", timestamp_utc()}};
  write_json(fs::path(opts.out_dir) / (name + ".meta.json"), manifest);
  std::cout << "wrote " << (fs::path(opts.out_dir) / (name + ".csv")).string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blindcal: blind calibration of projective Pauli measurement data"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string counts_path, mode = "blind", xi_path, bench_name;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration");
    cmd->add_option("--seed", opts.seed, "master random seed (recorded in outputs)");
    cmd->add_option("--shots", opts.shots, "shots per basis (0 = exact probabilities)");
    cmd->add_option("--jobs", opts.jobs, "parallel worker threads");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--model", opts.model_path, "error-model spec JSON");
    cmd->add_option("--state", opts.state_arg, "circuit JSON path or builtin state name");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "generate measurement data");
  add_common(simulate);

  CLI::App* calibrate = app.add_subcommand("calibrate", "fit calibration and state");
  add_common(calibrate);
  calibrate->add_option("counts", counts_path, "counts JSON file")->required();
  calibrate->add_option("--mode", mode, "blind | tomography");
  calibrate->add_option("--xi", xi_path, "calibration JSON for tomography mode");

  CLI::App* benchmark = app.add_subcommand("benchmark", "run a named benchmark sweep");
  add_common(benchmark);
  benchmark
      ->add_option("name", bench_name,
                   "shot_scaling | param_count | projective_vs_expectation | "
                   "normalization_methods | td_validity")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opts);
    if (calibrate->parsed()) return cmd_calibrate(opts, counts_path, mode, xi_path);
    if (benchmark->parsed()) return cmd_benchmark(opts, bench_name);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
