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

#include "blindcal/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "blindcal/rng.hpp"

namespace blindcal {

// ---------------------------------------------------------------------------
// Utilities
// ---------------------------------------------------------------------------

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::pair<double, double> loglog_fit(const rvec& x, const rvec& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_fit: need at least two points");
  }
  const Eigen::Index n = x.size();
  rvec lx(n), ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(x(i) > 0.0) || !(y(i) > 0.0)) {
      throw std::invalid_argument("loglog_fit: values must be positive");
    }
    lx(i) = std::log(x(i));
    ly(i) = std::log(y(i));
  }
  double mx = lx.mean(), my = ly.mean();
  double sxx = (lx.array() - mx).square().sum();
  double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace {

rvec ranks_of(const rvec& values) {
  const Eigen::Index n = values.size();
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return values(a) < values(b); });
  rvec ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && values(order[static_cast<size_t>(j + 1)]) ==
                            values(order[static_cast<size_t>(i)])) {
      ++j;
    }
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[static_cast<size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

double mean_of(const rvec& v) { return v.mean(); }

double sample_std(const rvec& v) {
  if (v.size() < 2) return 0.0;
  double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

}  // namespace

double spearman_correlation(const rvec& a, const rvec& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman_correlation: need matching inputs");
  }
  rvec ra = ranks_of(a), rb = ranks_of(b);
  double ma = ra.mean(), mb = rb.mean();
  double num = ((ra.array() - ma) * (rb.array() - mb)).sum();
  double den = std::sqrt((ra.array() - ma).square().sum() * (rb.array() - mb).square().sum());
  if (den <= 0.0) return 0.0;
  return num / den;
}

std::string Table::csv() const {
  auto escape = [](const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  };
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += escape(header[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json Table::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json entry = nlohmann::json::object();
    for (size_t i = 0; i < header.size() && i < row.size(); ++i) {
      entry[header[i]] = row[i];
    }
    out.push_back(std::move(entry));
  }
  return out;
}

void Table::save(const std::string& directory, const std::string& name) const {
  std::filesystem::create_directories(directory);
  std::filesystem::path base = std::filesystem::path(directory) / name;
  {
    std::ofstream out(base.string() + ".csv");
    if (!out) throw std::runtime_error("Table::save: cannot write " + base.string() + ".csv");
    out << csv();
  }
  {
    std::ofstream out(base.string() + ".json");
    if (!out) throw std::runtime_error("Table::save: cannot write " + base.string() + ".json");
    out << to_json().dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

double calibration_error(const rvec& xi, const rvec& tau) {
  if (xi.size() != tau.size() || xi.size() < 2) {
    throw std::invalid_argument("calibration_error: coefficient vectors must match");
  }
  double total = 0.0;
  for (Eigen::Index i = 1; i < xi.size(); ++i) total += std::abs(xi(i) - tau(i));
  return total / static_cast<double>(xi.size() - 1);
}

double calibration_error(const CalibrationVector& xi, const CalibrationVector& tau) {
  if (xi.layout.names != tau.layout.names) {
    throw std::invalid_argument("calibration_error: coefficient layouts differ");
  }
  return calibration_error(xi.values, tau.values);
}

std::map<std::string, CalibrationAssessment> assess(
    const MeasurementMap& map, const DataVector& data,
    const std::map<std::string, CalibrationVector>& xi_candidates, const cvec& target_psi,
    const SolverConfig& tomography_config, const CalibrationVector* truth) {
  if (xi_candidates.find("standard") == xi_candidates.end()) {
    throw std::invalid_argument("assess: candidates must include 'standard'");
  }
  const cmat target_proj = target_psi * target_psi.adjoint();
  std::map<std::string, CalibrationAssessment> out;
  double td_standard = 0.0;
  // Standard first; it is the td_delta reference.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [name, xi] : xi_candidates) {
      bool is_standard = name == "standard";
      if ((pass == 0) != is_standard) continue;
      cmat rho = calibrated_tomography(map, data, xi, tomography_config);
      CalibrationAssessment a;
      a.td_target = trace_distance(rho, target_proj);
      a.dominant_eigenvalue = dominant_eigenvalue(rho);
      if (is_standard) td_standard = a.td_target;
      a.td_delta = a.td_target - td_standard;
      if (truth != nullptr) a.E = calibration_error(xi, *truth);
      out[name] = a;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sensitivities
// ---------------------------------------------------------------------------

double sensitivity_s1(const MeasurementMap& map, const CalibrationVector& xi,
                      const cmat& rho) {
  rvec shifted = map.apply(xi, rho);
  rvec ideal_values = map.apply(ideal_xi(map.spec()), rho);
  return (shifted - ideal_values).norm();
}

namespace {

// Orthonormal Hermitian basis under the Hilbert-Schmidt inner product.
std::vector<cmat> hermitian_basis(int dim) {
  std::vector<cmat> basis;
  const double inv_sqrt2 = 0.70710678118654752440;
  for (int i = 0; i < dim; ++i) {
    cmat b = cmat::Zero(dim, dim);
    b(i, i) = 1.0;
    basis.push_back(std::move(b));
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      cmat s = cmat::Zero(dim, dim);
      s(i, j) = inv_sqrt2;
      s(j, i) = inv_sqrt2;
      basis.push_back(std::move(s));
      cmat a = cmat::Zero(dim, dim);
      a(i, j) = complexd(0.0, -inv_sqrt2);
      a(j, i) = complexd(0.0, inv_sqrt2);
      basis.push_back(std::move(a));
    }
  }
  return basis;
}

}  // namespace

double sensitivity_s2(const MeasurementMap& map, const CalibrationVector& xi,
                      const cmat& rho, int rank) {
  const int dim = map.dim();
  std::vector<cmat> basis = hermitian_basis(dim);
  rmat ideal_map(map.rows(), static_cast<int>(basis.size()));
  rvec xi0 = rvec::Zero(map.num_coefficients());
  xi0(0) = 1.0;
  for (size_t k = 0; k < basis.size(); ++k) {
    ideal_map.col(static_cast<Eigen::Index>(k)) = map.apply(xi0, basis[k]);
  }
  Eigen::JacobiSVD<rmat> svd(ideal_map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0.0) || smax / smin > 1e8) {
    throw NumericalError("sensitivity_s2: ideal map is ill-conditioned");
  }
  rvec shifted = map.apply(xi, rho);
  rvec coords = svd.solve(shifted);
  cmat sigma = cmat::Zero(dim, dim);
  for (size_t k = 0; k < basis.size(); ++k) {
    sigma += coords(static_cast<Eigen::Index>(k)) * basis[k];
  }
  sigma = hermitize(sigma);
  return (sigma - trace_one_project(sigma, rank)).norm();
}

// ---------------------------------------------------------------------------
// Probe-state optimization
// ---------------------------------------------------------------------------

double probe_objective(const ProbeOptimizationConfig& config, const ErrorModelSpec& spec,
                       const ProductStateSpec& state, std::uint64_t seed) {
  CircuitSpec circuit = CircuitSpec::product(state.theta, state.phi);
  if (circuit.n != spec.n) {
    throw std::invalid_argument("probe_objective: state and spec qubit counts differ");
  }
  const cvec target = circuit.target_state();
  const cmat rho = target * target.adjoint();
  const MeasurementMap map = MeasurementMap::build(spec);
  const CalibrationVector anticipated = ideal_xi(spec);
  const CalibrationVector expected_xi = zeta_to_xi(spec, config.expected);

  // Calibration grid: each coefficient swept one-at-a-time over
  // [0, 2 x expected], plus the joint expected point. The all-zero point is
  // kept once.
  std::vector<rvec> grid;
  grid.push_back(expected_xi.values);
  bool zero_included = false;
  const int points = std::max(2, config.grid_points_per_param);
  for (Eigen::Index j = 1; j < expected_xi.values.size(); ++j) {
    for (int g = 0; g < points; ++g) {
      double value = 2.0 * expected_xi.values(j) * static_cast<double>(g) /
                     static_cast<double>(points - 1);
      if (value == 0.0) {
        if (zero_included) continue;
        zero_included = true;
      }
      rvec point = anticipated.values;
      point(j) = value;
      grid.push_back(std::move(point));
    }
  }

  double total = 0.0;
  double worst = 0.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    CalibrationVector truth{map.layout(), grid[i]};
    PhysicalParams zeta = xi_to_zeta(spec, truth);
    rvec probabilities = exact_channel_probabilities(spec.mask_params(zeta), rho);
    DataVector data =
        sample_counts(probabilities, spec.n, config.shot_noise ? config.shots : 0,
                      derive_seed(seed, 2 * i));
    SolverResult result = blind_calibrate(map, data, config.solver, anticipated, target,
                                          derive_seed(seed, 2 * i + 1));
    double err = 0.0;
    for (Eigen::Index j = 1; j < truth.values.size(); ++j) {
      err += std::abs(result.xi_hat.values(j) - truth.values(j));
    }
    if (config.normalize_error) err /= static_cast<double>(truth.values.size() - 1);
    total += err;
    worst = std::max(worst, err);
  }
  return config.objective == ProbeOptimizationConfig::Objective::mean_error
             ? total / static_cast<double>(grid.size())
             : worst;
}

std::vector<ScoredProbeState> optimize_probe_states(const ProbeOptimizationConfig& config,
                                                    const ErrorModelSpec& spec,
                                                    const ProductStateSpec& seed_state,
                                                    std::uint64_t seed) {
  ProductStateSpec current = seed_state;
  current.normalize_angles();
  if (config.budget <= 0) {
    return {ScoredProbeState{current, std::numeric_limits<double>::quiet_NaN()}};
  }
  std::vector<ScoredProbeState> evaluated;
  int evals = 0;
  // One shared stream keeps the objective comparable across candidates.
  const std::uint64_t objective_seed = derive_seed(seed, 0);
  auto score_of = [&](const ProductStateSpec& s) {
    ++evals;
    double value = probe_objective(config, spec, s, objective_seed);
    evaluated.push_back(ScoredProbeState{s, value});
    return value;
  };

  double best = score_of(current);
  double step = 0.25;
  const int coords = 2 * spec.n;
  while (evals < config.budget && step > 1e-3) {
    bool improved = false;
    for (int c = 0; c < coords && evals < config.budget; ++c) {
      for (double direction : {1.0, -1.0}) {
        if (evals >= config.budget) break;
        ProductStateSpec candidate = current;
        if (c < spec.n) {
          candidate.theta[static_cast<size_t>(c)] += direction * step;
        } else {
          candidate.phi[static_cast<size_t>(c - spec.n)] += direction * step;
        }
        candidate.normalize_angles();
        double value = score_of(candidate);
        if (value < best) {
          current = candidate;
          best = value;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  std::stable_sort(evaluated.begin(), evaluated.end(),
                   [](const ScoredProbeState& a, const ScoredProbeState& b) {
                     return a.score < b.score;
                   });
  if (static_cast<int>(evaluated.size()) > config.top_k) {
    evaluated.resize(static_cast<size_t>(config.top_k));
  }
  return evaluated;
}

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, ErrorModelSpec>> model_selection_sets(int n) {
  using E = ErrorKind;
  auto make = [n](std::vector<E> errors) {
    ErrorModelSpec spec;
    spec.n = n;
    spec.errors = std::move(errors);
    return spec;
  };
  return {
      {"set1_full", make({E::dark_bright, E::spillover, E::over_rotation,
                          E::crosstalk_symmetric, E::crosstalk_asymmetric,
                          E::crosstalk_phase})},
      {"set2_no_overrotation", make({E::dark_bright, E::spillover, E::crosstalk_symmetric,
                                     E::crosstalk_asymmetric, E::crosstalk_phase})},
      {"set3_no_ct_phase",
       make({E::dark_bright, E::spillover, E::crosstalk_symmetric, E::crosstalk_asymmetric})},
      {"set4_no_crosstalk", make({E::dark_bright, E::spillover})},
      {"set5_dark_bright", make({E::dark_bright})},
  };
}

std::vector<std::pair<std::string, ErrorModelSpec>> parameter_count_progression(int n) {
  using E = ErrorKind;
  auto make = [n](std::vector<E> errors) {
    ErrorModelSpec spec;
    spec.n = n;
    spec.errors = std::move(errors);
    return spec;
  };
  std::vector<E> acc = {E::dark_bright};
  std::vector<std::pair<std::string, ErrorModelSpec>> out;
  out.emplace_back("dark_bright", make(acc));
  acc.push_back(E::spillover);
  out.emplace_back("spillover", make(acc));
  acc.push_back(E::over_rotation);
  out.emplace_back("over_rotation", make(acc));
  acc.push_back(E::crosstalk_symmetric);
  out.emplace_back("crosstalk_symmetric", make(acc));
  acc.push_back(E::crosstalk_asymmetric);
  out.emplace_back("crosstalk_asymmetric", make(acc));
  acc.push_back(E::crosstalk_phase);
  out.emplace_back("crosstalk_phase", make(acc));
  acc.push_back(E::crosstalk_nnn);
  out.emplace_back("crosstalk_nnn", make(acc));
  return out;
}

std::vector<ModelSelectionRow> model_selection_sweep(
    const std::vector<std::pair<std::string, ErrorModelSpec>>& specs,
    const DataVector& probe_data, const cvec& probe_target,
    const std::vector<TestDataset>& test_sets, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, const std::optional<PhysicalParams>& truth,
    std::uint64_t seed, int jobs) {
  std::vector<ModelSelectionRow> rows(specs.size());
  parallel_for(static_cast<int>(specs.size()), jobs, [&](int si) {
    const auto& [name, spec] = specs[static_cast<size_t>(si)];
    MeasurementMap map = MeasurementMap::build(spec);
    ModelSelectionRow row;
    row.spec_name = name;
    row.num_params = parameter_count(spec);
    row.seed = derive_seed(seed, static_cast<std::uint64_t>(si));
    SolverResult result = blind_calibrate(map, probe_data, solve_config, ideal_xi(spec),
                                          probe_target, row.seed);
    row.final_residual = result.final_residual;
    if (truth.has_value()) {
      row.E = calibration_error(result.xi_hat, zeta_to_xi(spec, *truth));
    }
    double delta_sum = 0.0;
    for (const TestDataset& test : test_sets) {
      const cmat target_proj = test.target * test.target.adjoint();
      cmat rho_standard =
          calibrated_tomography(map, test.data, ideal_xi(spec), tomography_config);
      cmat rho_blind =
          calibrated_tomography(map, test.data, result.xi_hat, tomography_config);
      double delta = trace_distance(rho_blind, target_proj) -
                     trace_distance(rho_standard, target_proj);
      row.td_delta_per_state[test.name] = delta;
      delta_sum += delta;
    }
    row.mean_td_delta =
        test_sets.empty() ? 0.0 : delta_sum / static_cast<double>(test_sets.size());
    rows[static_cast<size_t>(si)] = std::move(row);
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

nlohmann::json BootstrapReport::to_json() const {
  nlohmann::json params = nlohmann::json::array();
  for (size_t i = 0; i < names.size(); ++i) {
    params.push_back({{"name", names[i]},
                      {"reported", reported(static_cast<Eigen::Index>(i))},
                      {"std", std_dev(static_cast<Eigen::Index>(i))},
                      {"median_offset", median_offset(static_cast<Eigen::Index>(i))}});
  }
  return nlohmann::json{{"parameters", params}, {"resamples", resamples}};
}

BootstrapReport bootstrap_error_bars(const MeasurementMap& map, const DataVector& data,
                                     const SolverConfig& config,
                                     const CalibrationVector& anticipated_xi,
                                     const cvec& target_psi, int resamples,
                                     std::uint64_t seed, int jobs) {
  if (resamples < 2) {
    throw std::invalid_argument("bootstrap_error_bars: need at least two resamples");
  }
  if (data.shots_per_basis <= 0) {
    throw std::invalid_argument("bootstrap_error_bars: data must carry a shot count");
  }
  SolverResult original =
      blind_calibrate(map, data, config, anticipated_xi, target_psi, derive_seed(seed, 0));
  const int k1 = map.num_coefficients();
  rmat samples(resamples, k1);
  parallel_for(resamples, jobs, [&](int b) {
    std::uint64_t draw_seed = derive_seed(seed, 1 + static_cast<std::uint64_t>(b));
    DataVector redrawn =
        sample_counts(data.values, data.n, data.shots_per_basis, draw_seed);
    SolverResult result =
        blind_calibrate(map, redrawn, config, anticipated_xi, target_psi,
                        derive_seed(draw_seed, 1));
    samples.row(b) = result.xi_hat.values.transpose();
  });

  BootstrapReport report;
  report.names = map.layout().names;
  report.reported = original.xi_hat.values;
  report.std_dev = rvec(k1);
  report.median_offset = rvec(k1);
  report.resamples = resamples;
  for (int j = 0; j < k1; ++j) {
    rvec column = samples.col(j);
    report.std_dev(j) = sample_std(column);
    std::vector<double> sorted(column.data(), column.data() + column.size());
    std::sort(sorted.begin(), sorted.end());
    size_t mid = sorted.size() / 2;
    double median = sorted.size() % 2 == 1
                        ? sorted[mid]
                        : 0.5 * (sorted[mid - 1] + sorted[mid]);
    report.median_offset(j) = std::abs(report.reported(j) - median);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Benchmark drivers
// ---------------------------------------------------------------------------

std::vector<ShotScalingRow> shot_scaling_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const PhysicalParams& zeta_true,
    const std::vector<long long>& shot_grid, int trials, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, std::uint64_t seed, int jobs) {
  for (size_t i = 1; i < shot_grid.size(); ++i) {
    if (shot_grid[i] <= shot_grid[i - 1]) {
      throw std::invalid_argument("shot_scaling_benchmark: grid must be increasing");
    }
  }
  const MeasurementMap map = MeasurementMap::build(spec);
  const cvec target = state.target_state();
  const cmat target_proj = target * target.adjoint();
  const cmat rho = prepare_state(state, NoiseSpec{});
  const rvec probabilities = exact_channel_probabilities(spec.mask_params(zeta_true), rho);
  const CalibrationVector truth = zeta_to_xi(spec, zeta_true);
  const CalibrationVector anticipated = ideal_xi(spec);

  std::vector<ShotScalingRow> rows;
  for (size_t gi = 0; gi < shot_grid.size(); ++gi) {
    ShotScalingRow row;
    row.shots = shot_grid[gi];
    row.trials = trials;
    row.seed = derive_seed(seed, gi);
    rvec errors(trials), distances(trials);
    parallel_for(trials, jobs, [&](int t) {
      std::uint64_t trial_seed = derive_seed(row.seed, static_cast<std::uint64_t>(t));
      DataVector data = sample_counts(probabilities, spec.n, row.shots, trial_seed);
      SolverResult result = blind_calibrate(map, data, solve_config, anticipated, target,
                                            derive_seed(trial_seed, 1));
      errors(t) = calibration_error(result.xi_hat, truth);
      cmat fit = calibrated_tomography(map, data, result.xi_hat, tomography_config);
      distances(t) = trace_distance(fit, target_proj);
    });
    row.mean_E = mean_of(errors);
    row.std_E = sample_std(errors);
    row.mean_td = mean_of(distances);
    row.std_td = sample_std(distances);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ParamCountRow> parameter_count_benchmark(
    int n, const CircuitSpec& state, const PhysicalParams& zeta_true, long long shots,
    int trials, const SolverConfig& solve_config, std::uint64_t seed, int jobs) {
  const cmat rho = prepare_state(state, NoiseSpec{});
  const cvec target = state.target_state();
  std::vector<ParamCountRow> rows;
  auto progression = parameter_count_progression(n);
  for (size_t si = 0; si < progression.size(); ++si) {
    const auto& [name, spec] = progression[si];
    const MeasurementMap map = MeasurementMap::build(spec);
    const PhysicalParams masked = spec.mask_params(zeta_true);
    const rvec probabilities = exact_channel_probabilities(masked, rho);
    const CalibrationVector truth = zeta_to_xi(spec, masked);
    const CalibrationVector anticipated = ideal_xi(spec);
    ParamCountRow row;
    row.spec_name = name;
    row.num_params = parameter_count(spec);
    row.seed = derive_seed(seed, si);
    rvec errors(trials);
    parallel_for(trials, jobs, [&](int t) {
      std::uint64_t trial_seed = derive_seed(row.seed, static_cast<std::uint64_t>(t));
      DataVector data = sample_counts(probabilities, n, shots, trial_seed);
      SolverResult result = blind_calibrate(map, data, solve_config, anticipated, target,
                                            derive_seed(trial_seed, 1));
      errors(t) = calibration_error(result.xi_hat, truth);
    });
    row.mean_E = mean_of(errors);
    row.std_E = sample_std(errors);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ModeComparisonRow> projective_vs_expectation_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const PhysicalParams& zeta_true,
    const std::vector<long long>& shot_grid, int trials, const SolverConfig& solve_config,
    const SolverConfig& tomography_config, std::uint64_t seed, int jobs) {
  const MeasurementMap map = MeasurementMap::build(spec);
  const MeasurementMap expectation_map = map.to_expectation_mode();
  const cvec target = state.target_state();
  const cmat target_proj = target * target.adjoint();
  const cmat rho = prepare_state(state, NoiseSpec{});
  const rvec probabilities = exact_channel_probabilities(spec.mask_params(zeta_true), rho);
  const CalibrationVector truth = zeta_to_xi(spec, zeta_true);
  const CalibrationVector anticipated = ideal_xi(spec);

  std::vector<ModeComparisonRow> rows;
  for (size_t gi = 0; gi < shot_grid.size(); ++gi) {
    ModeComparisonRow row;
    row.shots = shot_grid[gi];
    row.trials = trials;
    row.seed = derive_seed(seed, 1000 + gi);
    rvec e_proj(trials), e_exp(trials), td_proj(trials), td_exp(trials);
    parallel_for(trials, jobs, [&](int t) {
      std::uint64_t trial_seed = derive_seed(row.seed, static_cast<std::uint64_t>(t));
      // Both fits consume the same sampled counts.
      DataVector data = sample_counts(probabilities, spec.n, row.shots, trial_seed);
      SolverResult projective = blind_calibrate(map, data, solve_config, anticipated,
                                                target, derive_seed(trial_seed, 1));
      SolverResult expectation =
          blind_calibrate(expectation_map, data, solve_config, anticipated, target,
                          derive_seed(trial_seed, 2));
      e_proj(t) = calibration_error(projective.xi_hat, truth);
      e_exp(t) = calibration_error(expectation.xi_hat, truth);
      cmat fit_proj =
          calibrated_tomography(map, data, projective.xi_hat, tomography_config);
      cmat fit_exp =
          calibrated_tomography(map, data, expectation.xi_hat, tomography_config);
      td_proj(t) = trace_distance(fit_proj, target_proj);
      td_exp(t) = trace_distance(fit_exp, target_proj);
    });
    row.mean_E_projective = mean_of(e_proj);
    row.mean_E_expectation = mean_of(e_exp);
    row.mean_td_projective = mean_of(td_proj);
    row.mean_td_expectation = mean_of(td_exp);
    rows.push_back(row);
  }
  return rows;
}

std::vector<NormalizationRow> normalization_benchmark(
    const ErrorModelSpec& spec, const CircuitSpec& state, const NoiseSpec& noise,
    const PhysicalParams& zeta_true, long long shots, int trials,
    const SolverConfig& solve_config, const SolverConfig& tomography_config,
    std::uint64_t seed, int jobs) {
  const MeasurementMap map = MeasurementMap::build(spec);
  const cvec target = state.target_state();
  const cmat target_proj = target * target.adjoint();
  const cmat rho = prepare_state(state, noise);
  const rvec probabilities = exact_channel_probabilities(spec.mask_params(zeta_true), rho);
  const CalibrationVector truth = zeta_to_xi(spec, zeta_true);
  const CalibrationVector anticipated = ideal_xi(spec);

  const Normalization methods[3] = {Normalization::none, Normalization::gauge_shift,
                                    Normalization::project};
  std::vector<NormalizationRow> rows;
  for (int mi = 0; mi < 3; ++mi) {
    NormalizationRow row;
    row.method = normalization_name(methods[mi]);
    row.seed = derive_seed(seed, 2000 + static_cast<std::uint64_t>(mi));
    SolverConfig config = solve_config;
    config.normalization = methods[mi];
    rvec errors(trials), distances(trials);
    parallel_for(trials, jobs, [&](int t) {
      // Trial data is shared across methods through the common trial seed.
      std::uint64_t trial_seed = derive_seed(seed, 3000 + static_cast<std::uint64_t>(t));
      DataVector data = sample_counts(probabilities, spec.n, shots, trial_seed);
      SolverResult result = blind_calibrate(map, data, config, anticipated, target,
                                            derive_seed(trial_seed, 1));
      errors(t) = calibration_error(result.xi_hat, truth);
      cmat fit = calibrated_tomography(map, data, result.xi_hat, tomography_config);
      distances(t) = trace_distance(fit, target_proj);
    });
    row.mean_E = mean_of(errors);
    row.std_E = sample_std(errors);
    row.mean_td = mean_of(distances);
    row.std_td = sample_std(distances);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TdValidityRow> td_validity_sweep(
    const ErrorModelSpec& spec, const std::vector<CircuitSpec>& states,
    const std::vector<std::string>& state_names, const NoiseSpec& noise,
    const PhysicalParams& zeta_true, const std::vector<double>& c_grid, long long shots,
    int trials, const SolverConfig& tomography_config, std::uint64_t seed, int jobs) {
  if (states.size() != state_names.size()) {
    throw std::invalid_argument("td_validity_sweep: state/name count mismatch");
  }
  const MeasurementMap map = MeasurementMap::build(spec);
  const rvec xi_ideal_values = ideal_xi(spec).values;
  const rvec xi_actual_values = zeta_to_xi(spec, zeta_true).values;

  std::vector<TdValidityRow> rows;
  for (size_t si = 0; si < states.size(); ++si) {
    const cvec target = states[si].target_state();
    const cmat target_proj = target * target.adjoint();
    const cmat rho_prepared = prepare_state(states[si], noise);
    const rvec probabilities =
        exact_channel_probabilities(spec.mask_params(zeta_true), rho_prepared);
    for (size_t ci = 0; ci < c_grid.size(); ++ci) {
      const double c = c_grid[ci];
      CalibrationVector xi_c{map.layout(),
                             (1.0 - c) * xi_ideal_values + c * xi_actual_values};
      TdValidityRow row;
      row.state = state_names[si];
      row.c = c;
      row.seed = derive_seed(seed, 777 + si * 1000 + ci);
      rvec td_target(trials), td_prepared(trials);
      parallel_for(trials, jobs, [&](int t) {
        std::uint64_t trial_seed = derive_seed(row.seed, static_cast<std::uint64_t>(t));
        DataVector data = sample_counts(probabilities, spec.n, shots, trial_seed);
        cmat fit = calibrated_tomography(map, data, xi_c, tomography_config);
        td_target(t) = trace_distance(fit, target_proj);
        td_prepared(t) = trace_distance(fit, rho_prepared);
      });
      row.mean_td_target = mean_of(td_target);
      row.std_td_target = sample_std(td_target);
      row.mean_td_prepared = mean_of(td_prepared);
      row.std_td_prepared = sample_std(td_prepared);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace blindcal
