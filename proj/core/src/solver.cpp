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

#include "blindcal/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blindcal/rng.hpp"

namespace blindcal {

namespace {

constexpr double kTiny = 1e-300;

double frobenius_sq(const cmat& a) { return a.squaredNorm(); }

// Sum of the r largest nonnegative eigenvalues.
double retained_trace(const rvec& descending_eigs, int rank) {
  double total = 0.0;
  for (int i = 0; i < std::min<int>(rank, static_cast<int>(descending_eigs.size())); ++i) {
    if (descending_eigs(i) > 0.0) total += descending_eigs(i);
  }
  return total;
}

}  // namespace

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::gauge_shift: return "gauge_shift";
    case Normalization::project: return "project";
  }
  throw std::invalid_argument("normalization_name: unknown value");
}

Normalization normalization_from_name(const std::string& name) {
  if (name == "none") return Normalization::none;
  if (name == "gauge_shift") return Normalization::gauge_shift;
  if (name == "project") return Normalization::project;
  throw std::invalid_argument("normalization_from_name: unknown name '" + name + "'");
}

nlohmann::json SolverConfig::to_json() const {
  return nlohmann::json{{"rank", rank},
                        {"epsilon", epsilon},
                        {"max_iters", max_iters},
                        {"init_xi_region", init_xi_region},
                        {"init_rho_region", init_rho_region},
                        {"allow_sign_flip", allow_sign_flip},
                        {"restarts", restarts},
                        {"normalization", normalization_name(normalization)}};
}

SolverConfig SolverConfig::with_overrides(const nlohmann::json& j) const {
  SolverConfig out = *this;
  out.rank = j.value("rank", out.rank);
  out.epsilon = j.value("epsilon", out.epsilon);
  out.max_iters = j.value("max_iters", out.max_iters);
  out.init_xi_region = j.value("init_xi_region", out.init_xi_region);
  out.init_rho_region = j.value("init_rho_region", out.init_rho_region);
  out.allow_sign_flip = j.value("allow_sign_flip", out.allow_sign_flip);
  out.restarts = j.value("restarts", out.restarts);
  if (j.contains("normalization")) {
    out.normalization = normalization_from_name(j.at("normalization").get<std::string>());
  }
  if (out.rank < 1 || out.epsilon <= 0.0 || out.max_iters < 1 || out.restarts < 1) {
    throw std::invalid_argument("SolverConfig: invalid override values");
  }
  return out;
}

nlohmann::json SolverResult::to_json() const {
  nlohmann::json rho = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rho_hat.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < rho_hat.cols(); ++c) {
      row.push_back({rho_hat(r, c).real(), rho_hat(r, c).imag()});
    }
    rho.push_back(std::move(row));
  }
  return nlohmann::json{{"xi", xi_hat.to_json()},
                        {"rho", rho},
                        {"residual_history", residual_history},
                        {"iterations", iterations},
                        {"converged", converged},
                        {"final_residual", final_residual},
                        {"seed", seed},
                        {"restart_index", restart_index}};
}

cmat tangent_project(const cmat& gradient, const cmat& rho, int rank) {
  const Eigen::Index d = rho.rows();
  if (rank >= d) return hermitize(gradient);
  EigH eig = eig_hermitian(rho, 1e-9);
  cmat ur = eig.eigenvectors.leftCols(rank);
  cmat q = cmat::Identity(d, d) - ur * ur.adjoint();
  cmat g = hermitize(gradient);
  return g - q * g * q;
}

cmat psd_rank_project(const cmat& a, int rank) {
  EigH eig = eig_hermitian(hermitize(a), std::numeric_limits<double>::infinity());
  const Eigen::Index d = a.rows();
  rvec clipped = rvec::Zero(d);
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(rank, d); ++i) {
    clipped(i) = std::max(eig.eigenvalues(i), 0.0);
  }
  return eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.adjoint();
}

cmat trace_one_project(const cmat& a, int rank) {
  EigH eig = eig_hermitian(hermitize(a), std::numeric_limits<double>::infinity());
  const int d = static_cast<int>(a.rows());
  const int keep = std::min(rank, d);
  // Find the largest prefix j with lambda_j above the water level
  // (prefix_j - 1) / j; the level always exists since j = 1 works.
  double prefix = 0.0;
  double level = eig.eigenvalues(0) - 1.0;
  for (int j = 1; j <= keep; ++j) {
    prefix += eig.eigenvalues(j - 1);
    double candidate = (prefix - 1.0) / j;
    if (eig.eigenvalues(j - 1) - candidate > 0.0) {
      level = candidate;
    } else {
      break;
    }
  }
  rvec shifted = rvec::Zero(d);
  for (int i = 0; i < keep; ++i) {
    shifted(i) = std::max(eig.eigenvalues(i) - level, 0.0);
  }
  return eig.eigenvectors * shifted.asDiagonal() * eig.eigenvectors.adjoint();
}

rvec project_xi(const rvec& xi, const std::vector<std::pair<double, double>>& box) {
  if (static_cast<size_t>(xi.size()) != box.size()) {
    throw std::invalid_argument("project_xi: box size mismatch");
  }
  rvec out = xi;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = std::clamp(out(i), box[static_cast<size_t>(i)].first,
                        box[static_cast<size_t>(i)].second);
  }
  return out;
}

std::pair<cmat, rvec> gauge_normalize(const cmat& rho_proj, const rvec& xi) {
  double t = rho_proj.trace().real();
  if (!(t > 0.0)) {
    throw std::invalid_argument("gauge_normalize: trace must be positive");
  }
  return {rho_proj / t, t * xi};
}

double state_step_width(const MeasurementMap& map, const rvec& xi,
                        const cmat& projected_gradient) {
  double num = frobenius_sq(projected_gradient);
  if (num <= 0.0) return 0.0;
  double denom = map.apply(xi, projected_gradient).squaredNorm();
  if (denom <= kTiny) return 0.0;
  return num / denom;
}

double xi_step_width(const MeasurementMap& map, const cmat& rho, const rvec& gradient) {
  double num = gradient.squaredNorm();
  if (num <= 0.0) return 0.0;
  double denom = (map.state_contractions(rho) * gradient).squaredNorm();
  if (denom <= kTiny) return 0.0;
  return num / denom;
}

double relative_residual(const MeasurementMap& map, const rvec& y, const rvec& xi,
                         const cmat& rho) {
  double ynorm = std::max(y.norm(), 1e-30);
  return (y - map.apply(xi, rho)).norm() / ynorm;
}

namespace {

struct AgdOutcome {
  cmat rho;
  rvec xi;
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
  bool zero_trace = false;
  double final_residual = std::numeric_limits<double>::infinity();
};

AgdOutcome run_agd(const MeasurementMap& map, const rvec& y, const SolverConfig& config,
                   cmat rho, rvec xi, bool optimize_xi, int rank,
                   Normalization normalization, bool allow_sign_flip,
                   const std::vector<std::pair<double, double>>& box) {
  AgdOutcome out;
  const double ynorm = std::max(y.norm(), 1e-30);
  // With xi fixed the combined operator rows never change.
  rmat fixed_rows;
  if (!optimize_xi) fixed_rows = map.combined_rows(xi);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    // State step: gradient of 1/2 ||y - A(xi, rho)||^2 ascends the residual fit.
    if (optimize_xi) fixed_rows = map.combined_rows(xi);
    const rmat& rows = fixed_rows;
    rvec residual = y - rows * map.vec_real(rho);
    cmat gradient = map.mat_from_real(rows.transpose() * residual);
    cmat pg = tangent_project(gradient, rho, rank);
    rvec pg_coords = map.vec_real(pg);
    double num = pg_coords.squaredNorm();
    if (num > 0.0) {
      double denom = (rows * pg_coords).squaredNorm();
      if (denom > kTiny) rho = hermitize(rho + (num / denom) * pg);
    }

    // Rank-constrained PSD projection, optionally absorbing a global sign
    // flip into xi.
    double sign = 1.0;
    if (optimize_xi && allow_sign_flip) {
      EigH eig = eig_hermitian(hermitize(rho), std::numeric_limits<double>::infinity());
      double plus = retained_trace(eig.eigenvalues, rank);
      double minus = retained_trace(-eig.eigenvalues.reverse(), rank);
      if (minus > plus) sign = -1.0;
    }
    cmat projected = psd_rank_project(sign * rho, rank);
    if (sign < 0.0) xi = -xi;

    switch (normalization) {
      case Normalization::gauge_shift: {
        double t = projected.trace().real();
        if (!(t > 1e-14)) {
          out.zero_trace = true;
          return out;
        }
        rho = projected / t;
        if (optimize_xi) xi *= t;
        break;
      }
      case Normalization::project:
        rho = trace_one_project(projected, rank);
        break;
      case Normalization::none:
        rho = projected;
        break;
    }

    // Calibration step (blind mode only).
    if (optimize_xi) {
      rmat contractions = map.state_contractions(rho);
      residual = y - contractions * xi;
      rvec g = contractions.transpose() * residual;
      double gnorm = g.squaredNorm();
      if (gnorm > 0.0) {
        double denom = (contractions * g).squaredNorm();
        if (denom > kTiny) xi = project_xi(xi + (gnorm / denom) * g, box);
      }
      residual = y - contractions * xi;
    } else {
      residual = y - fixed_rows * map.vec_real(rho);
    }

    double rel = residual.norm() / ynorm;
    if (!std::isfinite(rel)) {
      throw NumericalError("solver: non-finite objective at iteration " +
                           std::to_string(iter + 1));
    }
    out.history.push_back(rel);
    out.iterations = iter + 1;
    out.final_residual = rel;
    if (rel <= config.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.rho = std::move(rho);
  out.xi = std::move(xi);
  return out;
}

cmat initial_rho(const cvec& target, double region, Rng& rng) {
  cvec noise(target.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    noise(i) = complexd(rng.normal(), rng.normal());
  }
  noise.normalize();
  double radius = region * rng.uniform();
  cvec perturbed = target + radius * noise;
  double norm = perturbed.norm();
  if (norm <= 0.0) perturbed = target; else perturbed /= norm;
  return perturbed * perturbed.adjoint();
}

rvec initial_xi(const rvec& anticipated, const std::vector<std::pair<double, double>>& box,
                double region, Rng& rng) {
  rvec out(anticipated.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    // Entries anticipated at zero still get a small jitter floor so restarts
    // explore distinct calibration starts.
    double scale = std::max(std::abs(anticipated(i)), 0.02);
    out(i) = anticipated(i) + region * scale * rng.uniform(-1.0, 1.0);
  }
  return project_xi(out, box);
}

}  // namespace

SolverResult blind_calibrate(const MeasurementMap& map, const DataVector& data,
                             const SolverConfig& config,
                             const CalibrationVector& anticipated_xi,
                             const cvec& target_psi, std::uint64_t seed) {
  if (anticipated_xi.values.size() != map.num_coefficients()) {
    throw std::invalid_argument("blind_calibrate: anticipated xi does not match the map");
  }
  if (target_psi.size() != map.dim()) {
    throw std::invalid_argument("blind_calibrate: target state dimension mismatch");
  }
  if (config.rank < 1 || config.rank > map.dim()) {
    throw std::invalid_argument("blind_calibrate: rank out of range");
  }
  const rvec y = data_for_map(map, data);
  const auto& box = map.layout().box;

  SolverResult best;
  bool have_best = false;
  for (int restart = 0; restart < config.restarts; ++restart) {
    AgdOutcome outcome;
    bool usable = false;
    std::uint64_t used_seed = 0;
    // Zero-trace projections are pathological; redraw the start a few times
    // before giving up.
    for (int attempt = 0; attempt <= 5; ++attempt) {
      used_seed = derive_seed(seed, static_cast<std::uint64_t>(restart) * 8 + attempt);
      Rng rng(used_seed);
      cmat rho0 = initial_rho(target_psi, config.init_rho_region, rng);
      rvec xi0 = initial_xi(anticipated_xi.values, box, config.init_xi_region, rng);
      outcome = run_agd(map, y, config, std::move(rho0), std::move(xi0),
                        /*optimize_xi=*/true, config.rank, config.normalization,
                        config.allow_sign_flip, box);
      if (!outcome.zero_trace) {
        usable = true;
        break;
      }
    }
    if (!usable) {
      throw NumericalError("blind_calibrate: repeated zero-trace projections");
    }
    if (!have_best || outcome.final_residual < best.final_residual) {
      // Report a gauge-fixed state regardless of the iteration normalization.
      cmat rho = outcome.rho;
      rvec xi = outcome.xi;
      double t = rho.trace().real();
      if (t > 0.0 && std::abs(t - 1.0) > 1e-14) {
        std::tie(rho, xi) = gauge_normalize(rho, xi);
      }
      best.rho_hat = std::move(rho);
      best.xi_hat.layout = map.layout();
      best.xi_hat.values = std::move(xi);
      best.residual_history = std::move(outcome.history);
      best.iterations = outcome.iterations;
      best.converged = outcome.converged;
      best.final_residual = outcome.final_residual;
      best.seed = used_seed;
      best.restart_index = restart;
      have_best = true;
    }
  }
  return best;
}

cmat calibrated_tomography(const MeasurementMap& map, const DataVector& data,
                           const CalibrationVector& xi_fixed, const SolverConfig& config) {
  if (xi_fixed.values.size() != map.num_coefficients()) {
    throw std::invalid_argument("calibrated_tomography: xi does not match the map");
  }
  const rvec y = data_for_map(map, data);
  const int d = map.dim();
  cmat rho0 = cmat::Identity(d, d) / static_cast<double>(d);
  AgdOutcome outcome =
      run_agd(map, y, config, std::move(rho0), xi_fixed.values,
              /*optimize_xi=*/false, d, Normalization::none,
              /*allow_sign_flip=*/false, map.layout().box);
  return trace_one_project(outcome.rho, d);
}

}  // namespace blindcal
