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

#include "blindcal/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blindcal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double normalize_phase(double phi) {
  double out = std::fmod(phi, kTwoPi);
  if (out < 0.0) out += kTwoPi;
  return out;
}

void check_probability(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                " must be a probability in [0, 1]");
  }
}

void check_fraction(double value, const char* name) {
  if (!(value >= -1.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string("PhysicalParams: ") + name +
                                " must lie in [-1, 1]");
  }
}

}  // namespace

void PhysicalParams::validate_and_normalize() {
  check_probability(p0, "p0");
  check_probability(p1, "p1");
  check_probability(p_left, "p_left");
  check_probability(p_right, "p_right");
  check_fraction(xi_or, "xi_or");
  check_fraction(xi_l, "xi_l");
  check_fraction(xi_r, "xi_r");
  check_fraction(xi_nnl, "xi_nnl");
  check_fraction(xi_nnr, "xi_nnr");
  phi_l = normalize_phase(phi_l);
  phi_r = normalize_phase(phi_r);
  phi_nnl = normalize_phase(phi_nnl);
  phi_nnr = normalize_phase(phi_nnr);
}

bool PhysicalParams::all_zero() const {
  return xi_or == 0.0 && p0 == 0.0 && p1 == 0.0 && p_left == 0.0 && p_right == 0.0 &&
         xi_l == 0.0 && xi_r == 0.0 && xi_nnl == 0.0 && xi_nnr == 0.0;
}

nlohmann::json PhysicalParams::to_json() const {
  return nlohmann::json{
      {"xi_or", xi_or},   {"p0", p0},         {"p1", p1},
      {"p_left", p_left}, {"p_right", p_right}, {"xi_l", xi_l},
      {"xi_r", xi_r},     {"phi_l", phi_l},   {"phi_r", phi_r},
      {"xi_nnl", xi_nnl}, {"xi_nnr", xi_nnr}, {"phi_nnl", phi_nnl},
      {"phi_nnr", phi_nnr}};
}

PhysicalParams PhysicalParams::from_json(const nlohmann::json& j) {
  PhysicalParams p;
  p.xi_or = j.value("xi_or", 0.0);
  p.p0 = j.value("p0", 0.0);
  p.p1 = j.value("p1", 0.0);
  p.p_left = j.value("p_left", 0.0);
  p.p_right = j.value("p_right", 0.0);
  p.xi_l = j.value("xi_l", 0.0);
  p.xi_r = j.value("xi_r", 0.0);
  p.phi_l = j.value("phi_l", 0.0);
  p.phi_r = j.value("phi_r", 0.0);
  p.xi_nnl = j.value("xi_nnl", 0.0);
  p.xi_nnr = j.value("xi_nnr", 0.0);
  p.phi_nnl = j.value("phi_nnl", 0.0);
  p.phi_nnr = j.value("phi_nnr", 0.0);
  p.validate_and_normalize();
  return p;
}

PhysicalParams PhysicalParams::benchmark_defaults() {
  PhysicalParams p;
  p.xi_or = 0.01;
  p.p0 = 0.0032;
  p.p1 = 0.01541;
  p.p_left = 0.0017;
  p.p_right = 0.0041;
  p.xi_l = 0.0256;
  p.xi_r = 0.0118;
  p.phi_l = kPi / 4.0;
  p.phi_r = kPi / 8.0;
  return p;
}

namespace {

const std::vector<std::pair<ErrorKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ErrorKind, std::string>> table = {
      {ErrorKind::over_rotation, "over_rotation"},
      {ErrorKind::dark_bright, "dark_bright"},
      {ErrorKind::spillover, "spillover"},
      {ErrorKind::crosstalk_symmetric, "crosstalk_symmetric"},
      {ErrorKind::crosstalk_asymmetric, "crosstalk_asymmetric"},
      {ErrorKind::crosstalk_phase, "crosstalk_phase"},
      {ErrorKind::crosstalk_nnn, "crosstalk_nnn"},
  };
  return table;
}

}  // namespace

const std::string& error_kind_name(ErrorKind kind) {
  for (const auto& [k, name] : kind_names()) {
    if (k == kind) return name;
  }
  throw std::invalid_argument("error_kind_name: unknown kind");
}

ErrorKind error_kind_from_name(const std::string& name) {
  for (const auto& [k, n] : kind_names()) {
    if (n == name) return k;
  }
  throw std::invalid_argument("error_kind_from_name: unknown error '" + name + "'");
}

bool ErrorModelSpec::has(ErrorKind kind) const {
  return std::find(errors.begin(), errors.end(), kind) != errors.end();
}

int ErrorModelSpec::crosstalk_level() const {
  if (has(ErrorKind::crosstalk_phase)) return 3;
  if (has(ErrorKind::crosstalk_asymmetric)) return 2;
  if (has(ErrorKind::crosstalk_symmetric)) return 1;
  return 0;
}

void ErrorModelSpec::validate() const {
  if (n < 1) throw std::invalid_argument("ErrorModelSpec: n must be at least 1");
  for (size_t i = 0; i < errors.size(); ++i) {
    for (size_t j = i + 1; j < errors.size(); ++j) {
      if (errors[i] == errors[j]) {
        throw std::invalid_argument("ErrorModelSpec: duplicate error flag");
      }
    }
  }
  if (has(ErrorKind::crosstalk_asymmetric) && !has(ErrorKind::crosstalk_symmetric)) {
    throw std::invalid_argument(
        "ErrorModelSpec: crosstalk_asymmetric requires crosstalk_symmetric");
  }
  if (has(ErrorKind::crosstalk_phase) && !has(ErrorKind::crosstalk_asymmetric)) {
    throw std::invalid_argument(
        "ErrorModelSpec: crosstalk_phase requires crosstalk_asymmetric");
  }
  if (has(ErrorKind::crosstalk_nnn) && !has(ErrorKind::crosstalk_phase)) {
    throw std::invalid_argument("ErrorModelSpec: crosstalk_nnn requires crosstalk_phase");
  }
}

PhysicalParams ErrorModelSpec::mask_params(const PhysicalParams& params) const {
  PhysicalParams out = params;
  if (!has(ErrorKind::dark_bright)) {
    out.p0 = 0.0;
    out.p1 = 0.0;
  }
  if (!has(ErrorKind::spillover)) {
    out.p_left = 0.0;
    out.p_right = 0.0;
  }
  if (!has(ErrorKind::over_rotation)) out.xi_or = 0.0;
  switch (crosstalk_level()) {
    case 0:
      out.xi_l = out.xi_r = 0.0;
      out.phi_l = out.phi_r = 0.0;
      break;
    case 1:
      out.xi_r = out.xi_l;
      out.phi_l = out.phi_r = 0.0;
      break;
    case 2:
      out.phi_l = out.phi_r = 0.0;
      break;
    default:
      break;
  }
  if (!has(ErrorKind::crosstalk_nnn)) {
    out.xi_nnl = out.xi_nnr = 0.0;
    out.phi_nnl = out.phi_nnr = 0.0;
  }
  return out;
}

nlohmann::json ErrorModelSpec::to_json() const {
  nlohmann::json names = nlohmann::json::array();
  for (ErrorKind kind : errors) names.push_back(error_kind_name(kind));
  nlohmann::json ranges = nlohmann::json::object();
  for (const auto& [name, range] : range_overrides) {
    ranges[name] = {range.first, range.second};
  }
  return nlohmann::json{{"n", n}, {"errors", names}, {"ranges", ranges}};
}

ErrorModelSpec ErrorModelSpec::from_json(const nlohmann::json& j) {
  ErrorModelSpec spec;
  spec.n = j.at("n").get<int>();
  for (const auto& name : j.at("errors")) {
    spec.errors.push_back(error_kind_from_name(name.get<std::string>()));
  }
  if (j.contains("ranges")) {
    for (const auto& [name, range] : j.at("ranges").items()) {
      if (!range.is_array() || range.size() != 2) {
        throw std::invalid_argument("ErrorModelSpec: range for '" + name +
                                    "' must be [lo, hi]");
      }
      spec.range_overrides[name] = {range[0].get<double>(), range[1].get<double>()};
    }
  }
  spec.validate();
  return spec;
}

ErrorModelSpec ErrorModelSpec::nine_parameter(int n) {
  ErrorModelSpec spec;
  spec.n = n;
  spec.errors = {ErrorKind::dark_bright,        ErrorKind::spillover,
                 ErrorKind::over_rotation,      ErrorKind::crosstalk_symmetric,
                 ErrorKind::crosstalk_asymmetric, ErrorKind::crosstalk_phase};
  return spec;
}

int CoefficientLayout::index_of(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

// Coefficient groups appear in the order their first flag appears in the
// spec's error list; the crosstalk refinements share one group.
enum class CoeffGroup { over_rotation, dark_bright, spillover, crosstalk_nn, crosstalk_nnn };

CoeffGroup group_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::over_rotation: return CoeffGroup::over_rotation;
    case ErrorKind::dark_bright: return CoeffGroup::dark_bright;
    case ErrorKind::spillover: return CoeffGroup::spillover;
    case ErrorKind::crosstalk_nnn: return CoeffGroup::crosstalk_nnn;
    default: return CoeffGroup::crosstalk_nn;
  }
}

std::vector<CoeffGroup> group_order(const ErrorModelSpec& spec) {
  std::vector<CoeffGroup> order;
  for (ErrorKind kind : spec.errors) {
    CoeffGroup g = group_of(kind);
    if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
  }
  return order;
}

std::vector<std::string> group_names(const ErrorModelSpec& spec, CoeffGroup group) {
  switch (group) {
    case CoeffGroup::over_rotation: return {"xi_or"};
    case CoeffGroup::dark_bright: return {"p0", "p1"};
    case CoeffGroup::spillover: return {"p_left", "p_right"};
    case CoeffGroup::crosstalk_nn:
      switch (spec.crosstalk_level()) {
        case 1: return {"xi_ct"};
        case 2: return {"xi_l", "xi_r"};
        case 3: return {"xi_l_cos", "xi_l_sin", "xi_r_cos", "xi_r_sin"};
        default: return {};
      }
    case CoeffGroup::crosstalk_nnn:
      return {"xi_nnl_cos", "xi_nnl_sin", "xi_nnr_cos", "xi_nnr_sin"};
  }
  return {};
}

std::pair<double, double> default_box(const std::string& name) {
  if (name == "ideal") return {0.5, 1.5};
  if (is_readout_coefficient(name)) return {0.0, 1.0};
  return {-1.0, 1.0};
}

}  // namespace

CoefficientLayout coefficient_layout(const ErrorModelSpec& spec) {
  spec.validate();
  CoefficientLayout layout;
  layout.names.push_back("ideal");
  for (CoeffGroup group : group_order(spec)) {
    for (std::string& name : group_names(spec, group)) {
      layout.names.push_back(std::move(name));
    }
  }
  layout.box.reserve(layout.names.size());
  for (const std::string& name : layout.names) {
    auto it = spec.range_overrides.find(name);
    layout.box.push_back(it != spec.range_overrides.end() ? it->second : default_box(name));
  }
  return layout;
}

int parameter_count(const ErrorModelSpec& spec) {
  return coefficient_layout(spec).size() - 1;
}

bool is_readout_coefficient(const std::string& name) {
  return name == "p0" || name == "p1" || name == "p_left" || name == "p_right";
}

double CalibrationVector::at(const std::string& name) const {
  int index = layout.index_of(name);
  if (index < 0) {
    throw std::invalid_argument("CalibrationVector: no coefficient named '" + name + "'");
  }
  return values(index);
}

nlohmann::json CalibrationVector::to_json() const {
  nlohmann::json entries = nlohmann::json::object();
  nlohmann::json order = nlohmann::json::array();
  nlohmann::json box = nlohmann::json::object();
  for (int i = 0; i < layout.size(); ++i) {
    entries[layout.names[static_cast<size_t>(i)]] = values(i);
    order.push_back(layout.names[static_cast<size_t>(i)]);
    box[layout.names[static_cast<size_t>(i)]] = {layout.box[static_cast<size_t>(i)].first,
                                                 layout.box[static_cast<size_t>(i)].second};
  }
  return nlohmann::json{{"coefficients", entries}, {"order", order}, {"box", box}};
}

CalibrationVector CalibrationVector::from_json(const nlohmann::json& j) {
  CalibrationVector xi;
  const auto& order = j.at("order");
  xi.values = rvec(order.size());
  Eigen::Index i = 0;
  for (const auto& name : order) {
    std::string key = name.get<std::string>();
    xi.layout.names.push_back(key);
    xi.values(i++) = j.at("coefficients").at(key).get<double>();
    if (j.contains("box") && j.at("box").contains(key)) {
      const auto& b = j.at("box").at(key);
      xi.layout.box.emplace_back(b[0].get<double>(), b[1].get<double>());
    } else {
      xi.layout.box.push_back(default_box(key));
    }
  }
  return xi;
}

CalibrationVector ideal_xi(const ErrorModelSpec& spec) {
  CalibrationVector xi;
  xi.layout = coefficient_layout(spec);
  xi.values = rvec::Zero(xi.layout.size());
  xi.values(0) = 1.0;
  return xi;
}

CalibrationVector zeta_to_xi(const ErrorModelSpec& spec, const PhysicalParams& params) {
  PhysicalParams z = spec.mask_params(params);
  z.validate_and_normalize();
  CalibrationVector xi = ideal_xi(spec);
  for (int i = 1; i < xi.layout.size(); ++i) {
    const std::string& name = xi.layout.names[static_cast<size_t>(i)];
    double value = 0.0;
    if (name == "p0") value = z.p0;
    else if (name == "p1") value = z.p1;
    else if (name == "p_left") value = z.p_left;
    else if (name == "p_right") value = z.p_right;
    else if (name == "xi_or") value = z.xi_or;
    else if (name == "xi_ct") value = z.xi_l;
    else if (name == "xi_l") value = z.xi_l;
    else if (name == "xi_r") value = z.xi_r;
    else if (name == "xi_l_cos") value = z.xi_l * std::cos(z.phi_l);
    else if (name == "xi_l_sin") value = z.xi_l * std::sin(z.phi_l);
    else if (name == "xi_r_cos") value = z.xi_r * std::cos(z.phi_r);
    else if (name == "xi_r_sin") value = z.xi_r * std::sin(z.phi_r);
    else if (name == "xi_nnl_cos") value = z.xi_nnl * std::cos(z.phi_nnl);
    else if (name == "xi_nnl_sin") value = z.xi_nnl * std::sin(z.phi_nnl);
    else if (name == "xi_nnr_cos") value = z.xi_nnr * std::cos(z.phi_nnr);
    else if (name == "xi_nnr_sin") value = z.xi_nnr * std::sin(z.phi_nnr);
    else throw std::logic_error("zeta_to_xi: unmapped coefficient '" + name + "'");
    xi.values(i) = value;
  }
  return xi;
}

PhysicalParams xi_to_zeta(const ErrorModelSpec& spec, const CalibrationVector& xi) {
  PhysicalParams z;
  auto get = [&xi](const char* name, double fallback) {
    int index = xi.layout.index_of(name);
    return index >= 0 ? xi.values(index) : fallback;
  };
  z.p0 = get("p0", 0.0);
  z.p1 = get("p1", 0.0);
  z.p_left = get("p_left", 0.0);
  z.p_right = get("p_right", 0.0);
  z.xi_or = get("xi_or", 0.0);
  switch (spec.crosstalk_level()) {
    case 1:
      z.xi_l = z.xi_r = get("xi_ct", 0.0);
      break;
    case 2:
      z.xi_l = get("xi_l", 0.0);
      z.xi_r = get("xi_r", 0.0);
      break;
    case 3: {
      double lc = get("xi_l_cos", 0.0), ls = get("xi_l_sin", 0.0);
      double rc = get("xi_r_cos", 0.0), rs = get("xi_r_sin", 0.0);
      z.xi_l = std::hypot(lc, ls);
      z.phi_l = z.xi_l > 0.0 ? normalize_phase(std::atan2(ls, lc)) : 0.0;
      z.xi_r = std::hypot(rc, rs);
      z.phi_r = z.xi_r > 0.0 ? normalize_phase(std::atan2(rs, rc)) : 0.0;
      break;
    }
    default:
      break;
  }
  if (spec.has(ErrorKind::crosstalk_nnn)) {
    double lc = get("xi_nnl_cos", 0.0), ls = get("xi_nnl_sin", 0.0);
    double rc = get("xi_nnr_cos", 0.0), rs = get("xi_nnr_sin", 0.0);
    z.xi_nnl = std::hypot(lc, ls);
    z.phi_nnl = z.xi_nnl > 0.0 ? normalize_phase(std::atan2(ls, lc)) : 0.0;
    z.xi_nnr = std::hypot(rc, rs);
    z.phi_nnr = z.xi_nnr > 0.0 ? normalize_phase(std::atan2(rs, rc)) : 0.0;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Readout errors
// ---------------------------------------------------------------------------

namespace {

// Embed a 2x2 map at qubit position q (identities elsewhere).
rmat embed_single(const rmat& local, int q, int num_qubits) {
  rmat out = rmat::Identity(1, 1);
  for (int i = 0; i < num_qubits; ++i) {
    const rmat& factor = (i == q) ? local : rmat::Identity(2, 2);
    rmat next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) =
            out(r, c) * factor;
      }
    }
    out = std::move(next);
  }
  return out;
}

// Embed a 4x4 map at adjacent qubit positions (q, q+1).
rmat embed_pair(const rmat& local, int q, int num_qubits) {
  const int left_dim = 1 << q;
  const int right_dim = 1 << (num_qubits - q - 2);
  const int dim = 1 << num_qubits;
  rmat out = rmat::Zero(dim, dim);
  for (int l = 0; l < left_dim; ++l) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if (local(a, b) == 0.0) continue;
        for (int r = 0; r < right_dim; ++r) {
          int row = ((l * 4 + a) * right_dim) + r;
          int col = ((l * 4 + b) * right_dim) + r;
          out(row, col) += local(a, b);
        }
      }
    }
  }
  return out;
}

rmat spillover_pair_matrix(double p_left, double p_right) {
  // Column order (true outcome): 00, 01, 10, 11. A bright ion lights its
  // dark neighbor, never the reverse.
  rmat m = rmat::Identity(4, 4);
  m(1, 1) = 1.0 - p_left;
  m(3, 1) = p_left;
  m(2, 2) = 1.0 - p_right;
  m(3, 2) = p_right;
  return m;
}

}  // namespace

rmat readout_stochastic_exact(const PhysicalParams& params, int num_qubits) {
  PhysicalParams z = params;
  z.validate_and_normalize();
  const int dim = 1 << num_qubits;
  rmat flip(2, 2);
  flip << 1.0 - z.p0, z.p1, z.p0, 1.0 - z.p1;
  rmat total = embed_single(flip, 0, num_qubits);
  for (int q = 1; q < num_qubits; ++q) {
    total = embed_single(flip, q, num_qubits) * total;
  }
  rmat pair = spillover_pair_matrix(z.p_left, z.p_right);
  for (int q = 0; q + 1 < num_qubits; ++q) {
    total = embed_pair(pair, q, num_qubits) * total;
  }
  if (total.rows() != dim) throw std::logic_error("readout_stochastic_exact: size bug");
  return total;
}

rmat readout_stochastic_matrix(const ErrorModelSpec& spec, const PhysicalParams& params) {
  return readout_stochastic_exact(spec.mask_params(params), spec.n);
}

rmat readout_derivative(const std::string& coeff_name, int num_qubits) {
  const int dim = 1 << num_qubits;
  rmat out = rmat::Zero(dim, dim);
  if (coeff_name == "p0" || coeff_name == "p1") {
    rmat local = rmat::Zero(2, 2);
    if (coeff_name == "p0") {
      local(0, 0) = -1.0;
      local(1, 0) = 1.0;
    } else {
      local(0, 1) = 1.0;
      local(1, 1) = -1.0;
    }
    for (int q = 0; q < num_qubits; ++q) out += embed_single(local, q, num_qubits);
    return out;
  }
  if (coeff_name == "p_left" || coeff_name == "p_right") {
    rmat local = rmat::Zero(4, 4);
    if (coeff_name == "p_left") {
      local(1, 1) = -1.0;
      local(3, 1) = 1.0;
    } else {
      local(2, 2) = -1.0;
      local(3, 2) = 1.0;
    }
    for (int q = 0; q + 1 < num_qubits; ++q) out += embed_pair(local, q, num_qubits);
    return out;
  }
  throw std::invalid_argument("readout_derivative: '" + coeff_name +
                              "' is not a readout coefficient");
}

// ---------------------------------------------------------------------------
// Rotation errors
// ---------------------------------------------------------------------------

cmat equatorial_rotation(double beta, double theta) {
  cmat r(2, 2);
  const complexd i(0.0, 1.0);
  double c = std::cos(0.5 * theta);
  double s = std::sin(0.5 * theta);
  r(0, 0) = c;
  r(0, 1) = -i * s * std::exp(-i * beta);
  r(1, 0) = -i * s * std::exp(i * beta);
  r(1, 1) = c;
  return r;
}

namespace {

struct PulseAxis {
  double beta;  // rotation axis angle in the equatorial plane
  double sign;  // sign of the nominal pulse angle
};

// X bases are measured with R_y(-pi/2), Y bases with R_x(+pi/2).
std::optional<PulseAxis> target_pulse_axis(char letter) {
  if (letter == 'X') return PulseAxis{kPi / 2.0, -1.0};
  if (letter == 'Y') return PulseAxis{0.0, 1.0};
  return std::nullopt;
}

}  // namespace

std::vector<cmat> premeasure_qubit_unitaries(const PhysicalParams& params,
                                             const PauliString& p) {
  const int n = p.num_qubits();
  std::vector<cmat> factors(static_cast<size_t>(n), cmat::Identity(2, 2));
  // Pulses fire on qubits 1..n in ascending order; each pulse rotates its
  // target (with over-rotation) and leaks onto neighbors. Earlier pulses sit
  // rightmost in the operator product.
  for (int g = 0; g < n; ++g) {
    auto axis = target_pulse_axis(p.letter(g));
    if (!axis) continue;  // Z bases need no pulse and emit no crosstalk
    auto apply = [&](int q, double beta, double theta) {
      if (q < 0 || q >= n || theta == 0.0) return;
      factors[static_cast<size_t>(q)] =
          equatorial_rotation(beta, theta) * factors[static_cast<size_t>(q)];
    };
    apply(g, axis->beta, axis->sign * (kPi / 2.0 + params.xi_or * kPi));
    apply(g - 1, axis->beta + params.phi_l, axis->sign * params.xi_l * kPi / 2.0);
    apply(g + 1, axis->beta + params.phi_r, axis->sign * params.xi_r * kPi / 2.0);
    apply(g - 2, axis->beta + params.phi_nnl, axis->sign * params.xi_nnl * kPi / 2.0);
    apply(g + 2, axis->beta + params.phi_nnr, axis->sign * params.xi_nnr * kPi / 2.0);
  }
  return factors;
}

cmat premeasure_unitary(const PhysicalParams& params, const PauliString& p) {
  std::vector<cmat> factors = premeasure_qubit_unitaries(params, p);
  cmat u = factors[0];
  for (size_t q = 1; q < factors.size(); ++q) u = kron(u, factors[q]);
  return u;
}

std::vector<cmat> effective_qubit_observables(const PhysicalParams& params,
                                              const PauliString& p) {
  std::vector<cmat> factors = premeasure_qubit_unitaries(params, p);
  const cmat z = pauli_matrix('Z');
  std::vector<cmat> out;
  out.reserve(factors.size());
  for (const cmat& v : factors) out.push_back(v.adjoint() * z * v);
  return out;
}

std::vector<RotationCoefficient> rotation_coefficients(const ErrorModelSpec& spec) {
  std::vector<RotationCoefficient> out;
  CoefficientLayout layout = coefficient_layout(spec);
  for (int i = 1; i < layout.size(); ++i) {
    const std::string& name = layout.names[static_cast<size_t>(i)];
    if (is_readout_coefficient(name)) continue;
    std::function<PhysicalParams(double)> family;
    if (name == "xi_or") {
      family = [](double eps) { PhysicalParams z; z.xi_or = eps; return z; };
    } else if (name == "xi_ct") {
      family = [](double eps) { PhysicalParams z; z.xi_l = z.xi_r = eps; return z; };
    } else if (name == "xi_l") {
      family = [](double eps) { PhysicalParams z; z.xi_l = eps; return z; };
    } else if (name == "xi_r") {
      family = [](double eps) { PhysicalParams z; z.xi_r = eps; return z; };
    } else if (name == "xi_l_cos") {
      family = [](double eps) { PhysicalParams z; z.xi_l = eps; z.phi_l = 0.0; return z; };
    } else if (name == "xi_l_sin") {
      family = [](double eps) { PhysicalParams z; z.xi_l = eps; z.phi_l = kPi / 2.0; return z; };
    } else if (name == "xi_r_cos") {
      family = [](double eps) { PhysicalParams z; z.xi_r = eps; z.phi_r = 0.0; return z; };
    } else if (name == "xi_r_sin") {
      family = [](double eps) { PhysicalParams z; z.xi_r = eps; z.phi_r = kPi / 2.0; return z; };
    } else if (name == "xi_nnl_cos") {
      family = [](double eps) { PhysicalParams z; z.xi_nnl = eps; z.phi_nnl = 0.0; return z; };
    } else if (name == "xi_nnl_sin") {
      family = [](double eps) { PhysicalParams z; z.xi_nnl = eps; z.phi_nnl = kPi / 2.0; return z; };
    } else if (name == "xi_nnr_cos") {
      family = [](double eps) { PhysicalParams z; z.xi_nnr = eps; z.phi_nnr = 0.0; return z; };
    } else if (name == "xi_nnr_sin") {
      family = [](double eps) { PhysicalParams z; z.xi_nnr = eps; z.phi_nnr = kPi / 2.0; return z; };
    } else {
      throw std::logic_error("rotation_coefficients: unmapped coefficient '" + name + "'");
    }
    out.push_back(RotationCoefficient{name, std::move(family)});
  }
  return out;
}

std::vector<cmat> qubit_observable_derivatives(const RotationCoefficient& coeff,
                                               const PauliString& p) {
  const double h = kRotationFdStep;
  std::vector<cmat> plus = effective_qubit_observables(coeff.at(h), p);
  std::vector<cmat> minus = effective_qubit_observables(coeff.at(-h), p);
  std::vector<cmat> out;
  out.reserve(plus.size());
  for (size_t q = 0; q < plus.size(); ++q) {
    out.push_back(hermitize((plus[q] - minus[q]) / (2.0 * h)));
  }
  return out;
}

BasisExpansion basis_rotation_expansion(const ErrorModelSpec& spec, const PauliString& p) {
  if (p.num_qubits() != spec.n) {
    throw std::invalid_argument("basis_rotation_expansion: qubit count mismatch");
  }
  BasisExpansion expansion;
  expansion.ideal.reserve(static_cast<size_t>(spec.n));
  for (int q = 0; q < spec.n; ++q) expansion.ideal.push_back(pauli_matrix(p.letter(q)));
  for (const RotationCoefficient& coeff : rotation_coefficients(spec)) {
    expansion.coefficient_names.push_back(coeff.name);
    expansion.derivatives.push_back(qubit_observable_derivatives(coeff, p));
  }
  return expansion;
}

std::vector<std::pair<std::string, cmat>> rotation_error_transform(
    const ErrorModelSpec& spec, const PauliString& p) {
  BasisExpansion expansion = basis_rotation_expansion(spec, p);
  std::vector<std::pair<std::string, cmat>> out;
  out.emplace_back("ideal", pauli_operator(p));
  for (size_t c = 0; c < expansion.coefficient_names.size(); ++c) {
    const int dim = dim_of(spec.n);
    cmat term = cmat::Zero(dim, dim);
    for (int q = 0; q < spec.n; ++q) {
      cmat contribution = (q == 0) ? expansion.derivatives[c][0] : expansion.ideal[0];
      for (int j = 1; j < spec.n; ++j) {
        const cmat& factor =
            (j == q) ? expansion.derivatives[c][static_cast<size_t>(j)]
                     : expansion.ideal[static_cast<size_t>(j)];
        contribution = kron(contribution, factor);
      }
      term += contribution;
    }
    out.emplace_back(expansion.coefficient_names[c], std::move(term));
  }
  return out;
}

}  // namespace blindcal
