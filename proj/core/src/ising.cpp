// Copyright 2026 The qbmrl Authors.
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

#include "qbmrl/ising.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qbmrl/error.hpp"

namespace qbmrl {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw ParameterError(std::string(what) + " must be finite");
  }
}

bool pair_less(const Coupling& c, std::size_t i, std::size_t j) {
  return c.i < i || (c.i == i && c.j < j);
}

}  // namespace

IsingModel::IsingModel(std::size_t n_spins, double transverse_field)
    : biases_(n_spins, 0.0) {
  set_transverse_field(transverse_field);
}

IsingModel::IsingModel(std::vector<double> biases,
                       std::vector<Coupling> couplings,
                       double transverse_field)
    : biases_(std::move(biases)), couplings_(std::move(couplings)) {
  for (double b : biases_) require_finite(b, "bias");
  for (auto& c : couplings_) {
    if (c.i == c.j) throw DimensionError("self-coupling is not allowed");
    if (c.i >= biases_.size() || c.j >= biases_.size()) {
      throw DimensionError("coupling index out of range");
    }
    require_finite(c.value, "coupling");
    if (c.i > c.j) std::swap(c.i, c.j);
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) {
              return pair_less(a, b.i, b.j);
            });
  auto dup = std::adjacent_find(
      couplings_.begin(), couplings_.end(),
      [](const Coupling& a, const Coupling& b) {
        return a.i == b.i && a.j == b.j;
      });
  if (dup != couplings_.end()) {
    throw DimensionError("coupling pair listed twice");
  }
  set_transverse_field(transverse_field);
}

double IsingModel::bias(std::size_t i) const {
  if (i >= biases_.size()) throw DimensionError("bias index out of range");
  return biases_[i];
}

void IsingModel::set_bias(std::size_t i, double value) {
  if (i >= biases_.size()) throw DimensionError("bias index out of range");
  require_finite(value, "bias");
  biases_[i] = value;
}

std::vector<Coupling>::iterator IsingModel::find_slot(std::size_t i,
                                                      std::size_t j) {
  if (i == j) throw DimensionError("self-coupling is not allowed");
  if (i >= biases_.size() || j >= biases_.size()) {
    throw DimensionError("coupling index out of range");
  }
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(
      couplings_.begin(), couplings_.end(), std::make_pair(i, j),
      [](const Coupling& c, const std::pair<std::size_t, std::size_t>& key) {
        return pair_less(c, key.first, key.second);
      });
  if (it == couplings_.end() || it->i != i || it->j != j) {
    it = couplings_.insert(it, Coupling{i, j, 0.0});
  }
  return it;
}

double IsingModel::coupling(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(
      couplings_.begin(), couplings_.end(), std::make_pair(i, j),
      [](const Coupling& c, const std::pair<std::size_t, std::size_t>& key) {
        return pair_less(c, key.first, key.second);
      });
  if (it == couplings_.end() || it->i != i || it->j != j) return 0.0;
  return it->value;
}

void IsingModel::set_coupling(std::size_t i, std::size_t j, double value) {
  require_finite(value, "coupling");
  find_slot(i, j)->value = value;
}

void IsingModel::add_coupling(std::size_t i, std::size_t j, double value) {
  require_finite(value, "coupling");
  auto it = find_slot(i, j);
  it->value += value;
  require_finite(it->value, "coupling");
}

void IsingModel::set_transverse_field(double gamma) {
  require_finite(gamma, "transverse field");
  if (gamma < 0.0) throw ParameterError("transverse field must be >= 0");
  transverse_field_ = gamma;
}

SpinConfiguration::SpinConfiguration(std::vector<std::int8_t> spins)
    : spins_(std::move(spins)) {
  for (auto s : spins_) {
    if (s != 1 && s != -1) {
      throw EncodingError("spin values must be -1 or +1");
    }
  }
}

SpinConfiguration SpinConfiguration::uniform(std::size_t n,
                                             std::int8_t value) {
  return SpinConfiguration(std::vector<std::int8_t>(n, value));
}

SpinConfiguration SpinConfiguration::negated() const {
  SpinConfiguration out = *this;
  for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
  return out;
}

double classical_energy(const IsingModel& model,
                        const SpinConfiguration& config) {
  if (config.size() != model.n_spins()) {
    throw DimensionError("configuration length " +
                         std::to_string(config.size()) +
                         " does not match model size " +
                         std::to_string(model.n_spins()));
  }
  double coupling_sum = 0.0;
  for (const auto& c : model.couplings()) {
    coupling_sum += c.value * config[c.i] * config[c.j];
  }
  double bias_sum = 0.0;
  const auto biases = model.biases();
  for (std::size_t i = 0; i < biases.size(); ++i) {
    bias_sum += biases[i] * config[i];
  }
  return -coupling_sum - bias_sum;
}

double trotter_coupling(double gamma, double beta, std::size_t n_replicas) {
  if (!(gamma > 0.0) || !(beta > 0.0) || !std::isfinite(gamma) ||
      !std::isfinite(beta)) {
    throw ParameterError("trotter coupling needs gamma > 0 and beta > 0");
  }
  if (n_replicas == 0) throw ParameterError("n_replicas must be positive");
  const double x = gamma * beta / static_cast<double>(n_replicas);
  // ln coth x = ln(1 + e^{-2x}) - ln(1 - e^{-2x}), stable for large x.
  const double t = std::exp(-2.0 * x);
  const double log_coth = std::log1p(t) - std::log1p(-t);
  return log_coth / (2.0 * beta);
}

double trotter_log_normalization(std::size_t n_spins, double gamma,
                                 double beta, std::size_t n_replicas) {
  if (!(gamma > 0.0) || !(beta > 0.0)) {
    throw ParameterError("trotter normalisation needs gamma > 0 and beta > 0");
  }
  if (n_replicas == 0) throw ParameterError("n_replicas must be positive");
  const double r = static_cast<double>(n_replicas);
  const double x = 2.0 * beta * gamma / r;
  return 0.5 * static_cast<double>(n_spins) * r * std::log(0.5 * std::sinh(x));
}

IsingModel build_effective_model(const IsingModel& model, double gamma,
                                 double beta, std::size_t n_replicas) {
  if (n_replicas < 2) throw ParameterError("n_replicas must be >= 2");
  const double j_plus = trotter_coupling(gamma, beta, n_replicas);
  const std::size_t n = model.n_spins();
  const double r = static_cast<double>(n_replicas);

  std::vector<double> biases(n * n_replicas);
  std::vector<Coupling> couplings;
  couplings.reserve(n_replicas * (model.n_couplings() + n));
  for (std::size_t k = 0; k < n_replicas; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      biases[extended_index(i, k, n)] = model.biases()[i] / r;
    }
    for (const auto& c : model.couplings()) {
      couplings.push_back(Coupling{extended_index(c.i, k, n),
                                   extended_index(c.j, k, n), c.value / r});
    }
  }
  if (n_replicas == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      couplings.push_back(Coupling{extended_index(i, 0, n),
                                   extended_index(i, 1, n), 2.0 * j_plus});
    }
  } else {
    for (std::size_t k = 0; k < n_replicas; ++k) {
      const std::size_t next = (k + 1) % n_replicas;
      for (std::size_t i = 0; i < n; ++i) {
        couplings.push_back(Coupling{extended_index(i, k, n),
                                     extended_index(i, next, n), j_plus});
      }
    }
  }
  return IsingModel(std::move(biases), std::move(couplings), 0.0);
}

double effective_energy(const IsingModel& extended_model,
                        const SpinConfiguration& config) {
  return classical_energy(extended_model, config);
}

TransverseFieldThermal exact_transverse_field_thermal(const IsingModel& model,
                                                      double beta) {
  const std::size_t n = model.n_spins();
  if (n > kMaxDenseSpins) {
    throw CapacityError("dense transverse-field oracle is capped at " +
                        std::to_string(kMaxDenseSpins) + " spins");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  const std::size_t dim = std::size_t{1} << n;
  const double gamma = model.transverse_field();

  // Basis state b: bit i set means sigma^z_i = +1.
  auto spin_of = [](std::size_t b, std::size_t i) {
    return ((b >> i) & 1U) != 0U ? 1.0 : -1.0;
  };

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    double e = 0.0;
    for (const auto& c : model.couplings()) {
      e -= c.value * spin_of(b, c.i) * spin_of(b, c.j);
    }
    for (std::size_t i = 0; i < n; ++i) e -= model.biases()[i] * spin_of(b, i);
    const auto bi = static_cast<Eigen::Index>(b);
    h(bi, bi) = e;
    if (gamma != 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        h(bi, static_cast<Eigen::Index>(b ^ (std::size_t{1} << i))) = -gamma;
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::MatrixXd& psi = solver.eigenvectors();
  const double lambda_min = lambda.minCoeff();

  Eigen::VectorXd weight(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    weight(k) = std::exp(-beta * (lambda(k) - lambda_min));
  }
  const double z_shifted = weight.sum();
  weight /= z_shifted;

  TransverseFieldThermal out;
  out.free_energy = lambda_min - std::log(z_shifted) / beta;
  out.z_mean.assign(n, 0.0);
  out.zz_mean.assign(n * n, 0.0);

  // Diagonal of rho in the computational basis.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    diag += weight(k) * psi.col(k).cwiseAbs2();
  }
  for (std::size_t b = 0; b < dim; ++b) {
    const double p = diag(static_cast<Eigen::Index>(b));
    for (std::size_t i = 0; i < n; ++i) {
      const double si = spin_of(b, i);
      out.z_mean[i] += p * si;
      for (std::size_t j = 0; j < n; ++j) {
        out.zz_mean[i * n + j] += p * si * spin_of(b, j);
      }
    }
  }
  return out;
}

}  // namespace qbmrl
