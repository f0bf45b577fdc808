// Copyright 2026 The libimc Authors
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

#include "imc/finite.hpp"

#include <cmath>
#include <string>

#include "imc/errors.hpp"
#include "imc/rng.hpp"

namespace imc {

Eigen::VectorXd FiniteChainSpec::rho_accept() const {
  return Eigen::VectorXd::Ones(m) - R_tilde.col(0);
}

Eigen::VectorXd FiniteChainSpec::unit_weights() const {
  return pi.array() / pi_tilde.array();
}

void FiniteChainSpec::validate() const {
  if (m < 1 || Q.rows() != m || Q.cols() != m || pi.size() != m || pi_tilde.size() != m ||
      R_tilde.rows() != m || R_tilde.cols() != n_max + 1) {
    fail(errc::invalid_argument, "FiniteChainSpec has inconsistent dimensions");
  }
  if (static_cast<long>(m) * (n_max + 1) > 2000) {
    fail(errc::invalid_argument, "augmented state space exceeds the dense cap of 2000");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    fail(errc::invalid_argument, "kappa must be a positive finite real");
  }
  if ((Q.array() < 0.0).any() || (R_tilde.array() < 0.0).any() || (pi.array() < 0.0).any() ||
      (pi_tilde.array() < 0.0).any()) {
    fail(errc::invalid_argument, "negative entry in Q, R_tilde, pi or pi_tilde");
  }
  if (std::abs(pi.sum() - 1.0) > 1e-12 || std::abs(pi_tilde.sum() - 1.0) > 1e-12) {
    fail(errc::invalid_argument, "pi and pi_tilde must sum to 1");
  }
  for (int i = 0; i < m; ++i) {
    if (std::abs(Q.row(i).sum() - 1.0) > 1e-12) {
      fail(errc::invalid_argument, "Q row " + std::to_string(i) + " does not sum to 1");
    }
    if (std::abs(R_tilde.row(i).sum() - 1.0) > 1e-12) {
      fail(errc::invalid_argument, "R_tilde row " + std::to_string(i) + " does not sum to 1");
    }
    if (pi[i] > 0.0 && pi_tilde[i] == 0.0) {
      fail(errc::domination_violation,
           "pi is not dominated by pi_tilde at state " + std::to_string(i));
    }
  }
  // H1: pi_tilde is stationary for Q
  const Eigen::VectorXd stat_err = (pi_tilde.transpose() * Q).transpose() - pi_tilde;
  if (stat_err.lpNorm<Eigen::Infinity>() > 1e-10) {
    fail(errc::invalid_argument, "pi_tilde is not stationary for Q");
  }
  // replication rows must have mean kappa * pi / pi_tilde
  for (int i = 0; i < m; ++i) {
    double mean = 0.0;
    for (int n = 0; n <= n_max; ++n) mean += n * R_tilde(i, n);
    const double want = pi_tilde[i] > 0.0 ? kappa * pi[i] / pi_tilde[i] : 0.0;
    if (std::abs(mean - want) > 1e-10) {
      fail(errc::invalid_argument,
           "R_tilde row " + std::to_string(i) + " has mean " + std::to_string(mean) +
               ", expected " + std::to_string(want));
    }
  }
}

Eigen::MatrixXd metropolized_walk_matrix(const Eigen::VectorXd& pi_tilde) {
  const int m = static_cast<int>(pi_tilde.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  if (m == 1) {
    Q(0, 0) = 1.0;
    return Q;
  }
  // Lazy walk (hold with probability 1/2): the spectrum stays nonnegative,
  // so TV curves decay monotonically and the geometric regime is long enough
  // to measure before the floating-point noise floor.
  for (int i = 0; i < m; ++i) {
    double stay = 0.5;
    for (const int j : {i - 1, i + 1}) {
      if (j < 0 || j >= m) {
        stay += 0.25;  // off-grid proposal, rejected
        continue;
      }
      const double acc = std::min(1.0, pi_tilde[j] / pi_tilde[i]);
      Q(i, j) = 0.25 * acc;
      stay += 0.25 * (1.0 - acc);
    }
    Q(i, i) += stay;
  }
  return Q;
}

namespace {

FiniteChainSpec build_spec(int m, int n_max, std::uint64_t seed, double kappa_arg,
                           bool kappa_given) {
  if (m < 2) fail(errc::invalid_argument, "make_random_spec requires m >= 2");
  if (n_max < 1) fail(errc::invalid_argument, "make_random_spec requires n_max >= 1");

  RandomSource rng(seed, 0x46494e49u);  // dedicated generator stream
  FiniteChainSpec spec;
  spec.m = m;
  spec.n_max = n_max;

  // Entries in [0.5, 1] before normalization keep the weight ratios within a
  // factor of 4, so no state is nearly inaccessible for the rejection kernel.
  Eigen::VectorXd p(m), q(m);
  for (int i = 0; i < m; ++i) p[i] = 0.5 + 0.5 * rng.uniform();
  for (int i = 0; i < m; ++i) q[i] = 0.5 + 0.5 * rng.uniform();
  spec.pi = p / p.sum();
  spec.pi_tilde = q / q.sum();
  spec.Q = metropolized_walk_matrix(spec.pi_tilde);

  const Eigen::VectorXd ratios = spec.pi.array() / spec.pi_tilde.array();
  const double max_ratio = ratios.maxCoeff();
  if (kappa_given) {
    spec.kappa = kappa_arg;
  } else {
    const double kappa_cap = n_max / max_ratio;
    spec.kappa = kappa_cap * (0.35 + 0.6 * rng.uniform());
  }
  if (std::ceil(spec.kappa * max_ratio) > n_max + 1e-12) {
    fail(errc::support_too_small, "n_max = " + std::to_string(n_max) +
                                      " cannot hold counts for max rho_kappa = " +
                                      std::to_string(spec.kappa * max_ratio));
  }

  spec.R_tilde = Eigen::MatrixXd::Zero(m, n_max + 1);
  for (int i = 0; i < m; ++i) {
    const double rho = spec.kappa * ratios[i];
    const auto fl = static_cast<int>(std::floor(rho));
    const double frac = rho - fl;
    spec.R_tilde(i, fl) += 1.0 - frac;
    if (frac > 0.0) spec.R_tilde(i, fl + 1) += frac;
  }

  spec.validate();
  return spec;
}

}  // namespace

FiniteChainSpec make_random_spec(int m, int n_max, std::uint64_t seed) {
  return build_spec(m, n_max, seed, 0.0, false);
}

FiniteChainSpec make_random_spec(int m, int n_max, std::uint64_t seed, double kappa) {
  return build_spec(m, n_max, seed, kappa, true);
}

FiniteChainSpec make_reducible_spec() {
  FiniteChainSpec spec;
  spec.m = 2;
  spec.n_max = 1;
  spec.kappa = 1.0;
  spec.Q = Eigen::MatrixXd::Identity(2, 2);
  spec.pi = Eigen::VectorXd::Constant(2, 0.5);
  spec.pi_tilde = Eigen::VectorXd::Constant(2, 0.5);
  spec.R_tilde = Eigen::MatrixXd::Zero(2, 2);
  spec.R_tilde.col(1).setOnes();  // always exactly one replica
  spec.validate();
  return spec;
}

}  // namespace imc
