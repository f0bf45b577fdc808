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

#ifndef IMC_FINITE_HPP
#define IMC_FINITE_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace imc {

/// Explicit finite-state instance feeding the exact oracle: m states, a
/// row-stochastic instrumental kernel Q with stationary distribution pi_tilde,
/// a target pi dominated by pi_tilde, and replication rows R_tilde(x, n) for
/// n = 0..n_max with mean kappa * pi(x) / pi_tilde(x).
struct FiniteChainSpec {
  int m = 0;
  int n_max = 0;
  double kappa = 1.0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd pi;
  Eigen::VectorXd pi_tilde;
  Eigen::MatrixXd R_tilde;  // m x (n_max + 1)

  /// Acceptance probabilities rho(x) = R_tilde(x, [1:inf)) = 1 - R_tilde(x, 0).
  Eigen::VectorXd rho_accept() const;

  /// Unit weights pi(x) / pi_tilde(x).
  Eigen::VectorXd unit_weights() const;

  /// Throws on any violated invariant (stochasticity, stationarity of
  /// pi_tilde, replication means, domination, size cap m*(n_max+1) <= 2000).
  void validate() const;
};

/// Metropolized +-1 random walk on {0..m-1} targeting pi_tilde; out-of-range
/// proposals are rejected in place, which keeps the chain aperiodic.
Eigen::MatrixXd metropolized_walk_matrix(const Eigen::VectorXd& pi_tilde);

/// Random spec honoring all invariants: full-support pi and pi_tilde with
/// bounded ratios, Q from metropolized_walk_matrix, R_tilde rows equal to the
/// variance-optimal law's pmf at kappa * pi/pi_tilde. When kappa is not given
/// it is drawn so that max rho_kappa stays below n_max; an explicit kappa that
/// needs counts beyond n_max raises support_too_small.
FiniteChainSpec make_random_spec(int m, int n_max, std::uint64_t seed);
FiniteChainSpec make_random_spec(int m, int n_max, std::uint64_t seed, double kappa);

/// Two-state identity chain: valid per the invariants but reducible, so the
/// augmented kernel has no unique stationary distribution. Used as the
/// uniqueness-failure probe.
FiniteChainSpec make_reducible_spec();

}  // namespace imc

#endif
