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

#ifndef IMC_ORACLE_HPP
#define IMC_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "imc/finite.hpp"

namespace imc {

/// Flat index of the augmented state (x, n), n = 0..n_max.
inline int augmented_index(const FiniteChainSpec& spec, int x, int n) {
  return x * (spec.n_max + 1) + n;
}

/// Rejection kernel as a matrix: the linear solve
///   S = (I - Q D_{1-rho})^{-1} Q D_rho
/// of the first-accepted-candidate recursion, exact to machine precision.
Eigen::MatrixXd s_matrix(const FiniteChainSpec& spec);

/// Augmented kernel on (x, n): rows with n >= 1 shift deterministically to
/// (x, n-1); rows with n = 0 move through S and draw the residual count from
/// R(x', n') = R_tilde(x', n'+1) / rho(x').
Eigen::MatrixXd p_matrix(const FiniteChainSpec& spec);

/// Closed-form invariant vector bar_pi(x, k) = kappa^{-1} pi~(x) R_tilde(x, [k+1:inf)).
Eigen::VectorXd bar_pi_closed_form(const FiniteChainSpec& spec);

/// Row-marginal sum_n bar_pi(x, n) of a vector over augmented states.
Eigen::VectorXd first_marginal(const FiniteChainSpec& spec, const Eigen::VectorXd& bar_pi);

struct StationaryResult {
  Eigen::VectorXd distribution;
  double residual = 0.0;
  long iterations = 0;
  double second_eigenvalue_modulus = 0.0;
};

/// Left unit eigenvector by power iteration to l1 residual < 1e-13. Throws
/// non_convergence when the cap is hit or when the unit eigenvalue is not
/// simple (second modulus >= 1 - 1e-8), so reducible or periodic inputs fail
/// loudly instead of returning an arbitrary vector.
StationaryResult stationary(const Eigen::MatrixXd& P);

/// d_TV(xi0 P^k, bar_pi) for k = 1..K.
std::vector<double> tv_decay(const Eigen::MatrixXd& P, const Eigen::VectorXd& xi0,
                             const Eigen::VectorXd& bar_pi, int K);

}  // namespace imc

#endif
