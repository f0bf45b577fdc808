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

#include "imc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imc/errors.hpp"

namespace imc {

Eigen::MatrixXd s_matrix(const FiniteChainSpec& spec) {
  const Eigen::VectorXd rho = spec.rho_accept();
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(spec.m, spec.m) - spec.Q * (1.0 - rho.array()).matrix().asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    fail(errc::singular_system,
         "rejection kernel is not well-defined: I - Q D(1-rho) is singular "
         "(an absorbing class never accepts)");
  }
  return lu.solve(spec.Q * rho.asDiagonal());
}

Eigen::MatrixXd p_matrix(const FiniteChainSpec& spec) {
  const Eigen::MatrixXd S = s_matrix(spec);
  const Eigen::VectorXd rho = spec.rho_accept();
  const int width = spec.n_max + 1;
  const int dim = spec.m * width;

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dim, dim);
  for (int x = 0; x < spec.m; ++x) {
    // countdown branch
    for (int n = 1; n <= spec.n_max; ++n) {
      P(augmented_index(spec, x, n), augmented_index(spec, x, n - 1)) = 1.0;
    }
    // regeneration branch through S then R
    const int row = augmented_index(spec, x, 0);
    for (int xp = 0; xp < spec.m; ++xp) {
      const double s = S(x, xp);
      if (s == 0.0) continue;
      if (rho[xp] <= 0.0) {
        fail(errc::zero_acceptance, "S reaches state " + std::to_string(xp) +
                                        " whose acceptance probability is zero; R is undefined");
      }
      for (int np = 0; np + 1 <= spec.n_max; ++np) {
        const double r = spec.R_tilde(xp, np + 1) / rho[xp];
        if (r != 0.0) P(row, augmented_index(spec, xp, np)) += s * r;
      }
    }
  }
  return P;
}

Eigen::VectorXd bar_pi_closed_form(const FiniteChainSpec& spec) {
  const int width = spec.n_max + 1;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.m * width);
  for (int x = 0; x < spec.m; ++x) {
    double tail = 0.0;  // R_tilde(x, [k+1 : n_max]) accumulated from the top
    for (int k = spec.n_max; k >= 0; --k) {
      if (k + 1 <= spec.n_max) tail += spec.R_tilde(x, k + 1);
      v[augmented_index(spec, x, k)] = spec.pi_tilde[x] * tail / spec.kappa;
    }
  }
  return v;
}

Eigen::VectorXd first_marginal(const FiniteChainSpec& spec, const Eigen::VectorXd& bar_pi) {
  const int width = spec.n_max + 1;
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(spec.m);
  for (int x = 0; x < spec.m; ++x) {
    for (int n = 0; n < width; ++n) marg[x] += bar_pi[augmented_index(spec, x, n)];
  }
  return marg;
}

StationaryResult stationary(const Eigen::MatrixXd& P) {
  const auto dim = P.rows();
  if (dim != P.cols() || dim < 1) fail(errc::invalid_argument, "P must be square");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::abs(P.row(i).sum() - 1.0) > 1e-10) {
      fail(errc::invalid_argument, "P row " + std::to_string(i) + " does not sum to 1");
    }
  }

  StationaryResult result;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim));
  const Eigen::MatrixXd Pt = P.transpose();
  constexpr long kMaxIterations = 1000000;
  constexpr double kTol = 1e-13;
  long it = 0;
  for (; it < kMaxIterations; ++it) {
    Eigen::VectorXd next = Pt * v;
    next /= next.sum();
    const double res = (next - v).lpNorm<1>();
    v = next;
    if (res < kTol) break;
  }
  if (it == kMaxIterations) {
    fail(errc::non_convergence,
         "power iteration did not reach residual 1e-13 (periodic or nearly reducible kernel)");
  }

  // A simple unit eigenvalue is what makes the answer meaningful; verify it.
  Eigen::EigenSolver<Eigen::MatrixXd> es(P, /*computeEigenvectors=*/false);
  std::vector<double> moduli(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) moduli[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  result.second_eigenvalue_modulus = dim > 1 ? moduli[1] : 0.0;
  if (dim > 1 && result.second_eigenvalue_modulus >= 1.0 - 1e-8) {
    fail(errc::non_convergence,
         "unit eigenvalue is not simple (second modulus " +
             std::to_string(result.second_eigenvalue_modulus) +
             "): the stationary distribution is not unique");
  }

  result.distribution = v;
  result.residual = ((Pt * v) - v).lpNorm<1>();
  result.iterations = it + 1;
  return result;
}

std::vector<double> tv_decay(const Eigen::MatrixXd& P, const Eigen::VectorXd& xi0,
                             const Eigen::VectorXd& bar_pi, int K) {
  if (xi0.size() != P.rows() || bar_pi.size() != P.rows()) {
    fail(errc::dimension_mismatch, "tv_decay: distribution sizes disagree with P");
  }
  if (K < 1) fail(errc::invalid_argument, "K must be >= 1");
  const Eigen::MatrixXd Pt = P.transpose();
  Eigen::VectorXd xi = xi0;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    xi = Pt * xi;
    out.push_back(0.5 * (xi - bar_pi).lpNorm<1>());
  }
  return out;
}

}  // namespace imc
