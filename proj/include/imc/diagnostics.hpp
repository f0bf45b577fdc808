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

#ifndef IMC_DIAGNOSTICS_HPP
#define IMC_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "imc/finite.hpp"
#include "imc/rng.hpp"

namespace imc {

/// (sum c_i)^2 / sum c_i^2 — the replication-discretized effective sample
/// size. Converges to ess_is as kappa grows.
double ess_kappa(std::span<const long long> counts);

/// (sum w_i)^2 / sum w_i^2 — the usual importance-sampling ESS.
double ess_is(std::span<const double> weights);

struct DiagnosticsReport {
  double ess_kappa = 0.0;
  double ess_is = 0.0;
  long long chain_length = 0;
  double kappa = 0.0;
  std::map<std::string, double> extra;
};

struct KappaScanRow {
  double kappa = 0.0;
  double ess_kappa = 0.0;
  long long chain_length = 0;
};

/// Redraws counts with the variance-optimal law at kappa * w_i for each kappa
/// in the grid, holding the instrumental chain (the weights) fixed. Cheap, so
/// the whole grid can be scanned from a single run.
std::vector<KappaScanRow> kappa_scan(std::span<const double> weights,
                                     std::span<const double> kappas, RandomSource& rng);

struct PoissonInfo {
  double rcond = 0.0;
  double residual = 0.0;
};

/// Solves (I - Q) H = f with pi~' H = 0 through the fundamental-matrix
/// augmentation (I - Q + 1 pi~') H = f. Requires pi~' f = 0 (mean_not_zero
/// otherwise) and a spectral gap of at least 1e-6 (singular_system otherwise).
Eigen::VectorXd poisson_solve(const FiniteChainSpec& spec, const Eigen::VectorXd& f,
                              PoissonInfo* info = nullptr);

struct CltVarianceReport {
  double sigma2_total = 0.0;
  double sigma2_instrumental = 0.0;  // kappa * sigma~^2(rho h0)
  double sigma2_replication = 0.0;   // kappa^{-1} * sigma^^2(h0, kappa)
};

/// Plug-in asymptotic variance of the augmented chain for test function h:
/// sigma~^2 comes from the Poisson solve for rho h0, the replication part
/// from the variance-optimal law's closed form frac(rho_kappa)(1-frac) at
/// each state. The total is the exact sum of the two parts by construction.
CltVarianceReport clt_variance_plugin(const FiniteChainSpec& spec, const Eigen::VectorXd& h,
                                      double kappa);

/// kappa = sqrt(pi~(h0^2) / sigma~^2(rho h0)) / 2, the minimizer of the
/// variance upper bound under the optimal law.
double kappa_opt(const FiniteChainSpec& spec, const Eigen::VectorXd& h);

/// Mean squared error of an estimator over independent replications, one
/// RandomSource stream per replication.
double empirical_mse(const std::function<double(RandomSource&)>& estimate, double true_value,
                     int replications, std::uint64_t seed, int threads = 1);

/// Empirical variance of sqrt(n) * (mean over n augmented-chain states - pi(h))
/// over independent replications; the Monte Carlo side of the CLT check.
double empirical_clt_variance(const FiniteChainSpec& spec, const Eigen::VectorXd& h, double kappa,
                              long long n, int replications, std::uint64_t seed, int threads = 1);

/// Batch-means long-run variance of a scalar series. Sanity output only; this
/// is a dependence-aware alternative, not the bulk-ESS metric.
double batch_means_variance(std::span<const double> series, int n_batches = 20);

}  // namespace imc

#endif
