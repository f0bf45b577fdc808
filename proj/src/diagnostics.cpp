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

#include "imc/diagnostics.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "imc/engine.hpp"
#include "imc/errors.hpp"
#include "imc/kernels.hpp"
#include "imc/model.hpp"
#include "imc/replication.hpp"
#include "parallel.hpp"

namespace imc {

double ess_kappa(std::span<const long long> counts) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const long long c : counts) {
    const auto cd = static_cast<double>(c);
    sum += cd;
    sum_sq += cd * cd;
  }
  if (!(sum > 0.0)) fail(errc::empty_chain, "ess_kappa needs at least one positive count");
  return sum * sum / sum_sq;
}

double ess_is(std::span<const double> weights) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  if (!(sum > 0.0)) fail(errc::all_zero_weights, "ess_is needs at least one positive weight");
  return sum * sum / sum_sq;
}

std::vector<KappaScanRow> kappa_scan(std::span<const double> weights,
                                     std::span<const double> kappas, RandomSource& rng) {
  double total = 0.0;
  for (const double w : weights) total += w;
  if (!(total > 0.0)) fail(errc::all_zero_weights, "kappa scan needs positive weights");

  const OptimalLaw law;
  std::vector<KappaScanRow> rows;
  rows.reserve(kappas.size());
  std::vector<long long> counts(weights.size());
  for (const double kappa : kappas) {
    if (!(kappa > 0.0)) fail(errc::invalid_argument, "scan kappas must be positive");
    for (std::size_t i = 0; i < weights.size(); ++i) counts[i] = law.draw(kappa * weights[i], rng);
    KappaScanRow row;
    row.kappa = kappa;
    row.chain_length = 0;
    for (const long long c : counts) row.chain_length += c;
    row.ess_kappa = row.chain_length > 0 ? ess_kappa(counts) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

Eigen::VectorXd poisson_solve(const FiniteChainSpec& spec, const Eigen::VectorXd& f,
                              PoissonInfo* info) {
  if (f.size() != spec.m) fail(errc::dimension_mismatch, "f must have one entry per state");
  const double mean = spec.pi_tilde.dot(f);
  if (std::abs(mean) > 1e-10) {
    fail(errc::mean_not_zero,
         "pi_tilde' f = " + std::to_string(mean) + "; subtract the mean before solving");
  }

  // Refuse nearly-reducible chains: the fundamental matrix blows up with the gap.
  Eigen::EigenSolver<Eigen::MatrixXd> es(spec.Q, /*computeEigenvectors=*/false);
  double second = 0.0;
  double largest = 0.0;
  for (Eigen::Index i = 0; i < spec.m; ++i) {
    const double mod = std::abs(es.eigenvalues()[i]);
    if (mod > largest) {
      second = largest;
      largest = mod;
    } else if (mod > second) {
      second = mod;
    }
  }
  if (spec.m > 1 && second >= 1.0 - 1e-6) {
    fail(errc::singular_system, "Q has spectral gap below 1e-6 (reducible or nearly so)");
  }

  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(spec.m, spec.m) - spec.Q +
                            Eigen::VectorXd::Ones(spec.m) * spec.pi_tilde.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    fail(errc::singular_system, "fundamental-matrix system is singular (Q reducible)");
  }
  Eigen::VectorXd H = lu.solve(f);
  H.array() -= spec.pi_tilde.dot(H);  // pin the pi~-mean-zero representative

  if (info) {
    // crude reciprocal condition estimate from the LU factors
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    info->rcond = diag.minCoeff() / diag.maxCoeff();
    info->residual =
        ((Eigen::MatrixXd::Identity(spec.m, spec.m) - spec.Q) * H - f).lpNorm<Eigen::Infinity>();
  }
  return H;
}

CltVarianceReport clt_variance_plugin(const FiniteChainSpec& spec, const Eigen::VectorXd& h,
                                      double kappa) {
  if (h.size() != spec.m) fail(errc::dimension_mismatch, "h must have one entry per state");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    fail(errc::invalid_argument, "kappa must be a positive finite real");
  }

  const double pi_h = spec.pi.dot(h);
  const Eigen::VectorXd h0 = h.array() - pi_h;
  const Eigen::VectorXd rho_unit = spec.unit_weights();
  const Eigen::VectorXd f = rho_unit.cwiseProduct(h0);  // pi~-mean zero exactly

  const Eigen::VectorXd H = poisson_solve(spec, f);
  const double sigma2_q =
      2.0 * spec.pi_tilde.dot(f.cwiseProduct(H)) - spec.pi_tilde.dot(f.cwiseProduct(f));

  // Replication part with the variance-optimal law at rho_kappa.
  double sigma2_r = 0.0;
  for (int x = 0; x < spec.m; ++x) {
    const double rho_k = kappa * rho_unit[x];
    const double frac = rho_k - std::floor(rho_k);
    sigma2_r += h0[x] * h0[x] * frac * (1.0 - frac) * spec.pi_tilde[x];
  }

  CltVarianceReport report;
  report.sigma2_instrumental = kappa * sigma2_q;
  report.sigma2_replication = sigma2_r / kappa;
  report.sigma2_total = report.sigma2_instrumental + report.sigma2_replication;
  return report;
}

double kappa_opt(const FiniteChainSpec& spec, const Eigen::VectorXd& h) {
  if (h.size() != spec.m) fail(errc::dimension_mismatch, "h must have one entry per state");
  const double pi_h = spec.pi.dot(h);
  const Eigen::VectorXd h0 = h.array() - pi_h;
  const Eigen::VectorXd f = spec.unit_weights().cwiseProduct(h0);
  const Eigen::VectorXd H = poisson_solve(spec, f);
  const double sigma2_q =
      2.0 * spec.pi_tilde.dot(f.cwiseProduct(H)) - spec.pi_tilde.dot(f.cwiseProduct(f));
  if (!(sigma2_q > 1e-14)) {
    fail(errc::degenerate_variance, "instrumental CLT variance vanishes; kappa_opt undefined");
  }
  const double h0_sq = spec.pi_tilde.dot(h0.cwiseProduct(h0));
  return 0.5 * std::sqrt(h0_sq / sigma2_q);
}

double empirical_mse(const std::function<double(RandomSource&)>& estimate, double true_value,
                     int replications, std::uint64_t seed, int threads) {
  if (replications < 2) fail(errc::invalid_argument, "need at least 2 replications");
  std::vector<double> sq_err(static_cast<std::size_t>(replications));
  detail::parallel_for(replications, threads, [&](long long r) {
    RandomSource rng(seed, static_cast<std::uint64_t>(r));
    const double err = estimate(rng) - true_value;
    sq_err[static_cast<std::size_t>(r)] = err * err;
  });
  double acc = 0.0;
  for (const double e : sq_err) acc += e;
  return acc / static_cast<double>(replications);
}

double empirical_clt_variance(const FiniteChainSpec& spec, const Eigen::VectorXd& h, double kappa,
                              long long n, int replications, std::uint64_t seed, int threads) {
  if (replications < 2) fail(errc::invalid_argument, "need at least 2 replications");
  if (h.size() != spec.m) fail(errc::dimension_mismatch, "h must have one entry per state");
  const double pi_h = spec.pi.dot(h);

  auto spec_ptr = std::make_shared<const FiniteChainSpec>(spec);
  const FiniteKernel kernel(spec_ptr);
  const OptimalLaw law;

  auto log_of = [](const Eigen::VectorXd& v) {
    return [v](std::span<const double> x) {
      const int i = static_cast<int>(std::llround(x[0]));
      return std::log(v[i]);
    };
  };
  const WeightFunction wf(kappa, LogDensity(1, log_of(spec.pi)), LogDensity(1, log_of(spec.pi_tilde)));

  std::vector<double> z(static_cast<std::size_t>(replications));
  detail::parallel_for(replications, threads, [&](long long r) {
    RandomSource rng(seed, static_cast<std::uint64_t>(r));
    // stationary start: X~_0 drawn exactly from pi_tilde
    const double u = rng.uniform();
    int x0 = spec.m - 1;
    double acc = 0.0;
    for (int i = 0; i < spec.m; ++i) {
      acc += spec.pi_tilde[i];
      if (u < acc) {
        x0 = i;
        break;
      }
    }
    const std::vector<double> start{static_cast<double>(x0)};
    const double mean = expanded_chain_mean(
        kernel, law, wf, start, n, rng,
        [&](std::span<const double> x) { return h[static_cast<int>(std::llround(x[0]))]; });
    z[static_cast<std::size_t>(r)] = std::sqrt(static_cast<double>(n)) * (mean - pi_h);
  });

  double mean_z = 0.0;
  for (const double v : z) mean_z += v;
  mean_z /= static_cast<double>(replications);
  double var = 0.0;
  for (const double v : z) var += (v - mean_z) * (v - mean_z);
  return var / static_cast<double>(replications - 1);
}

double batch_means_variance(std::span<const double> series, int n_batches) {
  if (n_batches < 2 || series.size() < static_cast<std::size_t>(2 * n_batches)) {
    fail(errc::invalid_argument, "series too short for the requested batch count");
  }
  const std::size_t batch = series.size() / static_cast<std::size_t>(n_batches);
  const std::size_t used = batch * static_cast<std::size_t>(n_batches);
  double grand = 0.0;
  for (std::size_t i = 0; i < used; ++i) grand += series[i];
  grand /= static_cast<double>(used);

  double acc = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    double m = 0.0;
    for (std::size_t i = 0; i < batch; ++i) m += series[static_cast<std::size_t>(b) * batch + i];
    m /= static_cast<double>(batch);
    acc += (m - grand) * (m - grand);
  }
  return static_cast<double>(batch) * acc / static_cast<double>(n_batches - 1);
}

}  // namespace imc
