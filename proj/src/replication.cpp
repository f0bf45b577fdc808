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

#include "imc/replication.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "imc/errors.hpp"

namespace imc {

namespace {
double frac_part(double rho) { return rho - std::floor(rho); }

double check_rho(double rho) {
  if (std::isnan(rho) || std::isinf(rho)) {
    fail(errc::non_finite_weight, "replication weight rho is not finite");
  }
  if (rho < 0.0) fail(errc::non_finite_weight, "replication weight rho is negative");
  return rho;
}
}  // namespace

double ReplicationLaw::checked_rho(double rho) { return check_rho(rho); }

double ReplicationLaw::mean(double rho) const { return checked_rho(rho); }

std::vector<double> ReplicationLaw::pmf(double, int) const {
  fail(errc::unsupported_law, std::string(name()) + " has no closed-form pmf");
}

long long ReplicationLaw::draw_at(std::span<const double>, double unit_weight, double kappa,
                                  RandomSource& rng) const {
  return draw(kappa * unit_weight, rng);
}

long long optimal_count(double rho, double u) {
  const auto fl = static_cast<long long>(std::floor(rho));
  return u < frac_part(rho) ? fl + 1 : fl;
}

long long OptimalLaw::draw(double rho, RandomSource& rng) const {
  return optimal_count(checked_rho(rho), rng.uniform());
}

double OptimalLaw::variance(double rho) const {
  const double f = frac_part(checked_rho(rho));
  return f * (1.0 - f);
}

std::vector<double> OptimalLaw::pmf(double rho, int n_max) const {
  checked_rho(rho);
  if (n_max < 0) fail(errc::invalid_argument, "n_max must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  const auto fl = static_cast<long long>(std::floor(rho));
  const double f = frac_part(rho);
  if (fl <= n_max) p[static_cast<std::size_t>(fl)] += 1.0 - f;
  if (fl + 1 <= n_max) p[static_cast<std::size_t>(fl + 1)] += f;
  return p;
}

long long BernoulliRejectionLaw::draw(double rho, RandomSource& rng) const {
  checked_rho(rho);
  if (rho > 1.0) {
    fail(errc::domination_violation,
         "Bernoulli rejection law needs rho <= 1, got " + std::to_string(rho));
  }
  return rng.uniform() < rho ? 1 : 0;
}

double BernoulliRejectionLaw::variance(double rho) const {
  checked_rho(rho);
  if (rho > 1.0) fail(errc::domination_violation, "Bernoulli rejection law needs rho <= 1");
  return rho * (1.0 - rho);
}

std::vector<double> BernoulliRejectionLaw::pmf(double rho, int n_max) const {
  checked_rho(rho);
  if (rho > 1.0) fail(errc::domination_violation, "Bernoulli rejection law needs rho <= 1");
  if (n_max < 0) fail(errc::invalid_argument, "n_max must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  p[0] = 1.0 - rho;
  if (n_max >= 1) p[1] = rho;
  return p;
}

long long OsrLaw::draw(double rho, RandomSource& rng) const {
  checked_rho(rho);
  if (rho == 0.0) return 0;
  const double alpha = std::min(1.0, rho);
  const double q = std::min(1.0, 1.0 / rho);
  if (rng.uniform() >= alpha) return 0;
  if (q >= 1.0) return 1;
  // geometric on {1,2,...}: S = 1 + floor(log(1-u) / log(1-q))
  const double u = rng.uniform();
  return 1 + static_cast<long long>(std::floor(std::log1p(-u) / std::log1p(-q)));
}

double OsrLaw::variance(double rho) const {
  checked_rho(rho);
  if (rho <= 1.0) return rho * (1.0 - rho);
  return rho * rho - rho;  // alpha = 1, geometric with q = 1/rho
}

std::vector<double> OsrLaw::pmf(double rho, int n_max) const {
  checked_rho(rho);
  if (n_max < 0) fail(errc::invalid_argument, "n_max must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double alpha = std::min(1.0, rho);
  const double q = rho > 0.0 ? std::min(1.0, 1.0 / rho) : 1.0;
  p[0] = 1.0 - alpha;
  for (int n = 1; n <= n_max; ++n) {
    p[static_cast<std::size_t>(n)] = alpha * q * std::pow(1.0 - q, n - 1);
  }
  return p;
}

PseudoMarginalLaw::PseudoMarginalLaw(UnbiasedEstimator estimator, LogDensity log_instrumental)
    : estimator_(std::move(estimator)), log_instrumental_(std::move(log_instrumental)) {
  if (!estimator_.sample) fail(errc::invalid_argument, "pseudo-marginal law needs an estimator");
}

long long PseudoMarginalLaw::draw(double, RandomSource&) const {
  fail(errc::unsupported_law, "pseudo_marginal draws depend on the point, use draw_at");
}

double PseudoMarginalLaw::variance(double) const {
  fail(errc::unsupported_law, "pseudo_marginal has no closed-form variance");
}

long long PseudoMarginalLaw::draw_at(std::span<const double> x, double, double kappa,
                                     RandomSource& rng) const {
  return draw_pseudo_marginal(x, kappa, log_instrumental_(x), estimator_, rng);
}

long long draw_optimal(double rho, RandomSource& rng) { return OptimalLaw{}.draw(rho, rng); }

long long draw_bernoulli_rejection(double target_ratio, double M, RandomSource& rng) {
  if (!(M > 0.0)) fail(errc::invalid_argument, "rejection bound M must be positive");
  if (std::isnan(target_ratio) || target_ratio < 0.0 || std::isinf(target_ratio)) {
    fail(errc::non_finite_weight, "target ratio must be a finite nonnegative real");
  }
  if (target_ratio > M) {
    fail(errc::domination_violation, "target ratio " + std::to_string(target_ratio) +
                                         " exceeds the rejection bound M = " + std::to_string(M));
  }
  return BernoulliRejectionLaw{}.draw(target_ratio / M, rng);
}

long long draw_osr(double rho, RandomSource& rng) { return OsrLaw{}.draw(rho, rng); }

long long draw_pseudo_marginal(std::span<const double> x, double kappa,
                               double log_instrumental_at_x, const UnbiasedEstimator& estimator,
                               RandomSource& rng) {
  if (!std::isfinite(log_instrumental_at_x)) {
    fail(errc::non_finite_weight, "pseudo-marginal draw needs a finite instrumental log-density");
  }
  const double w = estimator.sample(x, rng);
  if (std::isnan(w) || std::isinf(w) || w < 0.0) {
    fail(errc::non_finite_weight, "density estimate W is not a finite nonnegative real");
  }
  if (w == 0.0) return 0;
  const double rho_hat = std::exp(std::log(kappa) + std::log(w) - log_instrumental_at_x);
  return optimal_count(check_rho(rho_hat), rng.uniform());
}

double full_pm_weight(double u, double v, double kappa) {
  if (u == 0.0) fail(errc::division_by_zero, "instrumental estimate u must be positive");
  if (!(u > 0.0) || std::isnan(v) || v < 0.0) {
    fail(errc::non_finite_weight, "fully pseudo-marginal weight needs u > 0 and v >= 0");
  }
  return kappa * v / u;
}

std::vector<double> law_pmf(const ReplicationLaw& law, double rho, int n_max) {
  return law.pmf(rho, n_max);
}

}  // namespace imc
