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

#ifndef IMC_REPLICATION_HPP
#define IMC_REPLICATION_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "imc/model.hpp"
#include "imc/rng.hpp"

namespace imc {

/// Nonnegative estimate W of an unnormalized target density, E[W] = pi_U(x).
struct UnbiasedEstimator {
  std::function<double(std::span<const double>, RandomSource&)> sample;
};

/// A replication-count law with mean rho for every rho in its domain (the
/// unbiasedness contract the whole construction rests on). Laws are stateless
/// and pure given (rho, rng); safe for concurrent use with per-chain streams.
class ReplicationLaw {
 public:
  virtual ~ReplicationLaw() = default;

  virtual const char* name() const = 0;
  virtual long long draw(double rho, RandomSource& rng) const = 0;

  /// E[N] at rho; equals rho after domain validation.
  double mean(double rho) const;

  /// Analytic Var[N] at rho; unsupported_law where no closed form exists.
  virtual double variance(double rho) const = 0;

  /// Exact pmf over {0..n_max} (total mass on that range); unsupported_law
  /// for laws without a closed pmf.
  virtual std::vector<double> pmf(double rho, int n_max) const;

  /// Engine hook: draw the count for a concrete point given its unit weight.
  /// The default computes rho = kappa * unit_weight and delegates to draw();
  /// the pseudo-marginal wrapper overrides it to estimate the weight first.
  virtual long long draw_at(std::span<const double> x, double unit_weight, double kappa,
                            RandomSource& rng) const;

 protected:
  /// Rejects NaN/inf/negative rho with non_finite_weight.
  static double checked_rho(double rho);
};

/// Variance-optimal law: floor(rho) + Bernoulli(frac(rho)); support is
/// exactly {floor(rho), floor(rho)+1} and the variance frac*(1-frac) attains
/// the lower bound among all integer laws with mean rho.
class OptimalLaw final : public ReplicationLaw {
 public:
  const char* name() const override { return "optimal"; }
  long long draw(double rho, RandomSource& rng) const override;
  double variance(double rho) const override;
  std::vector<double> pmf(double rho, int n_max) const override;
};

/// Rejection chain law: one Bernoulli(rho) replica, domain rho in [0, 1].
class BernoulliRejectionLaw final : public ReplicationLaw {
 public:
  const char* name() const override { return "bernoulli_rejection"; }
  long long draw(double rho, RandomSource& rng) const override;
  double variance(double rho) const override;
  std::vector<double> pmf(double rho, int n_max) const override;
};

/// Optimal self-regenerative law: N = V * S with V ~ Ber(alpha) and S
/// geometric on {1,2,...} with success probability q, parametrized as
/// alpha = min(1, rho), q = min(1, 1/rho) so that E[N] = alpha/q = rho.
class OsrLaw final : public ReplicationLaw {
 public:
  const char* name() const override { return "osr"; }
  long long draw(double rho, RandomSource& rng) const override;
  double variance(double rho) const override;
  std::vector<double> pmf(double rho, int n_max) const override;
};

/// Plug-in law for targets known only through an unbiased estimate: draws
/// W ~ T_pi(x, .), forms rho_hat = kappa * W / pi~_U(x), then applies the
/// optimal law at rho_hat. Unbiased by the tower rule; no closed pmf.
class PseudoMarginalLaw final : public ReplicationLaw {
 public:
  PseudoMarginalLaw(UnbiasedEstimator estimator, LogDensity log_instrumental);

  const char* name() const override { return "pseudo_marginal"; }
  long long draw(double rho, RandomSource& rng) const override;  // unsupported_law
  double variance(double rho) const override;                    // unsupported_law
  long long draw_at(std::span<const double> x, double unit_weight, double kappa,
                    RandomSource& rng) const override;

 private:
  UnbiasedEstimator estimator_;
  LogDensity log_instrumental_;
};

/// Deterministic core of the optimal law: floor(rho) + 1 iff u < frac(rho),
/// strict inequality (ties at u = frac go down).
long long optimal_count(double rho, double u);

long long draw_optimal(double rho, RandomSource& rng);
long long draw_bernoulli_rejection(double target_ratio, double M, RandomSource& rng);
long long draw_osr(double rho, RandomSource& rng);
long long draw_pseudo_marginal(std::span<const double> x, double kappa,
                               double log_instrumental_at_x, const UnbiasedEstimator& estimator,
                               RandomSource& rng);

/// Fully pseudo-marginal weight on the extended space: kappa * v / u.
double full_pm_weight(double u, double v, double kappa);

std::vector<double> law_pmf(const ReplicationLaw& law, double rho, int n_max);

}  // namespace imc

#endif
