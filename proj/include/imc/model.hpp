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

#ifndef IMC_MODEL_HPP
#define IMC_MODEL_HPP

#include <functional>
#include <span>
#include <vector>

#include "imc/errors.hpp"
#include "imc/rng.hpp"

namespace imc {

/// Log of an unnormalized density on R^dim. Returns -inf exactly where the
/// density is zero; a NaN (or +inf) from the wrapped callable is rejected
/// eagerly with non_finite_weight. Immutable and safe to share across threads.
class LogDensity {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  LogDensity() = default;
  LogDensity(int dim, Fn eval);

  int dim() const { return dim_; }
  double operator()(std::span<const double> x) const;

 private:
  int dim_ = 0;
  Fn eval_;
};

/// The replication weight x -> kappa * pi_U(x) / pi~_U(x), kept in log space
/// and exponentiated only when a draw needs it. The kappa factor is applied
/// as a plain product so weights are exactly linear in kappa.
class WeightFunction {
 public:
  WeightFunction(double kappa, LogDensity log_target, LogDensity log_instrumental);

  double kappa() const { return kappa_; }
  int dim() const { return log_target_.dim(); }
  const LogDensity& log_target() const { return log_target_; }
  const LogDensity& log_instrumental() const { return log_instrumental_; }

  /// log(pi_U(x) / pi~_U(x)); -inf where the target vanishes. Throws
  /// domination_violation where pi~_U(x) = 0 but pi_U(x) > 0.
  double log_unit_weight(std::span<const double> x) const;

  double unit_weight(std::span<const double> x) const;

  /// kappa * unit_weight(x).
  double weight(std::span<const double> x) const;

 private:
  double kappa_ = 1.0;
  LogDensity log_target_;
  LogDensity log_instrumental_;
};

/// pi~_U = pi_U^beta, beta in (0, 1].
LogDensity tempered(const LogDensity& target, double beta);

/// log sum_i phi_dim(x; means[i], I), evaluated with log-sum-exp.
LogDensity gaussian_mixture(int dim, const std::vector<std::vector<double>>& means);

/// The 2^dim-modal ring-constrained target:
///   -((||x||-2)/0.1)^2/2 + sum_i log(exp(-((x_i+3)/0.6)^2/2) + exp(-((x_i-3)/0.6)^2/2))
LogDensity ring_bimodal(int dim);

LogDensity std_gaussian(int dim);

/// A density paired with an exact sampler; required by the i.i.d. and
/// independence-MH instrumental kernels.
struct SampleableDensity {
  LogDensity logpdf;
  std::function<std::vector<double>(RandomSource&)> sample;
};

/// Equal-weight Gaussian mixture with covariance sigma^2 I, normalized logpdf.
SampleableDensity gaussian_mixture_sampler(int dim, std::vector<std::vector<double>> means,
                                           double sigma);

SampleableDensity std_gaussian_sampler(int dim);

}  // namespace imc

#endif
