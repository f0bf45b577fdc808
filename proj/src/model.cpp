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

#include "imc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace imc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

void check_dim(int expected, std::size_t got) {
  if (static_cast<std::size_t>(expected) != got) {
    fail(errc::dimension_mismatch, "expected vector of length " + std::to_string(expected) +
                                       ", got " + std::to_string(got));
  }
}

double squared_distance(std::span<const double> x, std::span<const double> mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu[i];
    s += d * d;
  }
  return s;
}

}  // namespace

LogDensity::LogDensity(int dim, Fn eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim_ < 1) fail(errc::invalid_argument, "LogDensity dim must be >= 1");
  if (!eval_) fail(errc::invalid_argument, "LogDensity requires an evaluation function");
}

double LogDensity::operator()(std::span<const double> x) const {
  check_dim(dim_, x.size());
  const double v = eval_(x);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
    fail(errc::non_finite_weight, "log-density returned a non-finite value (NaN or +inf)");
  }
  return v;
}

WeightFunction::WeightFunction(double kappa, LogDensity log_target, LogDensity log_instrumental)
    : kappa_(kappa),
      log_target_(std::move(log_target)),
      log_instrumental_(std::move(log_instrumental)) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    fail(errc::invalid_argument, "kappa must be a positive finite real");
  }
  if (log_target_.dim() != log_instrumental_.dim()) {
    fail(errc::dimension_mismatch, "target and instrumental densities disagree on dim");
  }
}

double WeightFunction::log_unit_weight(std::span<const double> x) const {
  const double lt = log_target_(x);
  const double li = log_instrumental_(x);
  if (li == kNegInf) {
    if (lt == kNegInf) return kNegInf;  // both vanish: zero weight
    fail(errc::domination_violation,
         "instrumental density vanishes where the target is positive");
  }
  if (lt == kNegInf) return kNegInf;
  return lt - li;
}

double WeightFunction::unit_weight(std::span<const double> x) const {
  const double lw = log_unit_weight(x);
  return lw == kNegInf ? 0.0 : std::exp(lw);
}

double WeightFunction::weight(std::span<const double> x) const {
  return kappa_ * unit_weight(x);
}

LogDensity tempered(const LogDensity& target, double beta) {
  if (!(beta > 0.0) || beta > 1.0) {
    fail(errc::invalid_beta, "tempering beta must lie in (0, 1]");
  }
  return LogDensity(target.dim(), [target, beta](std::span<const double> x) {
    const double v = target(x);
    return v == kNegInf ? kNegInf : beta * v;
  });
}

LogDensity gaussian_mixture(int dim, const std::vector<std::vector<double>>& means) {
  if (means.empty()) fail(errc::invalid_argument, "gaussian_mixture requires at least one mean");
  for (const auto& mu : means) check_dim(dim, mu.size());
  const double log_norm = -0.5 * dim * kLogTwoPi;
  return LogDensity(dim, [means, log_norm](std::span<const double> x) {
    // log-sum-exp over component log-densities
    double max_term = kNegInf;
    std::vector<double> terms(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
      terms[i] = log_norm - 0.5 * squared_distance(x, means[i]);
      max_term = std::max(max_term, terms[i]);
    }
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
  });
}

LogDensity ring_bimodal(int dim) {
  if (dim < 1) fail(errc::invalid_argument, "ring_bimodal dim must be >= 1");
  return LogDensity(dim, [](std::span<const double> x) {
    double norm2 = 0.0;
    for (const double xi : x) norm2 += xi * xi;
    const double ring = (std::sqrt(norm2) - 2.0) / 0.1;
    double v = -0.5 * ring * ring;
    for (const double xi : x) {
      const double a = -0.5 * ((xi + 3.0) / 0.6) * ((xi + 3.0) / 0.6);
      const double b = -0.5 * ((xi - 3.0) / 0.6) * ((xi - 3.0) / 0.6);
      const double hi = std::max(a, b);
      v += hi + std::log1p(std::exp(std::min(a, b) - hi));
    }
    return v;
  });
}

LogDensity std_gaussian(int dim) {
  if (dim < 1) fail(errc::invalid_argument, "std_gaussian dim must be >= 1");
  const double log_norm = -0.5 * dim * kLogTwoPi;
  return LogDensity(dim, [log_norm](std::span<const double> x) {
    double s = 0.0;
    for (const double xi : x) s += xi * xi;
    return log_norm - 0.5 * s;
  });
}

SampleableDensity gaussian_mixture_sampler(int dim, std::vector<std::vector<double>> means,
                                           double sigma) {
  if (means.empty()) fail(errc::invalid_argument, "mixture sampler requires at least one mean");
  if (!(sigma > 0.0)) fail(errc::invalid_argument, "mixture sigma must be positive");
  for (const auto& mu : means) check_dim(dim, mu.size());

  const double log_norm =
      -0.5 * dim * kLogTwoPi - dim * std::log(sigma) - std::log(static_cast<double>(means.size()));
  const double inv_two_sigma2 = 0.5 / (sigma * sigma);

  LogDensity logpdf(dim, [means, log_norm, inv_two_sigma2](std::span<const double> x) {
    double max_term = kNegInf;
    std::vector<double> terms(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
      terms[i] = log_norm - inv_two_sigma2 * squared_distance(x, means[i]);
      max_term = std::max(max_term, terms[i]);
    }
    double acc = 0.0;
    for (const double t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
  });

  auto sample = [dim, means, sigma](RandomSource& rng) {
    const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(means.size()));
    const auto& mu = means[std::min(k, means.size() - 1)];
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i) x[i] = mu[i] + sigma * rng.normal();
    return x;
  };

  return SampleableDensity{std::move(logpdf), std::move(sample)};
}

SampleableDensity std_gaussian_sampler(int dim) {
  auto sample = [dim](RandomSource& rng) {
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i) x[i] = rng.normal();
    return x;
  };
  return SampleableDensity{std_gaussian(dim), std::move(sample)};
}

}  // namespace imc
