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

#include "imc/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "imc/errors.hpp"

namespace imc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Accept/reject on a log-ratio; a -inf current score always accepts a
/// finite-score proposal (the initialization convention).
bool accept_log_ratio(double lp_new, double lp_cur, RandomSource& rng) {
  if (lp_new == kNegInf) return false;
  if (lp_cur == kNegInf) return true;
  const double log_alpha = lp_new - lp_cur;
  if (log_alpha >= 0.0) return true;
  return std::log(1.0 - rng.uniform()) < log_alpha;
}
}  // namespace

StepResult rwm_step(const LogDensity& target, std::span<const double> x, double step_size,
                    RandomSource& rng) {
  if (!(step_size > 0.0)) fail(errc::invalid_argument, "rwm step_size must be positive");
  std::vector<double> prop(x.begin(), x.end());
  for (double& xi : prop) xi += step_size * rng.normal();
  const double lp_cur = target(x);
  const double lp_new = target(prop);
  if (accept_log_ratio(lp_new, lp_cur, rng)) return {std::move(prop), true};
  return {std::vector<double>(x.begin(), x.end()), false};
}

StepResult independent_mh_step(const LogDensity& target, const SampleableDensity& proposal,
                               std::span<const double> x, RandomSource& rng) {
  std::vector<double> prop = proposal.sample(rng);
  const double lq_new = proposal.logpdf(prop);
  if (lq_new == kNegInf) {
    fail(errc::domination_violation, "independence proposal drew a zero-density point");
  }
  const double score_new = target(prop) - lq_new;
  const double lp_cur = target(x);
  const double score_cur = lp_cur == kNegInf ? kNegInf : lp_cur - proposal.logpdf(x);
  if (accept_log_ratio(score_new, score_cur, rng)) return {std::move(prop), true};
  return {std::vector<double>(x.begin(), x.end()), false};
}

std::vector<double> iid_step(const SampleableDensity& pi_tilde, RandomSource& rng) {
  return pi_tilde.sample(rng);
}

int finite_step(const FiniteChainSpec& spec, int state_index, RandomSource& rng) {
  if (state_index < 0 || state_index >= spec.m) {
    fail(errc::index_out_of_range,
         "state index " + std::to_string(state_index) + " outside [0, " + std::to_string(spec.m) +
             ")");
  }
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = state_index;
  for (int j = 0; j < spec.m; ++j) {
    const double p = spec.Q(state_index, j);
    if (p <= 0.0) continue;
    last_positive = j;
    acc += p;
    if (u < acc) return j;
  }
  return last_positive;  // u landed in the rounding slack of the last bucket
}

RwmKernel::RwmKernel(LogDensity target, double step_size)
    : target_(std::move(target)), step_size_(step_size) {
  if (!(step_size_ > 0.0)) fail(errc::invalid_argument, "rwm step_size must be positive");
}

StepResult RwmKernel::step(std::span<const double> x, RandomSource& rng) const {
  return rwm_step(target_, x, step_size_, rng);
}

IndependentMhKernel::IndependentMhKernel(LogDensity target, SampleableDensity proposal)
    : target_(std::move(target)), proposal_(std::move(proposal)) {
  if (target_.dim() != proposal_.logpdf.dim()) {
    fail(errc::dimension_mismatch, "target and proposal densities disagree on dim");
  }
}

StepResult IndependentMhKernel::step(std::span<const double> x, RandomSource& rng) const {
  return independent_mh_step(target_, proposal_, x, rng);
}

IidKernel::IidKernel(SampleableDensity pi_tilde) : pi_tilde_(std::move(pi_tilde)) {}

StepResult IidKernel::step(std::span<const double>, RandomSource& rng) const {
  return {pi_tilde_.sample(rng), true};
}

FiniteKernel::FiniteKernel(std::shared_ptr<const FiniteChainSpec> spec) : spec_(std::move(spec)) {
  if (!spec_) fail(errc::invalid_argument, "FiniteKernel requires a spec");
}

StepResult FiniteKernel::step(std::span<const double> x, RandomSource& rng) const {
  if (x.size() != 1) fail(errc::dimension_mismatch, "finite chain states are 1-dimensional");
  const int i = static_cast<int>(std::llround(x[0]));
  const int j = finite_step(*spec_, i, rng);
  return {{static_cast<double>(j)}, j != i};
}

}  // namespace imc
