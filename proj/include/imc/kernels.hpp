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

#ifndef IMC_KERNELS_HPP
#define IMC_KERNELS_HPP

#include <memory>
#include <span>
#include <vector>

#include "imc/finite.hpp"
#include "imc/model.hpp"
#include "imc/rng.hpp"

namespace imc {

struct StepResult {
  std::vector<double> x;
  bool accepted = false;
};

/// Random-walk Metropolis step: propose x + step_size * z with z standard
/// normal, accept with probability min(1, pi~(x')/pi~(x)). A current state
/// with zero density accepts any positive-density proposal.
StepResult rwm_step(const LogDensity& target, std::span<const double> x, double step_size,
                    RandomSource& rng);

/// Independence Metropolis-Hastings step with an exactly sampleable proposal.
StepResult independent_mh_step(const LogDensity& target, const SampleableDensity& proposal,
                               std::span<const double> x, RandomSource& rng);

/// Fresh exact draw from pi~, ignoring the current state.
std::vector<double> iid_step(const SampleableDensity& pi_tilde, RandomSource& rng);

/// One transition of the explicit stochastic matrix Q from state_index.
int finite_step(const FiniteChainSpec& spec, int state_index, RandomSource& rng);

/// A Markov transition rule leaving the instrumental distribution invariant.
/// Implementations are immutable and shareable; a step mutates only the
/// caller's RandomSource.
class InstrumentalKernel {
 public:
  virtual ~InstrumentalKernel() = default;
  virtual int dim() const = 0;
  virtual StepResult step(std::span<const double> x, RandomSource& rng) const = 0;
};

class RwmKernel final : public InstrumentalKernel {
 public:
  RwmKernel(LogDensity target, double step_size);
  int dim() const override { return target_.dim(); }
  StepResult step(std::span<const double> x, RandomSource& rng) const override;

 private:
  LogDensity target_;
  double step_size_;
};

class IndependentMhKernel final : public InstrumentalKernel {
 public:
  IndependentMhKernel(LogDensity target, SampleableDensity proposal);
  int dim() const override { return target_.dim(); }
  StepResult step(std::span<const double> x, RandomSource& rng) const override;

 private:
  LogDensity target_;
  SampleableDensity proposal_;
};

class IidKernel final : public InstrumentalKernel {
 public:
  explicit IidKernel(SampleableDensity pi_tilde);
  int dim() const override { return pi_tilde_.logpdf.dim(); }
  StepResult step(std::span<const double> x, RandomSource& rng) const override;

 private:
  SampleableDensity pi_tilde_;
};

/// Wraps a FiniteChainSpec as a kernel over 1-d states holding the index.
class FiniteKernel final : public InstrumentalKernel {
 public:
  explicit FiniteKernel(std::shared_ptr<const FiniteChainSpec> spec);
  int dim() const override { return 1; }
  StepResult step(std::span<const double> x, RandomSource& rng) const override;

 private:
  std::shared_ptr<const FiniteChainSpec> spec_;
};

}  // namespace imc

#endif
