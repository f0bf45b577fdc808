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

#include "imc/engine.hpp"

#include <cmath>
#include <string>

#include "imc/errors.hpp"

namespace imc {

long long RunLengthSample::total_count() const {
  long long total = 0;
  for (const long long c : counts) total += c;
  return total;
}

ExpandedView expand(const RunLengthSample& sample) { return ExpandedView(sample); }

RunLengthSample run_instrumental(const InstrumentalKernel& kernel, const WeightFunction& wf,
                                 std::span<const double> x0, long long n_steps, long long burn_in,
                                 RandomSource& rng) {
  const int dim = kernel.dim();
  if (static_cast<int>(x0.size()) != dim) {
    fail(errc::dimension_mismatch, "initial point has wrong dimension");
  }
  if (n_steps < 1) fail(errc::invalid_argument, "n_steps must be >= 1");
  if (burn_in < 0) fail(errc::invalid_argument, "burn_in must be >= 0");

  RunLengthSample sample;
  sample.dim = dim;
  sample.points.reserve(static_cast<std::size_t>(n_steps) * dim);
  sample.counts.assign(static_cast<std::size_t>(n_steps), 0);
  sample.weights.reserve(static_cast<std::size_t>(n_steps));

  std::vector<double> x(x0.begin(), x0.end());
  for (long long k = 0; k < burn_in; ++k) x = kernel.step(x, rng).x;

  for (long long k = 0; k < n_steps; ++k) {
    x = kernel.step(x, rng).x;
    double w = 0.0;
    try {
      w = wf.unit_weight(x);
    } catch (const Error& e) {
      throw Error(e.code(), "at chain step " + std::to_string(k + 1) + ": " + e.what());
    }
    sample.points.insert(sample.points.end(), x.begin(), x.end());
    sample.weights.push_back(w);
  }
  return sample;
}

void draw_counts(RunLengthSample& sample, const ReplicationLaw& law, double kappa,
                 RandomSource& rng) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    fail(errc::invalid_argument, "kappa must be a positive finite real");
  }
  sample.counts.assign(sample.size(), 0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    try {
      sample.counts[i] = law.draw_at(sample.point(i), sample.weights[i], kappa, rng);
    } catch (const Error& e) {
      throw Error(e.code(), "at sample index " + std::to_string(i) + ": " + e.what());
    }
  }
}

RunLengthSample run_semi_markov(const InstrumentalKernel& kernel, const ReplicationLaw& law,
                                const WeightFunction& wf, std::span<const double> x0,
                                long long n_steps, long long burn_in, RandomSource& rng) {
  RunLengthSample sample = run_instrumental(kernel, wf, x0, n_steps, burn_in, rng);
  draw_counts(sample, law, wf.kappa(), rng);
  return sample;
}

double tune_kappa(std::span<const double> weights, double alpha) {
  if (!(alpha > 0.0)) fail(errc::invalid_argument, "alpha must be positive");
  double total = 0.0;
  for (const double w : weights) total += w;
  if (!(total > 0.0)) fail(errc::all_zero_weights, "cannot tune kappa: all weights are zero");
  return alpha * static_cast<double>(weights.size()) / total;
}

std::pair<double, long long> estimate_imc(const RunLengthSample& sample, const TestFunction& h) {
  const long long total = sample.total_count();
  if (total <= 0) fail(errc::empty_chain, "no replicas: the expanded chain is empty");
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.counts[i] == 0) continue;
    acc += static_cast<double>(sample.counts[i]) * h(sample.point(i));
  }
  return {acc / static_cast<double>(total), total};
}

double estimate_is(const RunLengthSample& sample, const TestFunction& h) {
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double w = sample.weights[i];
    if (w == 0.0) continue;
    wsum += w;
    acc += w * h(sample.point(i));
  }
  if (!(wsum > 0.0)) fail(errc::all_zero_weights, "all importance weights are zero");
  return acc / wsum;
}

double expanded_chain_mean(const InstrumentalKernel& kernel, const ReplicationLaw& law,
                           const WeightFunction& wf, std::span<const double> x0, long long length,
                           RandomSource& rng, const TestFunction& h) {
  if (length < 1) fail(errc::invalid_argument, "length must be >= 1");
  std::vector<double> x(x0.begin(), x0.end());
  const double kappa = wf.kappa();
  long long emitted = 0;
  double acc = 0.0;
  while (emitted < length) {
    x = kernel.step(x, rng).x;
    const long long c = law.draw_at(x, wf.unit_weight(x), kappa, rng);
    if (c == 0) continue;
    const long long take = std::min(c, length - emitted);
    acc += static_cast<double>(take) * h(x);
    emitted += take;
  }
  return acc / static_cast<double>(length);
}

}  // namespace imc
