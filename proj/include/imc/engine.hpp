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

#ifndef IMC_ENGINE_HPP
#define IMC_ENGINE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "imc/kernels.hpp"
#include "imc/model.hpp"
#include "imc/replication.hpp"
#include "imc/rng.hpp"

namespace imc {

/// Run-length output of the semi-Markov sampler: instrumental points with
/// their replication counts and unit weights (kappa = 1 convention, so kappa
/// can be re-tuned and the kappa scan rerun without touching the chain).
/// Points are stored row-major, size() x dim.
struct RunLengthSample {
  int dim = 0;
  std::vector<double> points;
  std::vector<long long> counts;
  std::vector<double> weights;

  std::size_t size() const { return counts.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  long long total_count() const;
};

/// One state of the augmented chain: the point and the remaining countdown.
struct AugmentedState {
  std::span<const double> x;
  long long n = 0;
};

/// Lazy expansion of a RunLengthSample into the augmented chain: each point
/// with count c >= 1 is emitted c times with countdown c-1, ..., 0; zero-count
/// points are skipped. The emitted length is exactly total_count().
class ExpandedView {
 public:
  explicit ExpandedView(const RunLengthSample& sample) : sample_(&sample) {}

  class iterator {
   public:
    iterator() = default;
    iterator(const RunLengthSample* s, std::size_t i) : sample_(s), index_(i) { skip_zeros(); }

    AugmentedState operator*() const { return {sample_->point(index_), countdown_}; }

    iterator& operator++() {
      if (countdown_ > 0) {
        --countdown_;
      } else {
        ++index_;
        skip_zeros();
      }
      return *this;
    }

    bool operator==(const iterator& o) const {
      return index_ == o.index_ && countdown_ == o.countdown_;
    }

   private:
    void skip_zeros() {
      while (index_ < sample_->size() && sample_->counts[index_] == 0) ++index_;
      countdown_ = index_ < sample_->size() ? sample_->counts[index_] - 1 : 0;
    }

    const RunLengthSample* sample_ = nullptr;
    std::size_t index_ = 0;
    long long countdown_ = 0;
  };

  iterator begin() const { return {sample_, 0}; }
  iterator end() const { return {sample_, sample_->size()}; }

 private:
  const RunLengthSample* sample_;
};

ExpandedView expand(const RunLengthSample& sample);

/// Instrumental sweep only: advances the chain burn_in steps (discarded) and
/// records n_steps points with their unit weights; counts are left at zero.
RunLengthSample run_instrumental(const InstrumentalKernel& kernel, const WeightFunction& wf,
                                 std::span<const double> x0, long long n_steps, long long burn_in,
                                 RandomSource& rng);

/// Draws (or redraws) the replication counts of an existing sample at the
/// given kappa. Weight errors carry the offending index.
void draw_counts(RunLengthSample& sample, const ReplicationLaw& law, double kappa,
                 RandomSource& rng);

/// Semi-Markov sampler: instrumental sweep plus count draws at wf.kappa().
RunLengthSample run_semi_markov(const InstrumentalKernel& kernel, const ReplicationLaw& law,
                                const WeightFunction& wf, std::span<const double> x0,
                                long long n_steps, long long burn_in, RandomSource& rng);

/// kappa = alpha * n / sum(weights): makes the expanded chain's expected
/// length alpha * n.
double tune_kappa(std::span<const double> weights, double alpha);

using TestFunction = std::function<double(std::span<const double>)>;

/// Replication-weighted estimate sum(c_i h(x_i)) / sum(c_i) and the expanded
/// chain length.
std::pair<double, long long> estimate_imc(const RunLengthSample& sample, const TestFunction& h);

/// Self-normalized importance-sampling estimate from the stored weights.
double estimate_is(const RunLengthSample& sample, const TestFunction& h);

/// Mean of h over exactly length states of the augmented chain (the chain of
/// Algorithm-2 type transitions run until `length` emissions).
double expanded_chain_mean(const InstrumentalKernel& kernel, const ReplicationLaw& law,
                           const WeightFunction& wf, std::span<const double> x0, long long length,
                           RandomSource& rng, const TestFunction& h);

}  // namespace imc

#endif
