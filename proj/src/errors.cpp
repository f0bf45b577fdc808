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

#include "imc/errors.hpp"

namespace imc {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::ok: return "ok";
    case errc::config: return "ConfigError";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::domination_violation: return "DominationViolation";
    case errc::non_finite_weight: return "NonFiniteWeight";
    case errc::invalid_beta: return "InvalidBeta";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::all_zero_weights: return "AllZeroWeights";
    case errc::empty_chain: return "EmptyChain";
    case errc::singular_system: return "SingularSystem";
    case errc::mean_not_zero: return "MeanNotZero";
    case errc::non_convergence: return "NonConvergence";
    case errc::zero_acceptance: return "ZeroAcceptance";
    case errc::support_too_small: return "SupportTooSmall";
    case errc::unsupported_law: return "UnsupportedLaw";
    case errc::degenerate_variance: return "DegenerateVariance";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::io: return "IoError";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::unknown: return "UnknownError";
  }
  return "UnknownError";
}

}  // namespace imc
