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

#ifndef IMC_ERRORS_HPP
#define IMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace imc {

enum class errc {
  ok = 0,
  config,
  dimension_mismatch,
  domination_violation,
  non_finite_weight,
  invalid_beta,
  index_out_of_range,
  all_zero_weights,
  empty_chain,
  singular_system,
  mean_not_zero,
  non_convergence,
  zero_acceptance,
  support_too_small,
  unsupported_law,
  degenerate_variance,
  division_by_zero,
  io,
  invalid_argument,
  unknown,
};

const char* errc_name(errc code) noexcept;

/// Library exception carrying a stable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace imc

#endif
