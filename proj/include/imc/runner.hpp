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

#ifndef IMC_RUNNER_HPP
#define IMC_RUNNER_HPP

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imc/engine.hpp"
#include "imc/finite.hpp"
#include "imc/kernels.hpp"
#include "imc/model.hpp"
#include "imc/replication.hpp"

namespace imc {

/// Outcome of a workflow: a machine-readable report plus the overall verdict
/// (always true for purely informational workflows).
struct Report {
  nlohmann::json json;
  bool all_pass = true;
};

/// Parses JSON text, rethrowing parse failures as config errors.
nlohmann::json parse_config_text(const std::string& text);

/// Fully resolved experiment built from a config object. Construction
/// validates everything and reports problems with their field path.
struct Experiment {
  nlohmann::json resolved;
  int dim = 0;
  LogDensity log_target;
  LogDensity log_instrumental;
  std::optional<SampleableDensity> instrumental_sampler;
  std::shared_ptr<const FiniteChainSpec> finite;
  std::unique_ptr<InstrumentalKernel> kernel;
  std::unique_ptr<ReplicationLaw> law;
  bool kappa_fixed = true;
  double kappa_value = 1.0;
  double alpha = 1.0;
  long long n_steps = 0;
  long long burn_in = 0;
  int replications = 1;
  std::uint64_t seed = 0;
  std::vector<double> init;
};

Experiment build_experiment(const nlohmann::json& config);

/// Sampler run: writes sample CSV (with the metadata header line), a
/// metadata JSON and a diagnostics JSON per replication under out_dir (when
/// non-empty) and returns the diagnostics report.
Report run_workflow(const nlohmann::json& config, const std::string& out_dir, int threads);

/// Fixed-chain kappa scan; emits ess_scan.csv with columns
/// kappa,ess_kappa,ess_is,chain_length.
Report ess_scan_workflow(const nlohmann::json& config, const std::string& out_dir, int threads);

/// Independent-proposal comparison of IMC, self-normalized IS, independence
/// MH and OSR on identical instrumental draws; emits bench.csv.
Report bench_workflow(const nlohmann::json& config, const std::string& out_dir, int threads);

/// Exact finite-state verification over random specs; emits verify.json.
/// all_pass reflects every requested invariant.
Report verify_workflow(const nlohmann::json& args, const std::string& out_dir);

}  // namespace imc

#endif
