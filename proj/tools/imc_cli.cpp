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

// Command-line front end; talks to libimc exclusively through the C API.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "imc/capi.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    std::cerr << "error: cannot read " << path << "\n";
    std::exit(2);
  }
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("IMC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int fail_with(imc_status status) {
  std::cerr << "error (" << imc_status_name(status) << "): " << imc_last_error() << "\n";
  return 1;
}

int finish(imc_status status, imc_report* report) {
  if (status != IMC_OK) return fail_with(status);
  std::cout << imc_report_json(report);
  const int pass = imc_report_all_pass(report);
  imc_report_destroy(report);
  return pass ? 0 : 1;
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "JSON config file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--threads", opts.threads, "worker threads (IMC_THREADS as fallback)");
}

imc_experiment* make_experiment(const CommonOpts& opts) {
  imc_experiment* exp = nullptr;
  const imc_status status = imc_experiment_create(read_file(opts.config_path).c_str(), &exp);
  if (status != IMC_OK) {
    std::exit(fail_with(status));
  }
  if (opts.seed_set) imc_experiment_set_seed(exp, opts.seed);
  imc_experiment_set_threads(exp, resolve_threads(opts.threads));
  return exp;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"importance Markov chain sampler"};
  app.require_subcommand(1);

  CommonOpts run_opts, scan_opts, bench_opts, verify_opts;

  auto* run_cmd = app.add_subcommand("run", "run the sampler and write sample/diagnostics files");
  add_common(run_cmd, run_opts, true);

  auto* scan_cmd = app.add_subcommand("ess-scan", "scan kappa on a fixed instrumental chain");
  add_common(scan_cmd, scan_opts, true);

  auto* bench_cmd =
      app.add_subcommand("bench", "compare IMC, IS, independence MH and OSR on shared draws");
  add_common(bench_cmd, bench_opts, true);

  auto* verify_cmd = app.add_subcommand("verify", "exact finite-state checks on random specs");
  add_common(verify_cmd, verify_opts, false);
  int verify_m = 4;
  int verify_n_max = 3;
  int verify_lags = 60;
  std::vector<std::uint64_t> verify_seeds;
  bool verify_reducible = false;
  double tol_invariance = -1.0, tol_marginal = -1.0, tol_agreement = -1.0;
  verify_cmd->add_option("--m", verify_m, "number of base states");
  verify_cmd->add_option("--n-max", verify_n_max, "replication support bound");
  verify_cmd->add_option("--seeds", verify_seeds, "spec seeds (default 1 2 3)");
  verify_cmd->add_option("--lags", verify_lags, "TV decay lags");
  verify_cmd->add_flag("--reducible", verify_reducible,
                       "probe the reducible spec (expected to fail with non_convergence)");
  verify_cmd->add_option("--tol-invariance", tol_invariance, "override invariance tolerance");
  verify_cmd->add_option("--tol-marginal", tol_marginal, "override marginal tolerance");
  verify_cmd->add_option("--tol-agreement", tol_agreement, "override agreement tolerance");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    imc_experiment* exp = make_experiment(run_opts);
    imc_report* report = nullptr;
    const imc_status status =
        imc_run(exp, run_opts.out_dir.empty() ? nullptr : run_opts.out_dir.c_str(), &report);
    imc_experiment_destroy(exp);
    return finish(status, report);
  }
  if (scan_cmd->parsed()) {
    imc_experiment* exp = make_experiment(scan_opts);
    imc_report* report = nullptr;
    const imc_status status = imc_ess_scan(
        exp, scan_opts.out_dir.empty() ? nullptr : scan_opts.out_dir.c_str(), &report);
    imc_experiment_destroy(exp);
    return finish(status, report);
  }
  if (bench_cmd->parsed()) {
    imc_experiment* exp = make_experiment(bench_opts);
    imc_report* report = nullptr;
    const imc_status status = imc_bench(
        exp, bench_opts.out_dir.empty() ? nullptr : bench_opts.out_dir.c_str(), &report);
    imc_experiment_destroy(exp);
    return finish(status, report);
  }

  // verify: args come from --config when given, explicit flags override
  nlohmann::json args = nlohmann::json::object();
  if (!verify_opts.config_path.empty()) {
    args = nlohmann::json::parse(read_file(verify_opts.config_path), nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
      std::cerr << "error: verify config is not a JSON object\n";
      return 2;
    }
  }
  if (verify_cmd->count("--m") > 0 || !args.contains("m")) args["m"] = verify_m;
  if (verify_cmd->count("--n-max") > 0 || !args.contains("n_max")) args["n_max"] = verify_n_max;
  if (verify_cmd->count("--lags") > 0 || !args.contains("tv_lags")) args["tv_lags"] = verify_lags;
  if (!verify_seeds.empty()) args["seeds"] = verify_seeds;
  if (verify_reducible) args["reducible"] = true;
  if (tol_invariance > 0.0) args["tolerances"]["invariance"] = tol_invariance;
  if (tol_marginal > 0.0) args["tolerances"]["marginal"] = tol_marginal;
  if (tol_agreement > 0.0) args["tolerances"]["agreement"] = tol_agreement;

  imc_report* report = nullptr;
  const imc_status status = imc_verify(
      args.dump().c_str(), verify_opts.out_dir.empty() ? nullptr : verify_opts.out_dir.c_str(),
      &report);
  return finish(status, report);
}
