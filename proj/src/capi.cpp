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

#include "imc/capi.h"

#include <json.hpp>
#include <memory>
#include <span>
#include <string>

#include "imc/diagnostics.hpp"
#include "imc/engine.hpp"
#include "imc/errors.hpp"
#include "imc/replication.hpp"
#include "imc/rng.hpp"
#include "imc/runner.hpp"

struct imc_experiment {
  nlohmann::json config;
  std::string config_text;
  int threads = 1;
};

struct imc_report {
  std::string json_text;
  int all_pass = 1;
};

namespace {

thread_local std::string g_last_error;

imc_status map_errc(imc::errc code) {
  using imc::errc;
  switch (code) {
    case errc::ok: return IMC_OK;
    case errc::config: return IMC_ERR_CONFIG;
    case errc::dimension_mismatch: return IMC_ERR_DIMENSION_MISMATCH;
    case errc::domination_violation: return IMC_ERR_DOMINATION_VIOLATION;
    case errc::non_finite_weight: return IMC_ERR_NON_FINITE_WEIGHT;
    case errc::invalid_beta: return IMC_ERR_INVALID_BETA;
    case errc::index_out_of_range: return IMC_ERR_INDEX_OUT_OF_RANGE;
    case errc::all_zero_weights: return IMC_ERR_ALL_ZERO_WEIGHTS;
    case errc::empty_chain: return IMC_ERR_EMPTY_CHAIN;
    case errc::singular_system: return IMC_ERR_SINGULAR_SYSTEM;
    case errc::mean_not_zero: return IMC_ERR_MEAN_NOT_ZERO;
    case errc::non_convergence: return IMC_ERR_NON_CONVERGENCE;
    case errc::zero_acceptance: return IMC_ERR_ZERO_ACCEPTANCE;
    case errc::support_too_small: return IMC_ERR_SUPPORT_TOO_SMALL;
    case errc::unsupported_law: return IMC_ERR_UNSUPPORTED_LAW;
    case errc::degenerate_variance: return IMC_ERR_DEGENERATE_VARIANCE;
    case errc::division_by_zero: return IMC_ERR_DIVISION_BY_ZERO;
    case errc::io: return IMC_ERR_IO;
    case errc::invalid_argument: return IMC_ERR_INVALID_ARGUMENT;
    case errc::unknown: return IMC_ERR_UNKNOWN;
  }
  return IMC_ERR_UNKNOWN;
}

template <typename Fn>
imc_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return IMC_OK;
  } catch (const imc::Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IMC_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return IMC_ERR_UNKNOWN;
  }
}

imc_status require_handle(const void* p, const char* what) {
  if (p) return IMC_OK;
  g_last_error = std::string(what) + " is null";
  return IMC_ERR_INVALID_ARGUMENT;
}

imc_report* make_report(const imc::Report& r) {
  auto* report = new imc_report;
  report->json_text = r.json.dump(2) + "\n";
  report->all_pass = r.all_pass ? 1 : 0;
  return report;
}

}  // namespace

extern "C" {

const char* imc_status_name(imc_status status) {
  switch (status) {
    case IMC_OK: return "ok";
    case IMC_ERR_CONFIG: return "config";
    case IMC_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case IMC_ERR_DOMINATION_VIOLATION: return "domination_violation";
    case IMC_ERR_NON_FINITE_WEIGHT: return "non_finite_weight";
    case IMC_ERR_INVALID_BETA: return "invalid_beta";
    case IMC_ERR_INDEX_OUT_OF_RANGE: return "index_out_of_range";
    case IMC_ERR_ALL_ZERO_WEIGHTS: return "all_zero_weights";
    case IMC_ERR_EMPTY_CHAIN: return "empty_chain";
    case IMC_ERR_SINGULAR_SYSTEM: return "singular_system";
    case IMC_ERR_MEAN_NOT_ZERO: return "mean_not_zero";
    case IMC_ERR_NON_CONVERGENCE: return "non_convergence";
    case IMC_ERR_ZERO_ACCEPTANCE: return "zero_acceptance";
    case IMC_ERR_SUPPORT_TOO_SMALL: return "support_too_small";
    case IMC_ERR_UNSUPPORTED_LAW: return "unsupported_law";
    case IMC_ERR_DEGENERATE_VARIANCE: return "degenerate_variance";
    case IMC_ERR_DIVISION_BY_ZERO: return "division_by_zero";
    case IMC_ERR_IO: return "io";
    case IMC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case IMC_ERR_UNKNOWN: return "unknown";
  }
  return "unknown";
}

const char* imc_last_error(void) { return g_last_error.c_str(); }

imc_status imc_experiment_create(const char* config_json, imc_experiment** out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(config_json, "config_json"); s != IMC_OK) return s;
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<imc_experiment>();
    exp->config = imc::parse_config_text(config_json);
    // validate eagerly so creation fails fast with the field path
    imc::build_experiment(exp->config);
    exp->config_text = exp->config.dump(2);
    *out = exp.release();
  });
}

void imc_experiment_destroy(imc_experiment* experiment) { delete experiment; }

imc_status imc_experiment_set_seed(imc_experiment* experiment, uint64_t seed) {
  if (const imc_status s = require_handle(experiment, "experiment"); s != IMC_OK) return s;
  return guarded([&] {
    experiment->config["seed"] = seed;
    experiment->config_text = experiment->config.dump(2);
  });
}

imc_status imc_experiment_set_threads(imc_experiment* experiment, int threads) {
  if (const imc_status s = require_handle(experiment, "experiment"); s != IMC_OK) return s;
  if (threads < 1) {
    g_last_error = "threads must be >= 1";
    return IMC_ERR_INVALID_ARGUMENT;
  }
  experiment->threads = threads;
  return IMC_OK;
}

const char* imc_experiment_config_json(const imc_experiment* experiment) {
  return experiment ? experiment->config_text.c_str() : "";
}

imc_status imc_run(imc_experiment* experiment, const char* out_dir, imc_report** out) {
  if (const imc_status s = require_handle(experiment, "experiment"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = make_report(
        imc::run_workflow(experiment->config, out_dir ? out_dir : "", experiment->threads));
  });
}

imc_status imc_ess_scan(imc_experiment* experiment, const char* out_dir, imc_report** out) {
  if (const imc_status s = require_handle(experiment, "experiment"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = make_report(
        imc::ess_scan_workflow(experiment->config, out_dir ? out_dir : "", experiment->threads));
  });
}

imc_status imc_bench(imc_experiment* experiment, const char* out_dir, imc_report** out) {
  if (const imc_status s = require_handle(experiment, "experiment"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = make_report(
        imc::bench_workflow(experiment->config, out_dir ? out_dir : "", experiment->threads));
  });
}

imc_status imc_verify(const char* args_json, const char* out_dir, imc_report** out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  *out = nullptr;
  return guarded([&] {
    const nlohmann::json args =
        args_json && *args_json ? imc::parse_config_text(args_json) : nlohmann::json::object();
    *out = make_report(imc::verify_workflow(args, out_dir ? out_dir : ""));
  });
}

const char* imc_report_json(const imc_report* report) {
  return report ? report->json_text.c_str() : "";
}

int imc_report_all_pass(const imc_report* report) { return report ? report->all_pass : 0; }

void imc_report_destroy(imc_report* report) { delete report; }

imc_status imc_ess_kappa(const int64_t* counts, size_t n, double* out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(counts, "counts"); s != IMC_OK) return s;
  return guarded([&] {
    static_assert(sizeof(long long) == sizeof(int64_t));
    *out = imc::ess_kappa(
        std::span<const long long>(reinterpret_cast<const long long*>(counts), n));
  });
}

imc_status imc_ess_is(const double* weights, size_t n, double* out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(weights, "weights"); s != IMC_OK) return s;
  return guarded([&] { *out = imc::ess_is(std::span<const double>(weights, n)); });
}

imc_status imc_tune_kappa(const double* weights, size_t n, double alpha, double* out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  if (const imc_status s = require_handle(weights, "weights"); s != IMC_OK) return s;
  return guarded([&] { *out = imc::tune_kappa(std::span<const double>(weights, n), alpha); });
}

imc_status imc_draw_optimal(double rho, uint64_t seed, uint64_t stream_id, size_t n,
                            int64_t* out) {
  if (const imc_status s = require_handle(out, "out"); s != IMC_OK) return s;
  return guarded([&] {
    imc::RandomSource rng(seed, stream_id);
    for (size_t i = 0; i < n; ++i) out[i] = imc::draw_optimal(rho, rng);
  });
}

}  // extern "C"
