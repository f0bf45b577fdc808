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

// End-to-end acceptance suite: one self-contained check per shipped claim,
// each printing a single PASS/FAIL line. Exit status is nonzero if any check
// fails. Statistical gates run on pinned seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "imc/capi.h"
#include "imc/diagnostics.hpp"
#include "imc/engine.hpp"
#include "imc/errors.hpp"
#include "imc/finite.hpp"
#include "imc/kernels.hpp"
#include "imc/model.hpp"
#include "imc/oracle.hpp"
#include "imc/replication.hpp"
#include "imc/runner.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

int g_failures = 0;

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d %-28s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

template <typename Fn>
void run_criterion(int id, const std::string& name, Fn&& fn) {
  const auto start = clock_type::now();
  bool pass = false;
  std::string detail;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(clock_type::now() - start).count();
  report(id, name, pass, detail, seconds);
}

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double max_residual = 0.0;
};

LinFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LinFit f;
  const double denom = n * sxx - sx * sx;
  f.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
    ss_tot += (ys[i] - sy / n) * (ys[i] - sy / n);
    f.max_residual = std::max(f.max_residual, std::abs(r));
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

/// The 50 random desk-scale specs shared by criteria 1 and 2.
std::vector<imc::FiniteChainSpec> shared_specs() {
  std::vector<imc::FiniteChainSpec> specs;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int m = 2 + static_cast<int>(seed % 5);
    const int n_max = 1 + static_cast<int>(seed % 4);
    specs.push_back(imc::make_random_spec(m, n_max, seed));
  }
  return specs;
}

bool criterion_invariance(std::string& detail) {
  double worst_inv = 0.0, worst_marg = 0.0, worst_nu = 0.0;
  for (const auto& spec : shared_specs()) {
    const Eigen::MatrixXd S = imc::s_matrix(spec);
    Eigen::VectorXd nu = spec.rho_accept().cwiseProduct(spec.pi_tilde);
    nu /= nu.sum();
    worst_nu = std::max(worst_nu, ((nu.transpose() * S).transpose() - nu).lpNorm<1>());

    const Eigen::MatrixXd P = imc::p_matrix(spec);
    const Eigen::VectorXd bar_pi = imc::bar_pi_closed_form(spec);
    worst_inv =
        std::max(worst_inv, ((bar_pi.transpose() * P).transpose() - bar_pi).lpNorm<1>());
    worst_marg =
        std::max(worst_marg, (imc::first_marginal(spec, bar_pi) - spec.pi).lpNorm<1>());
  }
  std::ostringstream os;
  os << "max |bar_pi P - bar_pi| = " << worst_inv << ", max |marg - pi| = " << worst_marg
     << ", max |nu S - nu| = " << worst_nu << " over 50 specs";
  detail = os.str();
  return worst_inv <= 1e-10 && worst_marg <= 1e-10 && worst_nu <= 1e-10;
}

bool criterion_uniqueness(std::string& detail) {
  double worst = 0.0;
  for (const auto& spec : shared_specs()) {
    const auto stat = imc::stationary(imc::p_matrix(spec));
    worst = std::max(worst, (stat.distribution - imc::bar_pi_closed_form(spec)).lpNorm<1>());
  }
  bool reducible_flagged = false;
  try {
    imc::stationary(imc::p_matrix(imc::make_reducible_spec()));
  } catch (const imc::Error& e) {
    reducible_flagged = e.code() == imc::errc::non_convergence;
  }
  std::ostringstream os;
  os << "max |power - closed form| = " << worst
     << (reducible_flagged ? ", reducible spec raised NonConvergence"
                           : ", reducible spec NOT flagged");
  detail = os.str();
  return worst <= 1e-10 && reducible_flagged;
}

bool criterion_tv_decay(std::string& detail) {
  int used = 0;
  double worst_slope = -1e9, worst_residual = 0.0;
  std::uint64_t seed = 200;
  while (used < 20 && seed < 400) {
    const int m = 2 + static_cast<int>(seed % 5);
    const int n_max = 1 + static_cast<int>(seed % 4);
    const imc::FiniteChainSpec spec = imc::make_random_spec(m, n_max, seed++);
    const Eigen::MatrixXd P = imc::p_matrix(spec);
    const Eigen::VectorXd bar_pi = imc::bar_pi_closed_form(spec);
    int x0 = 0;
    spec.pi_tilde.minCoeff(&x0);
    Eigen::VectorXd xi0 = Eigen::VectorXd::Zero(P.rows());
    xi0[imc::augmented_index(spec, x0, spec.n_max)] = 1.0;
    const auto tv = imc::tv_decay(P, xi0, bar_pi, 60);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < tv.size(); ++k) {
      if (tv[k] < 1e-11) break;
      xs.push_back(static_cast<double>(k + 1));
      ys.push_back(std::log(tv[k]));
    }
    if (xs.size() < 31) continue;  // geometric regime too short to fit 30 lags
    ++used;
    std::vector<double> xw(xs.end() - 30, xs.end());
    std::vector<double> yw(ys.end() - 30, ys.end());
    const LinFit fit = least_squares(xw, yw);
    worst_slope = std::max(worst_slope, fit.slope);
    worst_residual = std::max(worst_residual, fit.max_residual);
  }
  std::ostringstream os;
  os << used << " specs, worst slope = " << worst_slope
     << ", worst residual = " << worst_residual;
  detail = os.str();
  return used == 20 && worst_slope < -1e-3 && worst_residual <= 0.5;
}

bool criterion_variance_floor(std::string& detail) {
  imc::RandomSource rho_rng(4001, 0);
  const imc::OptimalLaw optimal;
  const imc::OsrLaw osr;
  double worst_gap = 0.0;
  double min_slack = 1e9;
  for (int trial = 0; trial < 100; ++trial) {
    const double rho = 20.0 * rho_rng.uniform();
    const double frac = rho - std::floor(rho);
    const double bound = frac * (1.0 - frac);

    // exact variance from the analytic pmf
    const int n_max = static_cast<int>(std::ceil(rho)) + 1;
    const auto pmf = optimal.pmf(rho, n_max);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      mean += static_cast<double>(n) * pmf[n];
      m2 += static_cast<double>(n * n) * pmf[n];
    }
    worst_gap = std::max(worst_gap, std::abs(m2 - mean * mean - bound));

    // OSR empirical variance must not undercut the bound
    imc::RandomSource draw_rng(4002, static_cast<std::uint64_t>(trial));
    const long n = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    std::vector<double> draws(n);
    for (long i = 0; i < n; ++i) {
      draws[i] = static_cast<double>(osr.draw(rho, draw_rng));
      s1 += draws[i];
    }
    const double emp_mean = s1 / n;
    for (long i = 0; i < n; ++i) {
      const double d = draws[i] - emp_mean;
      s2 += d * d;
      s4 += d * d * d * d;
    }
    const double var = s2 / (n - 1);
    const double se_var = std::sqrt(std::max(s4 / n - var * var, 0.0) / n);
    min_slack = std::min(min_slack, var - (bound - 3.0 * se_var));
  }
  std::ostringstream os;
  os << "max |pmf variance - frac(1-frac)| = " << worst_gap
     << ", min OSR slack over the bound = " << min_slack;
  detail = os.str();
  return worst_gap <= 1e-12 && min_slack >= 0.0;
}

bool criterion_unbiasedness(std::string& detail) {
  const long n = 1000000;
  const imc::OptimalLaw optimal;
  const imc::OsrLaw osr;
  const imc::BernoulliRejectionLaw bernoulli;
  double worst_sigmas = 0.0;

  auto mean_test = [&](const std::function<long long(imc::RandomSource&)>& draw, double rho,
                       double analytic_var, std::uint64_t stream) {
    imc::RandomSource rng(5001, stream);
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += static_cast<double>(draw(rng));
    const double mean = sum / static_cast<double>(n);
    if (analytic_var == 0.0) return mean == rho;
    const double se = std::sqrt(analytic_var / static_cast<double>(n));
    worst_sigmas = std::max(worst_sigmas, std::abs(mean - rho) / se);
    return std::abs(mean - rho) <= 4.0 * se;
  };

  bool all = true;
  std::uint64_t stream = 0;
  for (const double rho : {0.3, 1.0, 2.3, 7.9}) {
    all = all && mean_test([&](imc::RandomSource& r) { return optimal.draw(rho, r); }, rho,
                           optimal.variance(rho), stream++);
    all = all && mean_test([&](imc::RandomSource& r) { return osr.draw(rho, r); }, rho,
                           osr.variance(rho), stream++);
    if (rho <= 1.0) {  // the Bernoulli rejection law only exists on [0, 1]
      all = all && mean_test([&](imc::RandomSource& r) { return bernoulli.draw(rho, r); }, rho,
                             bernoulli.variance(rho), stream++);
    }
    // pseudo-marginal wrapper with the two-point estimator W in {.5,1.5}*pi_U
    const double pi_u = 2.0;
    const imc::UnbiasedEstimator two_point{[pi_u](std::span<const double>, imc::RandomSource& r) {
      return (r.uniform() < 0.5 ? 0.5 : 1.5) * pi_u;
    }};
    const double kappa = rho / pi_u;  // log pi~_U = 0
    auto frac = [](double v) { return v - std::floor(v); };
    const double lo = 0.5 * rho, hi = 1.5 * rho;
    const double pm_var = 0.25 * rho * rho + 0.5 * (frac(lo) * (1 - frac(lo)) +
                                                    frac(hi) * (1 - frac(hi)));
    const std::vector<double> x{0.0};
    all = all && mean_test(
                     [&](imc::RandomSource& r) {
                       return imc::draw_pseudo_marginal(x, kappa, 0.0, two_point, r);
                     },
                     rho, pm_var, stream++);
  }
  std::ostringstream os;
  os << "worst deviation = " << worst_sigmas << " standard errors (gate 4) at 1e6 draws";
  detail = os.str();
  return all;
}

bool criterion_clt_variance(std::string& detail) {
  const long long n = 20000;
  const int reps = 500;
  Eigen::VectorXd h(4);
  h << 1.0, -0.5, 2.0, 0.3;
  double worst = 0.0;
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, seed);
    const double plugin = imc::clt_variance_plugin(spec, h, spec.kappa).sigma2_total;
    const double empirical = imc::empirical_clt_variance(spec, h, spec.kappa, n, reps,
                                                         7000 + seed, hardware_threads());
    worst = std::max(worst, std::abs(empirical / plugin - 1.0));
  }
  std::ostringstream os;
  os << "max |empirical/plugin - 1| = " << worst << " over 5 specs (gate 0.15)";
  detail = os.str();
  return worst <= 0.15;
}

bool criterion_ess_limit(std::string& detail) {
  // fixed instrumental chain: tempered 4-mode mixture in 2-d under RWM
  const std::vector<std::vector<double>> modes{{5, 5}, {-5, 5}, {5, -5}, {-5, -5}};
  const imc::LogDensity target = imc::gaussian_mixture(2, modes);
  const double beta = 0.1;
  const imc::LogDensity instr = imc::tempered(target, beta);
  const imc::RwmKernel kernel(instr, 2.4 / std::sqrt(2.0 * beta));
  const imc::WeightFunction wf(1.0, target, instr);

  imc::RandomSource rng(6001, 0);
  const long n = 10000;
  const auto sample =
      imc::run_instrumental(kernel, wf, std::vector<double>{0.0, 0.0}, n, 500, rng);
  const double ess_is = imc::ess_is(sample.weights);
  const double kappa_unit = imc::tune_kappa(sample.weights, 1.0);

  std::vector<double> kappas;
  const double lo = 1e-2 * kappa_unit;
  const double hi = 1e3 * kappa_unit;  // mean counts 1e3 at the top
  for (int i = 0; i < 40; ++i) kappas.push_back(lo * std::pow(hi / lo, i / 39.0));
  const auto rows = imc::kappa_scan(sample.weights, kappas, rng);

  const double top_mean_counts =
      static_cast<double>(rows.back().chain_length) / static_cast<double>(n);
  const double ratio = rows.back().ess_kappa / ess_is;
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    xs.push_back(row.kappa);
    ys.push_back(static_cast<double>(row.chain_length));
  }
  const LinFit fit = least_squares(xs, ys);

  std::ostringstream os;
  os << "ESS_kappa/ESS_IS = " << ratio << " at mean counts " << top_mean_counts
     << ", length-vs-kappa R^2 = " << fit.r2;
  detail = os.str();
  return top_mean_counts >= 1e3 && std::abs(ratio - 1.0) <= 0.02 && fit.r2 > 0.999;
}

bool criterion_tempering_mse(std::string& detail) {
  const std::vector<std::vector<double>> modes{{5, 5}, {-5, 5}, {5, -5}, {-5, -5}};
  const imc::LogDensity target = imc::gaussian_mixture(2, modes);
  const int reps = 200;
  const long n = 4000, burn = 500;
  const imc::OptimalLaw law;

  auto mse_at = [&](double beta, std::uint64_t seed) {
    const imc::LogDensity instr = imc::tempered(target, beta);
    const imc::RwmKernel kernel(instr, 2.4 / std::sqrt(2.0 * beta));
    const imc::WeightFunction wf(1.0, target, instr);
    return imc::empirical_mse(
        [&](imc::RandomSource& rng) {
          auto s = imc::run_instrumental(kernel, wf, std::vector<double>{0.0, 0.0}, n, burn, rng);
          imc::draw_counts(s, law, imc::tune_kappa(s.weights, 1.0), rng);
          return imc::estimate_imc(s, [](std::span<const double> x) { return x[0]; }).first;
        },
        0.0, reps, seed, hardware_threads());
  };

  const double mse_01 = mse_at(0.10, 8001);
  const double mse_025 = mse_at(0.25, 8002);
  const double mse_1 = mse_at(1.00, 8003);
  std::ostringstream os;
  os << "MSE: beta 0.1 -> " << mse_01 << ", beta 0.25 -> " << mse_025 << ", beta 1 -> " << mse_1;
  detail = os.str();
  return mse_01 < mse_1 && mse_025 < mse_1;
}

bool criterion_bench(std::string& detail) {
  const double c = 2.0 / std::sqrt(5.0);
  nlohmann::json means = nlohmann::json::array();
  for (int mask = 0; mask < 32; ++mask) {
    nlohmann::json mu = nlohmann::json::array();
    for (int d = 0; d < 5; ++d) mu.push_back((mask >> d) & 1 ? c : -c);
    means.push_back(mu);
  }
  const nlohmann::json config = {
      {"target", {{"name", "ring_bimodal"}, {"dim", 5}}},
      {"instrumental", {{"name", "gaussian_mixture"}, {"means", means}, {"sigma", 0.35}}},
      {"kernel", {{"name", "iid"}}},
      {"law", {{"name", "optimal"}}},
      {"kappa", {{"policy", "tuned"}, {"alpha", 1.0}}},
      {"n_steps", 30000},
      {"replications", 30},
      {"seed", 901}};
  const imc::Report report = imc::bench_workflow(config, "", hardware_threads());
  const auto& rows = report.json.at("rows");
  const auto& imc_mse = rows.at(0).at("mse");
  const auto& is_mse = rows.at(1).at("mse");

  double lo_ratio = 1e9, hi_ratio = 0.0;
  for (const auto& [key, value] : imc_mse.items()) {
    const double ratio = value.get<double>() / is_mse.at(key).get<double>();
    lo_ratio = std::min(lo_ratio, ratio);
    hi_ratio = std::max(hi_ratio, ratio);
  }
  const double positive = rows.at(0).at("positive_copies_mean").get<double>();
  const double pos_ratio = positive / 30000.0;

  std::ostringstream os;
  os << "MSE_IMC/MSE_IS in [" << lo_ratio << ", " << hi_ratio << "], positive copies " << positive
     << " of 30000 (ratio " << pos_ratio << ")";
  detail = os.str();
  return lo_ratio >= 0.7 && hi_ratio <= 1.4 && positive < 30000.0 && pos_ratio >= 0.3 &&
         pos_ratio <= 0.8;
}

bool criterion_identity_collapse(std::string& detail) {
  const imc::LogDensity target = imc::std_gaussian(2);
  const imc::RwmKernel kernel(target, 1.4);
  const imc::WeightFunction wf(1.0, target, target);
  const imc::OptimalLaw law;
  const std::vector<double> x0{0.25, -0.75};

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    imc::RandomSource full_rng(seed, 0);
    const auto sample = imc::run_semi_markov(kernel, law, wf, x0, 1000, 0, full_rng);
    imc::RandomSource chain_rng(seed, 0);
    const auto chain_only = imc::run_instrumental(kernel, wf, x0, 1000, 0, chain_rng);
    if (sample.points != chain_only.points) {
      detail = "expanded chain differs from the instrumental chain at seed " +
               std::to_string(seed);
      return false;
    }
    for (const long long count : sample.counts) {
      if (count != 1) {
        detail = "count != 1 at seed " + std::to_string(seed);
        return false;
      }
    }
    // bit-wise identity of the expanded stream
    std::size_t i = 0;
    for (const auto state : imc::expand(sample)) {
      if (!std::equal(state.x.begin(), state.x.end(), sample.point(i).begin())) {
        detail = "expansion mismatch at seed " + std::to_string(seed);
        return false;
      }
      ++i;
    }
  }
  detail = "10 seeds, expanded chain == instrumental chain bit-wise";
  return true;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

bool criterion_cli_determinism(std::string& detail) {
  const std::filesystem::path work =
      std::filesystem::temp_directory_path() / "imc_acceptance_cli";
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);

  const std::string config = R"({
    "target": {"name": "gaussian_mixture", "dim": 2,
               "means": [[5,5],[-5,5],[5,-5],[-5,-5]]},
    "instrumental": {"name": "tempered", "beta": 0.1},
    "kernel": {"name": "rwm", "step_size": 5.4},
    "law": {"name": "optimal"},
    "kappa": {"policy": "tuned", "alpha": 1.0},
    "n_steps": 2000,
    "burn_in": 200,
    "seed": 42
  })";
  {
    std::ofstream os(work / "config.json");
    os << config;
  }

  auto invoke = [&](const std::string& args) {
    const std::string cmd = std::string(IMC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  const std::string cfg = (work / "config.json").string();
  for (const char* tag : {"a", "b"}) {
    const int rc = invoke("run --config " + cfg + " --out " + (work / ("run_" + std::string(tag))).string());
    if (rc != 0) {
      detail = "CLI run exited nonzero";
      return false;
    }
  }
  for (const char* tag : {"a", "b"}) {
    const int rc = invoke("ess-scan --config " + cfg + " --out " +
                          (work / ("scan_" + std::string(tag))).string());
    if (rc != 0) {
      detail = "CLI ess-scan exited nonzero";
      return false;
    }
  }
  for (const char* tag : {"a", "b"}) {
    const int rc = invoke("verify --m 4 --n-max 3 --seeds 1 2 3 --out " +
                          (work / ("verify_" + std::string(tag))).string());
    if (rc != 0) {
      detail = "CLI verify exited nonzero";
      return false;
    }
  }

  for (const char* name : {"sample.csv", "metadata.json", "diagnostics.json"}) {
    if (slurp(work / "run_a" / name) != slurp(work / "run_b" / name) ||
        slurp(work / "run_a" / name).empty()) {
      detail = std::string("run outputs differ or are empty: ") + name;
      return false;
    }
  }
  if (slurp(work / "scan_a" / "ess_scan.csv") != slurp(work / "scan_b" / "ess_scan.csv")) {
    detail = "ess-scan outputs differ";
    return false;
  }
  if (slurp(work / "verify_a" / "verify.json") != slurp(work / "verify_b" / "verify.json")) {
    detail = "verify outputs differ";
    return false;
  }
  std::filesystem::remove_all(work);
  detail = "run, ess-scan and verify are byte-identical across reruns";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite (%d worker threads where parallel)\n", hardware_threads());

  run_criterion(1, "invariance exactness", criterion_invariance);
  run_criterion(2, "uniqueness", criterion_uniqueness);
  run_criterion(3, "geometric TV decay", criterion_tv_decay);
  run_criterion(4, "optimal-law variance floor", criterion_variance_floor);
  run_criterion(5, "replication unbiasedness", criterion_unbiasedness);
  run_criterion(6, "plug-in CLT variance", criterion_clt_variance);
  run_criterion(7, "ESS kappa limit", criterion_ess_limit);
  run_criterion(8, "tempering MSE ordering", criterion_tempering_mse);
  run_criterion(9, "independent-proposal bench", criterion_bench);
  run_criterion(10, "identity collapse", criterion_identity_collapse);
  run_criterion(11, "CLI determinism", criterion_cli_determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
