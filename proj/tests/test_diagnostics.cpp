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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "imc/diagnostics.hpp"
#include "imc/engine.hpp"
#include "imc/finite.hpp"
#include "imc/rng.hpp"
#include "test_util.hpp"

using imc::errc;
using imc::RandomSource;
using imc_test::thrown_code;

namespace {

imc::FiniteChainSpec iid_rows_spec(int m, std::uint64_t seed) {
  // Q with every row equal to pi_tilde: the i.i.d. chain
  imc::FiniteChainSpec spec = imc::make_random_spec(m, 3, seed);
  for (int i = 0; i < m; ++i) spec.Q.row(i) = spec.pi_tilde.transpose();
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("effective sample sizes") {
  SUBCASE("ess_kappa worked examples") {
    const std::vector<long long> uniform{1, 1, 1, 1};
    CHECK(imc::ess_kappa(uniform) == doctest::Approx(4.0));
    const std::vector<long long> single{2, 0, 0, 0};
    CHECK(imc::ess_kappa(single) == doctest::Approx(1.0));
    const std::vector<long long> mixed{1, 2, 1};
    CHECK(imc::ess_kappa(mixed) == doctest::Approx(16.0 / 6.0).epsilon(1e-14));
    const std::vector<long long> zeros{0, 0};
    CHECK(thrown_code([&] { imc::ess_kappa(zeros); }) == errc::empty_chain);
  }
  SUBCASE("ess_is worked examples") {
    const std::vector<double> uniform(7, 0.3);
    CHECK(imc::ess_is(uniform) == doctest::Approx(7.0).epsilon(1e-13));
    const std::vector<double> one{0.0, 2.0, 0.0};
    CHECK(imc::ess_is(one) == doctest::Approx(1.0));
    const std::vector<double> skew{1.0, 3.0};
    CHECK(imc::ess_is(skew) == doctest::Approx(1.6).epsilon(1e-14));
    const std::vector<double> zeros(3, 0.0);
    CHECK(thrown_code([&] { imc::ess_is(zeros); }) == errc::all_zero_weights);
  }
  SUBCASE("Cauchy-Schwarz range and zero-append invariance") {
    RandomSource rng(1, 0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<long long> counts(100);
      long long positive = 0;
      for (auto& c : counts) {
        c = static_cast<long long>(rng.uniform() * 5.0);
        positive += c > 0 ? 1 : 0;
      }
      if (positive == 0) continue;
      const double ess = imc::ess_kappa(counts);
      CHECK(ess >= 1.0 - 1e-12);
      CHECK(ess <= static_cast<double>(positive) + 1e-12);
      std::vector<long long> padded = counts;
      padded.insert(padded.end(), 17, 0);
      CHECK(imc::ess_kappa(padded) == ess);
    }
  }
}

TEST_CASE("kappa scan") {
  RandomSource rng(2, 0);
  SUBCASE("integer kappa*w gives deterministic counts and full ESS") {
    const std::vector<double> w(50, 0.5);
    const std::vector<double> kappas{2.0, 4.0, 6.0};
    const auto rows = imc::kappa_scan(w, kappas, rng);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].ess_kappa == doctest::Approx(50.0));
      CHECK(rows[i].chain_length == 50 * static_cast<long long>(kappas[i] * 0.5));
    }
  }
  SUBCASE("large kappa approaches the importance-sampling ESS") {
    std::vector<double> w(2000);
    for (double& v : w) v = 0.05 + rng.uniform();
    const double kappa_unit = imc::tune_kappa(w, 1.0);
    const std::vector<double> kappas{kappa_unit * 2000.0};
    const auto rows = imc::kappa_scan(w, kappas, rng);
    const double target = imc::ess_is(w);
    CHECK(std::abs(rows[0].ess_kappa / target - 1.0) < 0.02);
  }
  SUBCASE("chain length regresses linearly on kappa with slope sum(w)") {
    std::vector<double> w(1000);
    double total = 0.0;
    for (double& v : w) {
      v = 0.1 + rng.uniform();
      total += v;
    }
    std::vector<double> kappas, lengths;
    for (int i = 1; i <= 12; ++i) kappas.push_back(0.5 * i);
    const auto rows = imc::kappa_scan(w, kappas, rng);
    for (const auto& row : rows) lengths.push_back(static_cast<double>(row.chain_length));
    const auto fit = imc_test::least_squares(kappas, lengths);
    CHECK(fit.r2 > 0.999);
    CHECK(fit.slope == doctest::Approx(total).epsilon(0.02));
    CHECK(std::abs(fit.intercept) < 0.05 * total);
  }
}

TEST_CASE("poisson solve") {
  SUBCASE("zero rhs gives the zero solution") {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, 3);
    const Eigen::VectorXd H = imc::poisson_solve(spec, Eigen::VectorXd::Zero(4));
    CHECK(H.lpNorm<Eigen::Infinity>() < 1e-14);
  }
  SUBCASE("iid chain solves to H = f") {
    const imc::FiniteChainSpec spec = iid_rows_spec(4, 5);
    Eigen::VectorXd f(4);
    f << 1.0, -2.0, 0.5, 3.0;
    f.array() -= spec.pi_tilde.dot(f);  // center
    const Eigen::VectorXd H = imc::poisson_solve(spec, f);
    CHECK((H - f).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("uncentered rhs is rejected") {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, 3);
    CHECK(thrown_code([&] { imc::poisson_solve(spec, Eigen::VectorXd::Ones(4)); }) ==
          errc::mean_not_zero);
  }
  SUBCASE("reducible chain is refused") {
    const imc::FiniteChainSpec spec = imc::make_reducible_spec();
    CHECK(thrown_code([&] { imc::poisson_solve(spec, Eigen::VectorXd::Zero(2)); }) ==
          errc::singular_system);
  }
  SUBCASE("residual and truncated Neumann series oracle") {
    RandomSource rng(4, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, 100 + trial);
      Eigen::VectorXd f(4);
      for (int i = 0; i < 4; ++i) f[i] = rng.normal();
      f.array() -= spec.pi_tilde.dot(f);

      imc::PoissonInfo info;
      const Eigen::VectorXd H = imc::poisson_solve(spec, f, &info);
      CHECK(info.residual < 1e-10);
      CHECK(std::abs(spec.pi_tilde.dot(H)) < 1e-12);

      // independent oracle: partial sums of sum_k Q^k f
      Eigen::VectorXd series = f;
      Eigen::VectorXd term = f;
      for (int k = 0; k < 4000; ++k) {
        term = spec.Q * term;
        series += term;
      }
      series.array() -= spec.pi_tilde.dot(series);
      CHECK((H - series).lpNorm<Eigen::Infinity>() < 1e-8);
    }
  }
}

TEST_CASE("plug-in CLT variance") {
  SUBCASE("pi = pi~ with integer rho has no replication variance") {
    imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, 7);
    spec.pi = spec.pi_tilde;
    spec.kappa = 1.0;
    spec.R_tilde.setZero();
    spec.R_tilde.col(1).setOnes();  // rho_kappa = 1 everywhere
    spec.validate();
    Eigen::VectorXd h(4);
    h << 1.0, -1.0, 2.0, 0.0;
    const auto report = imc::clt_variance_plugin(spec, h, 1.0);
    CHECK(report.sigma2_replication == 0.0);
    CHECK(report.sigma2_total == report.sigma2_instrumental);
    CHECK(report.sigma2_total > 0.0);
  }
  SUBCASE("constant h has zero variance") {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 3, 8);
    const auto report = imc::clt_variance_plugin(spec, Eigen::VectorXd::Constant(4, 3.5),
                                                 spec.kappa);
    CHECK(std::abs(report.sigma2_total) < 1e-20);
  }
  SUBCASE("decomposition holds exactly and both parts are nonnegative") {
    for (int seed = 20; seed < 30; ++seed) {
      const imc::FiniteChainSpec spec = imc::make_random_spec(5, 4, seed);
      Eigen::VectorXd h(5);
      h << 0.3, -1.2, 2.0, 0.7, -0.4;
      const auto report = imc::clt_variance_plugin(spec, h, spec.kappa);
      CHECK(report.sigma2_total == report.sigma2_instrumental + report.sigma2_replication);
      CHECK(report.sigma2_replication >= 0.0);
    }
  }
}

TEST_CASE("kappa_opt satisfies its variance bound") {
  for (int seed = 31; seed < 36; ++seed) {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 4, seed);
    Eigen::VectorXd h(4);
    h << 1.0, 0.0, -2.0, 0.5;
    const double kappa = imc::kappa_opt(spec, h);
    CHECK(kappa > 0.0);

    // the plug-in sigma^2 at kappa_opt respects the derived upper bound
    const auto report = imc::clt_variance_plugin(spec, h, kappa);
    const double sigma2_q = imc::clt_variance_plugin(spec, h, 1.0).sigma2_instrumental;
    const Eigen::VectorXd h0 = h.array() - spec.pi.dot(h);
    const double h0_sq = spec.pi_tilde.dot(h0.cwiseProduct(h0));
    CHECK(kappa == doctest::Approx(0.5 * std::sqrt(h0_sq / sigma2_q)).epsilon(1e-12));
    CHECK(report.sigma2_total <= std::sqrt(h0_sq * sigma2_q) + 1e-12);
  }
  SUBCASE("constant h degenerates") {
    const imc::FiniteChainSpec spec = imc::make_random_spec(4, 4, 40);
    CHECK(thrown_code([&] { imc::kappa_opt(spec, Eigen::VectorXd::Ones(4)); }) ==
          errc::degenerate_variance);
  }
}

TEST_CASE("empirical mse") {
  SUBCASE("a deterministic exact estimator has zero mse") {
    CHECK(imc::empirical_mse([](RandomSource&) { return 1.5; }, 1.5, 10, 1) == 0.0);
  }
  SUBCASE("gaussian estimates concentrate at the variance") {
    const int reps = 2000;
    const double mse =
        imc::empirical_mse([](RandomSource& rng) { return rng.normal(); }, 0.0, reps, 2, 4);
    CHECK(std::abs(mse - 1.0) < 4.0 * std::sqrt(2.0 / reps));
  }
  SUBCASE("threaded and serial runs agree exactly") {
    auto est = [](RandomSource& rng) { return rng.normal() + rng.uniform(); };
    CHECK(imc::empirical_mse(est, 0.3, 64, 7, 1) == imc::empirical_mse(est, 0.3, 64, 7, 8));
  }
}

TEST_CASE("batch means variance tracks iid variance") {
  RandomSource rng(5, 0);
  std::vector<double> xs(100000);
  for (double& x : xs) x = rng.normal();
  const double bm = imc::batch_means_variance(xs, 50);
  CHECK(bm == doctest::Approx(1.0).epsilon(0.35));
}
