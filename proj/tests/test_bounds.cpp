// Copyright 2026 The dp_embed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dpembed/bounds.hpp"
#include "dpembed/rng.hpp"

using dpembed::BoundInputs;
using dpembed::BoundKind;
using dpembed::expected_abs_error_bound;
using dpembed::high_prob_error_bound;
using dpembed::minimizer_gap_bound;
using dpembed::monte_carlo_verify;
using dpembed::MonteCarloReport;
using dpembed::NoiseCovariance;
using dpembed::optimistic_gap_bound;
using dpembed::Rng;
using dpembed::uniform_error_bound;

namespace {

// One-moment covariance with base 4 sigma^2 / m^2 = 1, so trace, Frobenius
// and operator norms are all exactly 1 at D = 1.
BoundInputs unit_terms_inputs() {
  BoundInputs in;
  in.cov.sigma = 1.0;
  in.cov.m = 2;
  in.cov.dim = 1;
  in.cov.moments = 1;
  in.mmd1_squared = 1.0;  // ||Sigma^{1/2} a|| = (2*1/2) * 1 = 1
  in.rho = 2.0 / std::numbers::e;  // log(2/rho) = 1
  return in;
}

BoundInputs zero_sigma_inputs() {
  BoundInputs in;
  in.cov.sigma = 0.0;
  in.cov.m = 10;
  in.cov.dim = 5;
  in.cov.moments = 2;
  in.mmd1_squared = 3.0;
  in.mmd2_squared = 1.5;
  return in;
}

BoundInputs random_inputs(Rng& rng) {
  BoundInputs in;
  in.cov.sigma = 0.05 + std::abs(rng.gaussian());
  in.cov.m = 2 + (std::int64_t)(rng.uniform() * 500);
  in.cov.dim = 1 + (Eigen::Index)(rng.uniform() * 32);
  in.cov.moments = rng.uniform() < 0.5 ? 1 : 2;
  in.mmd1_squared = rng.uniform() * 2.0;
  in.mmd2_squared = in.cov.moments == 2 ? rng.uniform() * 2.0 : 0.0;
  in.norm_bound = in.cov.moments == 2 ? std::sqrt(2.0) : 1.0;
  in.rho = 0.01 + rng.uniform() * 0.5;
  return in;
}

}  // namespace

TEST_CASE("expected absolute error bound plug-in values") {
  CHECK(expected_abs_error_bound(zero_sigma_inputs()) == 0.0);

  BoundInputs no_a;
  no_a.cov.sigma = 1.0;
  no_a.cov.m = 10;
  no_a.cov.dim = 5;
  no_a.cov.moments = 1;
  CHECK(expected_abs_error_bound(no_a) == 0.2);

  // Trace 0.2 plus a unit ||Sigma^{1/2} a||: 0.2 + 2 sqrt(2/pi).
  BoundInputs with_a = no_a;
  with_a.mmd1_squared = 25.0;  // (2/10) * sqrt(25) = 1
  const double expect = 0.2 + 2.0 * std::sqrt(2.0 / std::numbers::pi);
  CHECK(expected_abs_error_bound(with_a) ==
        doctest::Approx(expect).epsilon(1e-15));
  CHECK(expected_abs_error_bound(with_a) ==
        doctest::Approx(1.7957691216057308).epsilon(1e-15));
}

TEST_CASE("high probability bound plug-in values") {
  CHECK(high_prob_error_bound(zero_sigma_inputs()) == 0.0);

  // All covariance terms and ||Sigma^{1/2} a|| equal 1, log(2/rho) = 1:
  // 1 + sqrt(2/pi) + 2 (1 + sqrt(2)) + 2.
  BoundInputs in = unit_terms_inputs();
  const double expect = 1.0 + std::sqrt(2.0 / std::numbers::pi) +
                        2.0 * (1.0 + std::sqrt(2.0)) + 2.0;
  CHECK(high_prob_error_bound(in) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(high_prob_error_bound(in) ==
        doctest::Approx(8.626311685549056).epsilon(1e-15));

  // Monotone nonincreasing in rho.
  double prev = high_prob_error_bound(in);
  for (double rho : {0.1, 0.2, 0.4, 0.6, 0.9}) {
    BoundInputs cur = in;
    cur.rho = rho;
    const double value = high_prob_error_bound(cur);
    if (rho > 2.0 / std::numbers::e) CHECK(value <= prev);
    prev = value;
  }

  BoundInputs bad = in;
  bad.rho = 0.0;
  CHECK_THROWS_AS(high_prob_error_bound(bad), std::domain_error);
  bad.rho = 1.0;
  CHECK_THROWS_AS(high_prob_error_bound(bad), std::domain_error);
  bad.rho = -0.5;
  CHECK_THROWS_AS(high_prob_error_bound(bad), std::domain_error);
}

TEST_CASE("uniform bound plug-in values") {
  BoundInputs zero = zero_sigma_inputs();
  zero.norm_bound = std::sqrt(2.0);
  CHECK(uniform_error_bound(zero) == 0.0);

  // Unit covariance terms, log(2/rho) = 1, B = 1:
  // 1 + 4 + 2 (1 + 2) + 2 = 13.
  BoundInputs in = unit_terms_inputs();
  in.norm_bound = 1.0;
  CHECK(uniform_error_bound(in) == doctest::Approx(13.0).epsilon(1e-15));

  // B = sqrt(2): 1 + 4 sqrt(2) + 2 (1 + 2 sqrt(2)) + 2 = 5 + 8 sqrt(2).
  BoundInputs two = in;
  two.norm_bound = std::sqrt(2.0);
  CHECK(uniform_error_bound(two) ==
        doctest::Approx(5.0 + 8.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(uniform_error_bound(two) > uniform_error_bound(in));

  BoundInputs bad = in;
  bad.norm_bound = 0.0;
  CHECK_THROWS_AS(uniform_error_bound(bad), std::domain_error);
}

TEST_CASE("minimizer gap is exactly twice the uniform bound") {
  BoundInputs zero = zero_sigma_inputs();
  CHECK(minimizer_gap_bound(zero) == 0.0);

  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    BoundInputs in = random_inputs(rng);
    CHECK(minimizer_gap_bound(in) == 2.0 * uniform_error_bound(in));
  }
}

TEST_CASE("optimistic gap bound plug-in values") {
  BoundInputs zero = zero_sigma_inputs();
  zero.mmd_hat_at_optimum = 0.0;
  CHECK(optimistic_gap_bound(zero) == 0.0);

  // Unit covariance terms, log(2/rho) = 1, M = 0: 9 + 18 + 18 = 45; the
  // linear-in-a term is absent when the optimum interpolates.
  BoundInputs in = unit_terms_inputs();
  in.mmd_hat_at_optimum = 0.0;
  CHECK(optimistic_gap_bound(in) == doctest::Approx(45.0).epsilon(1e-15));

  // M = 2 adds 4 sqrt(Tr) M and 2 * 2 sqrt(2 op) M sqrt(log):
  // 45 + 8 + 8 sqrt(2) = 53 + 8 sqrt(2).
  BoundInputs with_m = in;
  with_m.mmd_hat_at_optimum = 2.0;
  CHECK(optimistic_gap_bound(with_m) ==
        doctest::Approx(53.0 + 8.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(optimistic_gap_bound(with_m) ==
        doctest::Approx(64.31370849898476).epsilon(1e-14));

  BoundInputs bad = in;
  bad.mmd_hat_at_optimum = -1.0;
  CHECK_THROWS_AS(optimistic_gap_bound(bad), std::domain_error);
}

TEST_CASE("bounds vanish at sigma zero and grow with sigma") {
  Rng rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    BoundInputs base = random_inputs(rng);
    base.mmd_hat_at_optimum = rng.uniform();

    BoundInputs at_zero = base;
    at_zero.cov.sigma = 0.0;
    CHECK(expected_abs_error_bound(at_zero) == 0.0);
    CHECK(high_prob_error_bound(at_zero) == 0.0);
    CHECK(uniform_error_bound(at_zero) == 0.0);
    CHECK(minimizer_gap_bound(at_zero) == 0.0);
    CHECK(optimistic_gap_bound(at_zero) == 0.0);

    double prev_e = 0.0, prev_h = 0.0, prev_u = 0.0, prev_g = 0.0,
           prev_o = 0.0;
    for (double sigma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      BoundInputs cur = base;
      cur.cov.sigma = sigma;
      const double e = expected_abs_error_bound(cur);
      const double h = high_prob_error_bound(cur);
      const double u = uniform_error_bound(cur);
      const double g = minimizer_gap_bound(cur);
      const double o = optimistic_gap_bound(cur);
      CHECK(e >= prev_e);
      CHECK(h >= prev_h);
      CHECK(u >= prev_u);
      CHECK(g >= prev_g);
      CHECK(o >= prev_o);
      prev_e = e;
      prev_h = h;
      prev_u = u;
      prev_g = g;
      prev_o = o;
    }
  }
}

TEST_CASE("high-probability bound dominates the expected bound for small rho") {
  Rng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    BoundInputs in = random_inputs(rng);
    in.rho = 0.01 + rng.uniform() * (2.0 / std::numbers::e - 0.01);
    CHECK(high_prob_error_bound(in) >= expected_abs_error_bound(in));
  }
}

TEST_CASE("monte carlo with zero sigma trivially passes") {
  BoundInputs in = zero_sigma_inputs();
  in.rho = 0.05;
  MonteCarloReport mean_report =
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 1000, 1);
  CHECK(mean_report.bound_name == "expected_abs_error");
  CHECK(mean_report.bound_value == 0.0);
  CHECK(mean_report.empirical_statistic == 0.0);
  CHECK(mean_report.pass);

  MonteCarloReport rate_report =
      monte_carlo_verify(BoundKind::kHighProbError, in, 1000, 1);
  CHECK(rate_report.bound_name == "high_prob_error");
  CHECK(rate_report.empirical_statistic == 0.0);
  CHECK(rate_report.pass);
}

TEST_CASE("monte carlo mean approaches the trace when a is zero") {
  // E[n.n] = Tr(Sigma) = 0.2 exactly, so the expected-error bound is met
  // with equality up to sampling error.
  BoundInputs in;
  in.cov.sigma = 1.0;
  in.cov.m = 10;
  in.cov.dim = 5;
  in.cov.moments = 1;
  MonteCarloReport report =
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 10000, 7);
  CHECK(report.bound_value == 0.2);
  CHECK(std::abs(report.empirical_statistic - 0.2) <= 0.03 * 0.2);
  CHECK(report.allowed_statistic > report.bound_value);
  CHECK(report.pass);
  CHECK(report.draws == 10000);
}

TEST_CASE("monte carlo violation rate stays inside the binomial band") {
  BoundInputs in;
  in.cov.sigma = 0.8;
  in.cov.m = 20;
  in.cov.dim = 8;
  in.cov.moments = 2;
  in.mmd1_squared = 0.7;
  in.mmd2_squared = 0.4;
  in.rho = 0.05;
  MonteCarloReport report =
      monte_carlo_verify(BoundKind::kHighProbError, in, 10000, 11);
  const double band = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 10000.0);
  CHECK(report.allowed_statistic == doctest::Approx(band).epsilon(1e-15));
  CHECK(report.empirical_statistic <= band);
  CHECK(report.pass);
}

TEST_CASE("monte carlo verifies both bounds on random instances") {
  Rng rng(74);
  for (int trial = 0; trial < 10; ++trial) {
    BoundInputs in = random_inputs(rng);
    in.rho = 0.05;
    MonteCarloReport mean_report = monte_carlo_verify(
        BoundKind::kExpectedAbsError, in, 10000, (std::uint64_t)trial);
    CHECK(mean_report.pass);
    MonteCarloReport rate_report = monte_carlo_verify(
        BoundKind::kHighProbError, in, 10000, (std::uint64_t)(trial + 100));
    CHECK(rate_report.pass);
  }
}

TEST_CASE("monte carlo reports are deterministic in the seed") {
  BoundInputs in;
  in.cov.sigma = 1.5;
  in.cov.m = 25;
  in.cov.dim = 6;
  in.cov.moments = 2;
  in.mmd1_squared = 0.5;
  in.mmd2_squared = 0.25;
  in.rho = 0.05;
  MonteCarloReport a =
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 2000, 99);
  MonteCarloReport b =
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 2000, 99);
  CHECK(a.empirical_statistic == b.empirical_statistic);
  CHECK(a.allowed_statistic == b.allowed_statistic);
  MonteCarloReport c =
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 2000, 100);
  CHECK(a.empirical_statistic != c.empirical_statistic);
}

TEST_CASE("monte carlo input validation") {
  BoundInputs in = unit_terms_inputs();
  CHECK_THROWS_AS(
      monte_carlo_verify(BoundKind::kExpectedAbsError, in, 999, 0),
      std::domain_error);
  CHECK_THROWS_AS(
      monte_carlo_verify(static_cast<BoundKind>(42), in, 1000, 0),
      std::domain_error);
}
