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

#include "dpembed/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dpembed/rng.hpp"

namespace dpembed {
namespace {

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::domain_error("rho must lie in (0, 1)");
  }
}

double sigma_half_a(const BoundInputs& inputs) {
  return sigma_half_a_norm(inputs.cov, inputs.mmd1_squared,
                           inputs.mmd2_squared);
}

}  // namespace

double expected_abs_error_bound(const BoundInputs& inputs) {
  CovarianceTerms t = noise_covariance_terms(inputs.cov);
  return t.trace + 2.0 * std::sqrt(2.0 / std::numbers::pi) *
                       sigma_half_a(inputs);
}

double high_prob_error_bound(const BoundInputs& inputs) {
  check_rho(inputs.rho);
  CovarianceTerms t = noise_covariance_terms(inputs.cov);
  const double sa = sigma_half_a(inputs);
  const double log_term = std::log(2.0 / inputs.rho);
  return t.trace + std::sqrt(2.0 / std::numbers::pi) * sa +
         2.0 * (t.frobenius + std::sqrt(2.0) * sa) * std::sqrt(log_term) +
         2.0 * t.operator_norm * log_term;
}

double uniform_error_bound(const BoundInputs& inputs) {
  check_rho(inputs.rho);
  if (!(inputs.norm_bound > 0.0)) {
    throw std::domain_error("norm_bound must be > 0");
  }
  CovarianceTerms t = noise_covariance_terms(inputs.cov);
  const double log_term = std::log(2.0 / inputs.rho);
  const double b = inputs.norm_bound;
  return t.trace + 4.0 * b * std::sqrt(t.trace) +
         2.0 * (t.frobenius + 2.0 * b * std::sqrt(t.operator_norm)) *
             std::sqrt(log_term) +
         2.0 * t.operator_norm * log_term;
}

double minimizer_gap_bound(const BoundInputs& inputs) {
  return 2.0 * uniform_error_bound(inputs);
}

double optimistic_gap_bound(const BoundInputs& inputs) {
  check_rho(inputs.rho);
  if (!(inputs.mmd_hat_at_optimum >= 0.0)) {
    throw std::domain_error("mmd_hat_at_optimum must be >= 0");
  }
  CovarianceTerms t = noise_covariance_terms(inputs.cov);
  const double log_term = std::log(2.0 / inputs.rho);
  const double mmd_hat = inputs.mmd_hat_at_optimum;
  return 9.0 * t.trace + 4.0 * std::sqrt(t.trace) * mmd_hat +
         2.0 *
             (9.0 * t.frobenius +
              2.0 * std::sqrt(2.0 * t.operator_norm) * mmd_hat) *
             std::sqrt(log_term) +
         18.0 * t.operator_norm * log_term;
}

MonteCarloReport monte_carlo_verify(BoundKind kind, const BoundInputs& inputs,
                                    int draws, std::uint64_t seed) {
  if (draws < 1000) throw std::domain_error("draws must be >= 1000");
  const NoiseCovariance& cov = inputs.cov;
  // Validates the covariance fields as a side effect.
  noise_covariance_terms(cov);

  const double s1 = 2.0 * cov.c1 * cov.sigma / double(cov.m);
  const double s2 = 2.0 * cov.c2 * cov.sigma / double(cov.m);
  const double a1 = std::sqrt(inputs.mmd1_squared);
  const double a2 = std::sqrt(inputs.mmd2_squared);

  double bound_value = 0.0;
  switch (kind) {
    case BoundKind::kExpectedAbsError:
      bound_value = expected_abs_error_bound(inputs);
      break;
    case BoundKind::kHighProbError:
      bound_value = high_prob_error_bound(inputs);
      break;
    default:
      throw std::domain_error("unknown bound kind");
  }

  // The noise is isotropic within each part, so the error distribution
  // depends on a only through the part norms; align each part of a with
  // its first coordinate.
  double sum = 0.0;
  double sum_sq = 0.0;
  int violations = 0;
  for (int d = 0; d < draws; ++d) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(d)));
    double nn = 0.0;
    double na = 0.0;
    for (Eigen::Index i = 0; i < cov.dim; ++i) {
      double z = s1 * rng.gaussian();
      nn += z * z;
      if (i == 0) na += z * a1;
    }
    if (cov.moments == 2) {
      for (Eigen::Index i = 0; i < cov.dim; ++i) {
        double z = s2 * rng.gaussian();
        nn += z * z;
        if (i == 0) na += z * a2;
      }
    }
    const double err = std::abs(nn + 2.0 * na);
    sum += err;
    sum_sq += err * err;
    if (err > bound_value) ++violations;
  }

  MonteCarloReport report;
  report.bound_value = bound_value;
  report.draws = draws;
  const double n = double(draws);
  if (kind == BoundKind::kExpectedAbsError) {
    report.bound_name = "expected_abs_error";
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    const double std_err = std::sqrt(var / n);
    report.empirical_statistic = mean;
    report.allowed_statistic = bound_value + 3.0 * std_err;
  } else {
    report.bound_name = "high_prob_error";
    const double rate = double(violations) / n;
    report.empirical_statistic = rate;
    report.allowed_statistic =
        inputs.rho + 3.0 * std::sqrt(inputs.rho * (1.0 - inputs.rho) / n);
  }
  report.margin = report.allowed_statistic - report.empirical_statistic;
  report.pass = report.margin >= 0.0;
  return report;
}

}  // namespace dpembed
