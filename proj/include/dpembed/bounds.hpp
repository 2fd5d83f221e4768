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

#ifndef DPEMBED_BOUNDS_HPP_
#define DPEMBED_BOUNDS_HPP_

#include <cstdint>
#include <string>

#include "dpembed/embedding.hpp"

namespace dpembed {

// Inputs shared by the error-bound formulas. The embedding difference
// a = mu(target) - mu(synthetic) enters only through its part-wise squared
// norms; norm_bound is B = sup_x ||Phi(x)||; mmd_hat_at_optimum is the
// (non-squared) MMD reached by the non-private minimizer, used by the
// optimistic gap bound.
struct BoundInputs {
  NoiseCovariance cov;
  double mmd1_squared = 0.0;
  double mmd2_squared = 0.0;
  double norm_bound = 1.0;
  double rho = 0.05;
  double mmd_hat_at_optimum = 0.0;
};

// Bound on E |private - non-private| squared-MMD error:
//   Tr(S) + 2 sqrt(2/pi) ||S^{1/2} a||.
double expected_abs_error_bound(const BoundInputs& inputs);

// With probability >= 1 - rho,
//   |error| <= Tr(S) + sqrt(2/pi) ||S^{1/2}a||
//            + 2 (||S||_F + sqrt(2) ||S^{1/2}a||) sqrt(log(2/rho))
//            + 2 ||S||_op log(2/rho).
double high_prob_error_bound(const BoundInputs& inputs);

// Uniform over all dataset pairs (||a|| <= 2B):
//   Tr(S) + 4B sqrt(Tr(S))
//   + 2 (||S||_F + 2B ||S||_op^{1/2}) sqrt(log(2/rho))
//   + 2 ||S||_op log(2/rho).
double uniform_error_bound(const BoundInputs& inputs);

// Gap of the private minimizer against the non-private one: twice the
// uniform bound.
double minimizer_gap_bound(const BoundInputs& inputs);

// Interpolation-friendly gap bound, tight when the generator can nearly
// match the target embedding (M = mmd_hat_at_optimum):
//   9 Tr(S) + 4 sqrt(Tr(S)) M
//   + 2 (9 ||S||_F + 2 sqrt(2 ||S||_op) M) sqrt(log(2/rho))
//   + 18 ||S||_op log(2/rho).
double optimistic_gap_bound(const BoundInputs& inputs);

enum class BoundKind {
  kExpectedAbsError,
  kHighProbError,
};

// Empirical check of a bound by direct noise simulation. Per draw,
// |error| = |n.n + 2 n.a| with n ~ N(0, S); per-draw RNG streams come from
// counter-based seed splitting, so reports are reproducible and draws can
// be evaluated in any order.
struct MonteCarloReport {
  std::string bound_name;
  double bound_value = 0.0;
  // Mean |error| for the expected-error bound; violation rate for the
  // high-probability bound.
  double empirical_statistic = 0.0;
  // Sampling tolerance: 3 standard errors of the mean, or the 3-sigma
  // binomial band rho + 3 sqrt(rho (1-rho) / N).
  double allowed_statistic = 0.0;
  double margin = 0.0;  // allowed_statistic - empirical_statistic
  bool pass = false;
  int draws = 0;
};

MonteCarloReport monte_carlo_verify(BoundKind kind, const BoundInputs& inputs,
                                    int draws, std::uint64_t seed);

}  // namespace dpembed

#endif  // DPEMBED_BOUNDS_HPP_
