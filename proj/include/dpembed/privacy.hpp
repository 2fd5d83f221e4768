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

#ifndef DPEMBED_PRIVACY_HPP_
#define DPEMBED_PRIVACY_HPP_

#include <vector>

namespace dpembed {

// One Gaussian release inside a composed privacy budget. The noise standard
// deviation of the release is base_sigma * noise_multiplier_ratio times its
// sensitivity; e.g. each mean-embedding part uses ratio 1 and the early
// stopping proxy uses ratio 10.
struct Release {
  double sensitivity = 1.0;
  double noise_multiplier_ratio = 1.0;
};

struct PrivacySpec {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<Release> releases;
};

// Throws std::domain_error unless epsilon > 0, delta in (0,1) and the
// release list is non-empty with positive ratios.
void validate(const PrivacySpec& spec);

// Standard normal CDF, Phi(x) = erfc(-x / sqrt(2)) / 2. std::erfc is
// faithfully rounded on common libms, comfortably below the 1e-12 absolute
// error this module needs; tests validate it against a quadrature oracle.
double standard_normal_cdf(double x);

// Exact delta of the Gaussian mechanism (Balle & Wang 2018, Theorem 8) with
// noise standard deviation sigma * sensitivity. Only the multiplier sigma
// enters the formula; sensitivity is accepted to keep call sites explicit.
// Monotone nonincreasing in both sigma and epsilon.
double analytic_delta(double epsilon, double sigma, double sensitivity);

// Single-Gaussian equivalent of composing all releases, via additivity of
// Renyi divergences of Gaussian mechanisms:
//   1 / sigma_eff^2 = sum_i 1 / (base_sigma * ratio_i)^2.
// The inverse-square sum is accumulated in sorted order so the result is
// exactly permutation invariant.
double effective_sigma(const std::vector<Release>& releases,
                       double base_sigma);

// Smallest base sigma (relative tolerance 1e-6, bisection over
// [1e-6, 1e6]) such that the composed releases are (epsilon, delta)-DP,
// i.e. analytic_delta(epsilon, effective_sigma(releases, sigma), 1) <= delta.
// Throws CalibrationError when no bracket exists.
double calibrate_sigma(const PrivacySpec& spec);

// Classical sufficient noise multiplier sqrt(2 ln(1.25/delta)) / epsilon.
// Valid as an upper bound on the exact calibration only for epsilon < 1.
double classical_gaussian_sigma(double epsilon, double delta);

}  // namespace dpembed

#endif  // DPEMBED_PRIVACY_HPP_
