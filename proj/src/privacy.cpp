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

#include "dpembed/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpembed/errors.hpp"

namespace dpembed {
namespace {

constexpr double kBisectionRelTol = 1e-6;
constexpr double kBracketLo = 1e-6;
constexpr double kBracketHi = 1e6;

// Inverse-square sum of the release ratios, accumulated smallest terms
// first so the value does not depend on the order of the release list.
double inverse_square_sum(const std::vector<Release>& releases) {
  std::vector<double> terms;
  terms.reserve(releases.size());
  for (const Release& r : releases) {
    if (!(r.noise_multiplier_ratio > 0.0)) {
      throw std::domain_error("release noise_multiplier_ratio must be > 0");
    }
    double ratio = r.noise_multiplier_ratio;
    terms.push_back(1.0 / (ratio * ratio));
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

// Smallest effective (single-release, unit-sensitivity) noise multiplier
// meeting the (epsilon, delta) target.
double calibrate_effective_sigma(double epsilon, double delta) {
  double lo = kBracketLo;
  double hi = kBracketHi;
  if (analytic_delta(epsilon, hi, 1.0) > delta) {
    throw CalibrationError(
        "no sigma within [1e-6, 1e6] satisfies the privacy target "
        "(epsilon=" +
        std::to_string(epsilon) + ", delta=" + std::to_string(delta) + ")");
  }
  if (analytic_delta(epsilon, lo, 1.0) <= delta) {
    throw CalibrationError(
        "privacy target is met even at sigma=1e-6; bracket not found");
  }
  // Invariant: delta(lo) > target >= delta(hi).
  while (hi - lo > kBisectionRelTol * hi) {
    double mid = lo + (hi - lo) / 2.0;
    if (analytic_delta(epsilon, mid, 1.0) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

void validate(const PrivacySpec& spec) {
  if (!(spec.epsilon > 0.0)) {
    throw std::domain_error("epsilon must be > 0");
  }
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  if (spec.releases.empty()) {
    throw std::domain_error("release list must be non-empty");
  }
  for (const Release& r : spec.releases) {
    if (!(r.noise_multiplier_ratio > 0.0)) {
      throw std::domain_error("release noise_multiplier_ratio must be > 0");
    }
    if (!(r.sensitivity >= 0.0)) {
      throw std::domain_error("release sensitivity must be >= 0");
    }
  }
}

double standard_normal_cdf(double x) {
  return std::erfc(-x / std::sqrt(2.0)) / 2.0;
}

double analytic_delta(double epsilon, double sigma, double sensitivity) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  if (!(sensitivity > 0.0)) throw std::domain_error("sensitivity must be > 0");

  // delta(epsilon) = Phi(1/(2s) - eps*s) - e^eps * Phi(-1/(2s) - eps*s)
  // with s the noise multiplier (noise stddev / sensitivity).
  double a = 1.0 / (2.0 * sigma) - epsilon * sigma;
  double b = -1.0 / (2.0 * sigma) - epsilon * sigma;
  double tail = standard_normal_cdf(b);
  // Guard exp overflow: once the CDF underflows the product is zero.
  double second = (tail == 0.0) ? 0.0 : std::exp(epsilon) * tail;
  double delta = standard_normal_cdf(a) - second;
  return std::clamp(delta, 0.0, 1.0);
}

double effective_sigma(const std::vector<Release>& releases,
                       double base_sigma) {
  if (releases.empty()) {
    throw std::domain_error("release list must be non-empty");
  }
  if (!(base_sigma > 0.0)) {
    throw std::domain_error("base_sigma must be > 0");
  }
  return base_sigma / std::sqrt(inverse_square_sum(releases));
}

double calibrate_sigma(const PrivacySpec& spec) {
  validate(spec);
  double scale = std::sqrt(inverse_square_sum(spec.releases));
  double sigma_eff = calibrate_effective_sigma(spec.epsilon, spec.delta);
  double sigma = sigma_eff * scale;
  // The scale roundtrip inside effective_sigma can lose an ulp; nudge up
  // until the returned sigma verifiably satisfies the constraint.
  for (int i = 0; i < 8; ++i) {
    double achieved =
        analytic_delta(spec.epsilon, effective_sigma(spec.releases, sigma),
                       1.0);
    if (achieved <= spec.delta) return sigma;
    sigma = std::nextafter(sigma, kBracketHi * kBracketHi);
  }
  throw CalibrationError("calibrated sigma failed its own verification");
}

double classical_gaussian_sigma(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

}  // namespace dpembed
