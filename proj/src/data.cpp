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

#include "dpembed/data.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dpembed/errors.hpp"
#include "dpembed/rng.hpp"

namespace dpembed {
namespace {

void validate(const SyntheticDatasetSpec& spec) {
  if (spec.num_samples < 1) {
    throw std::domain_error("num_samples must be >= 1");
  }
  if (spec.input_dim < 1) throw std::domain_error("input_dim must be >= 1");
  if (spec.components.empty()) {
    throw std::domain_error("mixture needs at least one component");
  }
  for (const MixtureComponent& c : spec.components) {
    if (c.mean.size() != spec.input_dim ||
        c.covariance.rows() != spec.input_dim ||
        c.covariance.cols() != spec.input_dim) {
      throw ShapeError("component dimensions do not match input_dim");
    }
    if (!(c.weight > 0.0)) {
      throw std::domain_error("component weight must be > 0");
    }
  }
}

// Symmetric PSD square root; rejects matrices with genuinely negative
// spectrum, clamps rounding-level negatives to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw std::domain_error("covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  Eigen::VectorXd lambda = solver.eigenvalues();
  const double max_abs = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -1e-12 * max_abs) {
      throw std::domain_error("covariance is not positive semidefinite");
    }
    lambda(i) = std::max(lambda(i), 0.0);
  }
  return solver.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

SyntheticDatasetSpec random_mixture_spec(int input_dim, int num_components,
                                         std::int64_t num_samples,
                                         std::uint64_t seed, bool labeled) {
  if (input_dim < 1) throw std::domain_error("input_dim must be >= 1");
  if (num_components < 1) {
    throw std::domain_error("num_components must be >= 1");
  }
  SyntheticDatasetSpec spec;
  spec.num_samples = num_samples;
  spec.input_dim = input_dim;
  spec.labeled = labeled;
  for (int k = 0; k < num_components; ++k) {
    Rng rng(split_seed(seed, k));
    MixtureComponent c;
    c.mean = 3.0 * rng.gaussian_vector(input_dim);
    Eigen::MatrixXd a = rng.gaussian_matrix(input_dim, input_dim);
    c.covariance = (0.09 / input_dim) * (a * a.transpose()) +
                   0.04 * Eigen::MatrixXd::Identity(input_dim, input_dim);
    c.weight = 1.0 / num_components;
    spec.components.push_back(std::move(c));
  }
  return spec;
}

Dataset sample_dataset(const SyntheticDatasetSpec& spec, std::uint64_t seed) {
  validate(spec);
  const int num_components = static_cast<int>(spec.components.size());

  double total_weight = 0.0;
  for (const MixtureComponent& c : spec.components) total_weight += c.weight;
  std::vector<double> cumulative;
  cumulative.reserve(num_components);
  double acc = 0.0;
  for (const MixtureComponent& c : spec.components) {
    acc += c.weight / total_weight;
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;

  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(num_components);
  for (const MixtureComponent& c : spec.components) {
    factors.push_back(psd_sqrt(c.covariance));
  }

  Dataset out;
  out.samples.resize(spec.input_dim, spec.num_samples);
  out.num_classes = num_components;
  if (spec.labeled) out.labels.reserve(spec.num_samples);
  Rng rng(seed);
  for (std::int64_t i = 0; i < spec.num_samples; ++i) {
    const double u = rng.uniform();
    int k = 0;
    while (k + 1 < num_components && u > cumulative[k]) ++k;
    Eigen::VectorXd z = rng.gaussian_vector(spec.input_dim);
    out.samples.col(i) = spec.components[k].mean + factors[k] * z;
    if (spec.labeled) out.labels.push_back(k);
  }
  return out;
}

}  // namespace dpembed
