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

#ifndef DPEMBED_DATA_HPP_
#define DPEMBED_DATA_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dpembed {

struct MixtureComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric PSD
  double weight = 1.0;
};

struct SyntheticDatasetSpec {
  std::int64_t num_samples = 0;
  int input_dim = 0;
  std::vector<MixtureComponent> components;
  bool labeled = false;  // labels are component indices
};

struct Dataset {
  Eigen::MatrixXd samples;  // input_dim x m
  std::vector<int> labels;  // empty when unlabeled
  int num_classes = 1;
};

// Seeded spec with well-separated component means and mild random SPD
// covariances; weights are uniform.
SyntheticDatasetSpec random_mixture_spec(int input_dim, int num_components,
                                         std::int64_t num_samples,
                                         std::uint64_t seed,
                                         bool labeled = false);

// Draws num_samples mixture points, one RNG stream, fixed order:
// (component pick, then the latent Gaussian vector) per sample. Covariances
// are factored by symmetric eigendecomposition; eigenvalues below
// -1e-12 * max(1, |lambda|_max) are rejected as non-PSD, small negative
// rounding noise is clamped to zero.
Dataset sample_dataset(const SyntheticDatasetSpec& spec, std::uint64_t seed);

}  // namespace dpembed

#endif  // DPEMBED_DATA_HPP_
