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

#ifndef DPEMBED_MMD_HPP_
#define DPEMBED_MMD_HPP_

#include <Eigen/Dense>

#include "dpembed/embedding.hpp"
#include "dpembed/feature_map.hpp"

namespace dpembed {

struct MmdValue {
  double squared = 0.0;
  double part1_squared = 0.0;
  double part2_squared = 0.0;  // 0 with one moment
};

// Squared MMD between two embeddings of matching shape:
// ||part1_a - part1_b||^2 + ||part2_a - part2_b||^2.
double mmd_squared(const MeanEmbedding& target, const MeanEmbedding& synthetic);

// Same value with the per-part split retained (the part-wise terms feed
// the noise-covariance expression for ||Sigma^{1/2} a||).
MmdValue mmd_squared_parts(const MeanEmbedding& target,
                           const MeanEmbedding& synthetic);

// Training objective: squared distance between the once-noised target
// embedding and the synthetic embedding. The synthetic side is never
// noised. At sigma = 0 this equals mmd_squared exactly.
double private_mmd_squared(const MeanEmbedding& private_target,
                           const MeanEmbedding& synthetic);

// d/dx_i of private_mmd_squared(private_target, embed(map, samples)):
// (2/n) * (dPhi/dx_i)^T (mu_synthetic - target), one column per sample.
Eigen::MatrixXd mmd_gradient_wrt_samples(
    const FeatureMap& map, const MeanEmbedding& private_target,
    const Eigen::MatrixXd& synthetic_samples);

}  // namespace dpembed

#endif  // DPEMBED_MMD_HPP_
