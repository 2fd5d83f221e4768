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

#include "dpembed/mmd.hpp"

#include <stdexcept>

#include "dpembed/errors.hpp"

namespace dpembed {
namespace {

void check_compatible(const MeanEmbedding& a, const MeanEmbedding& b) {
  if (a.moments != b.moments) {
    throw ShapeError("embeddings have different moment counts");
  }
  if (a.part1.size() != b.part1.size() ||
      a.part2.size() != b.part2.size()) {
    throw ShapeError("embeddings have different dimensions");
  }
}

}  // namespace

MmdValue mmd_squared_parts(const MeanEmbedding& target,
                           const MeanEmbedding& synthetic) {
  check_compatible(target, synthetic);
  MmdValue v;
  v.part1_squared = (target.part1 - synthetic.part1).squaredNorm();
  if (target.moments == 2) {
    v.part2_squared = (target.part2 - synthetic.part2).squaredNorm();
  }
  v.squared = v.part1_squared + v.part2_squared;
  return v;
}

double mmd_squared(const MeanEmbedding& target,
                   const MeanEmbedding& synthetic) {
  return mmd_squared_parts(target, synthetic).squared;
}

double private_mmd_squared(const MeanEmbedding& private_target,
                           const MeanEmbedding& synthetic) {
  return mmd_squared_parts(private_target, synthetic).squared;
}

Eigen::MatrixXd mmd_gradient_wrt_samples(
    const FeatureMap& map, const MeanEmbedding& private_target,
    const Eigen::MatrixXd& synthetic_samples) {
  const Eigen::Index n = synthetic_samples.cols();
  if (n < 1) throw std::domain_error("synthetic sample list must be non-empty");
  MeanEmbedding synthetic = embed(map, synthetic_samples);
  check_compatible(private_target, synthetic);

  // The loss reaches each sample only through the synthetic mean, so every
  // column shares the cotangent (2/n) * (mu_synthetic - target) per part.
  Eigen::VectorXd cot1 = (2.0 / double(n)) *
                         (synthetic.part1 - private_target.part1);
  Eigen::MatrixXd cot1_cols = cot1.replicate(1, n);
  Eigen::MatrixXd cot2_cols;
  if (map.moments() == 2) {
    Eigen::VectorXd cot2 = (2.0 / double(n)) *
                           (synthetic.part2 - private_target.part2);
    cot2_cols = cot2.replicate(1, n);
  }
  return map.phi_vjp(synthetic_samples, cot1_cols, cot2_cols);
}

}  // namespace dpembed
