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

#ifndef DPEMBED_EMBEDDING_HPP_
#define DPEMBED_EMBEDDING_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dpembed/feature_map.hpp"

namespace dpembed {

// Empirical mean of the feature map over a dataset. With labels the vector
// holds K stacked class blocks, block k being (1/m) * sum over class-k
// samples; dimension per part is D*K. sigma records the noise multiplier
// applied by privatize (0 for a raw embedding).
struct MeanEmbedding {
  Eigen::VectorXd part1;
  Eigen::VectorXd part2;  // empty when moments == 1
  std::int64_t sample_count = 0;
  Eigen::Index feature_dim = 0;  // D per class block
  int num_classes = 1;
  int moments = 1;
  double sigma = 0.0;
  std::vector<std::int64_t> class_counts;  // size num_classes when labeled

  Eigen::Index part_dim() const { return feature_dim * num_classes; }
};

// part_t = (1/m) sum_i phi_t(x_i), fixed summation order (column order of
// the dataset). Throws std::domain_error on an empty dataset.
MeanEmbedding embed(const FeatureMap& map, const Eigen::MatrixXd& dataset);

// Class-conditional blocks per label; labels are 0-based and must lie in
// [0, num_classes). Dividing by the global m keeps block norms at
// |C_k| / m, so the whole stacked vector keeps sensitivity 2/m.
MeanEmbedding embed_labeled(const FeatureMap& map,
                            const Eigen::MatrixXd& dataset,
                            const std::vector<int>& labels, int num_classes);

// L2 sensitivity of each embedding part under the replace-one neighboring
// relation: 2/m.
double sensitivity(std::int64_t m);

// Adds i.i.d. Gaussian noise with per-coordinate standard deviation
// sigma * 2/m to every part (class blocks included at the same scale).
// Deterministic given rng_seed; sigma = 0 returns the input unchanged.
MeanEmbedding privatize(const MeanEmbedding& embedding, double sigma,
                        std::uint64_t rng_seed);

// Structured diagonal noise covariance of a privatized embedding:
// per-coordinate variance on part t is (2 * c_t * sigma / m)^2, with dim
// coordinates per part (class blocks already counted into dim).
struct NoiseCovariance {
  double sigma = 0.0;
  std::int64_t m = 1;
  double c1 = 1.0;
  double c2 = 1.0;
  Eigen::Index dim = 0;
  int moments = 1;
};

struct CovarianceTerms {
  double trace = 0.0;
  double frobenius = 0.0;
  double operator_norm = 0.0;
};

// Closed forms: one moment (4s^2/m^2) * (D, sqrt(D), 1); two moments
// (4s^2/m^2) * ((c1^2+c2^2) D, (c1^2+c2^2) sqrt(D), max(c1^2, c2^2)).
CovarianceTerms noise_covariance_terms(const NoiseCovariance& cov);

// ||Sigma^{1/2} a|| from part-wise squared MMDs:
// (2 sigma / m) * sqrt(c1^2 * mmd1_sq + c2^2 * mmd2_sq).
double sigma_half_a_norm(const NoiseCovariance& cov, double mmd1_sq,
                         double mmd2_sq);

}  // namespace dpembed

#endif  // DPEMBED_EMBEDDING_HPP_
