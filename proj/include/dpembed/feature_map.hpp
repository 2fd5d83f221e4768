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

#ifndef DPEMBED_FEATURE_MAP_HPP_
#define DPEMBED_FEATURE_MAP_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dpembed {

struct FeatureMapConfig {
  int input_dim = 0;
  // Hidden layer widths of the fixed random tanh extractor. Empty means the
  // identity extractor (features are the raw input coordinates).
  std::vector<int> widths = {32, 32};
  std::uint64_t seed = 0;
  int moments = 2;  // 1 or 2
  // Per-part normalization of the feature vector. Disabled only for
  // analytically solvable test setups.
  bool normalized = true;
};

struct AffineTanhLayer {
  Eigen::MatrixXd weight;  // out_dim x in_dim
  Eigen::VectorXd bias;    // out_dim
};

// Fixed (non-trainable) feature extractor. The raw feature vector is the
// concatenation of all layer activations; the two-moment map is
//   phi1(x) = raw / ||raw||,  phi2(x) = raw^2 / ||raw^2||  (elementwise
// square). A zero raw vector maps to zero features. Immutable after
// construction.
class FeatureMap {
 public:
  struct Features {
    Eigen::MatrixXd part1;  // D x n
    Eigen::MatrixXd part2;  // D x n, 0x0 when moments == 1
  };

  // Seeded Gaussian weights, tanh activations; deterministic given cfg.seed.
  static FeatureMap random(const FeatureMapConfig& cfg);

  // Zero-layer extractor: raw features are the input itself.
  static FeatureMap identity(int input_dim, int moments = 1,
                             bool normalized = true);

  FeatureMap(std::vector<AffineTanhLayer> layers, int input_dim, int moments,
             bool normalized, bool last_layer_only = false);

  int input_dim() const { return input_dim_; }
  int moments() const { return moments_; }
  bool normalized() const { return normalized_; }
  bool last_layer_only() const { return last_layer_only_; }
  const std::vector<AffineTanhLayer>& layers() const { return layers_; }

  // Dimension D of the exposed raw feature vector.
  Eigen::Index total_dim() const { return total_dim_; }
  const std::vector<Eigen::Index>& layer_dims() const { return layer_dims_; }

  // sup_x ||Phi(x)||_2 for normalized maps: 1 with one moment, sqrt(2)
  // with two (each part is a unit vector).
  double norm_bound() const;

  // View of the same network exposing only the final layer's activations
  // with two normalized moments, for the early-stopping proxy embedding.
  FeatureMap last_layer_map() const;

  // Raw concatenated activations, one column per sample.
  Eigen::MatrixXd extract(const Eigen::MatrixXd& x) const;

  Features phi(const Eigen::MatrixXd& x) const;

  // Pullback of per-part cotangents through phi (including the
  // normalization Jacobian) and the network: returns input_dim x n.
  // cotangent2 must be 0x0 exactly when moments == 1.
  Eigen::MatrixXd phi_vjp(const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& cotangent1,
                          const Eigen::MatrixXd& cotangent2) const;

 private:
  // Activations of every layer for each input column; front() is the input.
  std::vector<Eigen::MatrixXd> forward(const Eigen::MatrixXd& x) const;

  std::vector<AffineTanhLayer> layers_;
  int input_dim_ = 0;
  int moments_ = 1;
  bool normalized_ = true;
  bool last_layer_only_ = false;
  std::vector<Eigen::Index> layer_dims_;
  Eigen::Index total_dim_ = 0;
};

}  // namespace dpembed

#endif  // DPEMBED_FEATURE_MAP_HPP_
