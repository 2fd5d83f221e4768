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

#ifndef DPEMBED_GENERATOR_HPP_
#define DPEMBED_GENERATOR_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dpembed {

struct GeneratorConfig {
  int latent_dim = 0;
  // Hidden tanh layer widths; empty gives a single affine map (a linear
  // generator). The output layer is always affine without activation.
  std::vector<int> hidden_widths;
  int output_dim = 0;
  std::uint64_t seed = 0;
};

// Trainable MLP generator x = g_theta(z) with tanh hidden layers and a
// linear output layer. Parameters live in one flat vector, per layer the
// weight matrix in column-major order followed by the bias.
class Generator {
 public:
  static Generator random(const GeneratorConfig& cfg);

  Generator(int latent_dim, std::vector<int> hidden_widths, int output_dim,
            Eigen::VectorXd theta);

  int latent_dim() const { return latent_dim_; }
  int output_dim() const { return output_dim_; }
  const std::vector<int>& hidden_widths() const { return hidden_widths_; }
  Eigen::Index parameter_count() const { return theta_.size(); }
  const Eigen::VectorXd& parameters() const { return theta_; }
  void set_parameters(const Eigen::VectorXd& theta);

  static Eigen::Index parameter_count_for(int latent_dim,
                                          const std::vector<int>& hidden,
                                          int output_dim);

  // Deterministic forward pass, one sample per column.
  Eigen::MatrixXd generate(const Eigen::MatrixXd& latents) const;

  // dL/dtheta for a loss reaching the parameters only through the outputs,
  // given output_cotangent = dL/dx (output_dim x n).
  Eigen::VectorXd parameter_gradient(
      const Eigen::MatrixXd& latents,
      const Eigen::MatrixXd& output_cotangent) const;

 private:
  struct LayerShape {
    Eigen::Index in = 0;
    Eigen::Index out = 0;
    bool tanh = false;
  };

  std::vector<LayerShape> shapes() const;

  int latent_dim_ = 0;
  std::vector<int> hidden_widths_;
  int output_dim_ = 0;
  Eigen::VectorXd theta_;
};

}  // namespace dpembed

#endif  // DPEMBED_GENERATOR_HPP_
