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

#include "dpembed/generator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dpembed/errors.hpp"
#include "dpembed/rng.hpp"

namespace dpembed {

std::vector<Generator::LayerShape> Generator::shapes() const {
  std::vector<LayerShape> s;
  Eigen::Index in = latent_dim_;
  for (int width : hidden_widths_) {
    s.push_back({in, width, /*tanh=*/true});
    in = width;
  }
  s.push_back({in, output_dim_, /*tanh=*/false});
  return s;
}

Eigen::Index Generator::parameter_count_for(int latent_dim,
                                            const std::vector<int>& hidden,
                                            int output_dim) {
  Eigen::Index count = 0;
  Eigen::Index in = latent_dim;
  for (int width : hidden) {
    count += in * width + width;
    in = width;
  }
  return count + in * output_dim + output_dim;
}

Generator::Generator(int latent_dim, std::vector<int> hidden_widths,
                     int output_dim, Eigen::VectorXd theta)
    : latent_dim_(latent_dim),
      hidden_widths_(std::move(hidden_widths)),
      output_dim_(output_dim),
      theta_(std::move(theta)) {
  if (latent_dim_ < 1) throw std::domain_error("latent_dim must be >= 1");
  if (output_dim_ < 1) throw std::domain_error("output_dim must be >= 1");
  for (int w : hidden_widths_) {
    if (w < 1) throw std::domain_error("hidden width must be >= 1");
  }
  if (theta_.size() !=
      parameter_count_for(latent_dim_, hidden_widths_, output_dim_)) {
    throw ShapeError("parameter vector has size " +
                     std::to_string(theta_.size()) + ", generator needs " +
                     std::to_string(parameter_count_for(
                         latent_dim_, hidden_widths_, output_dim_)));
  }
}

Generator Generator::random(const GeneratorConfig& cfg) {
  Eigen::VectorXd theta(
      parameter_count_for(cfg.latent_dim, cfg.hidden_widths, cfg.output_dim));
  Eigen::Index offset = 0;
  Eigen::Index in = cfg.latent_dim;
  std::vector<Eigen::Index> outs(cfg.hidden_widths.begin(),
                                 cfg.hidden_widths.end());
  outs.push_back(cfg.output_dim);
  for (std::size_t j = 0; j < outs.size(); ++j) {
    Rng rng(split_seed(cfg.seed, j));
    Eigen::Index out = outs[j];
    for (Eigen::Index i = 0; i < in * out; ++i) {
      theta(offset + i) = rng.gaussian() / std::sqrt(double(in));
    }
    offset += in * out;
    theta.segment(offset, out).setZero();
    offset += out;
    in = out;
  }
  return Generator(cfg.latent_dim, cfg.hidden_widths, cfg.output_dim,
                   std::move(theta));
}

void Generator::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != theta_.size()) {
    throw ShapeError("parameter vector size mismatch");
  }
  theta_ = theta;
}

Eigen::MatrixXd Generator::generate(const Eigen::MatrixXd& latents) const {
  if (latents.rows() != latent_dim_) {
    throw ShapeError("latents have " + std::to_string(latents.rows()) +
                     " rows, generator expects " +
                     std::to_string(latent_dim_));
  }
  Eigen::MatrixXd h = latents;
  Eigen::Index offset = 0;
  for (const LayerShape& s : shapes()) {
    Eigen::Map<const Eigen::MatrixXd> w(theta_.data() + offset, s.out, s.in);
    offset += s.in * s.out;
    Eigen::Map<const Eigen::VectorXd> b(theta_.data() + offset, s.out);
    offset += s.out;
    Eigen::MatrixXd z = (w * h).colwise() + b;
    h = s.tanh ? z.array().tanh().matrix() : std::move(z);
  }
  return h;
}

Eigen::VectorXd Generator::parameter_gradient(
    const Eigen::MatrixXd& latents,
    const Eigen::MatrixXd& output_cotangent) const {
  if (latents.rows() != latent_dim_) {
    throw ShapeError("latents do not match generator latent_dim");
  }
  if (output_cotangent.rows() != output_dim_ ||
      output_cotangent.cols() != latents.cols()) {
    throw ShapeError("output cotangent shape mismatch");
  }

  const std::vector<LayerShape> layer_shapes = shapes();
  // Forward pass keeping every layer's post-activation output.
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layer_shapes.size() + 1);
  acts.push_back(latents);
  std::vector<Eigen::Index> weight_offsets(layer_shapes.size());
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < layer_shapes.size(); ++j) {
    const LayerShape& s = layer_shapes[j];
    weight_offsets[j] = offset;
    Eigen::Map<const Eigen::MatrixXd> w(theta_.data() + offset, s.out, s.in);
    offset += s.in * s.out;
    Eigen::Map<const Eigen::VectorXd> b(theta_.data() + offset, s.out);
    offset += s.out;
    Eigen::MatrixXd z = (w * acts.back()).colwise() + b;
    acts.push_back(s.tanh ? z.array().tanh().matrix() : std::move(z));
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta_.size());
  Eigen::MatrixXd grad_h = output_cotangent;
  for (std::size_t j = layer_shapes.size(); j-- > 0;) {
    const LayerShape& s = layer_shapes[j];
    Eigen::MatrixXd grad_z;
    if (s.tanh) {
      grad_z = (grad_h.array() * (1.0 - acts[j + 1].array().square()))
                   .matrix();
    } else {
      grad_z = std::move(grad_h);
    }
    Eigen::Map<Eigen::MatrixXd> grad_w(grad.data() + weight_offsets[j],
                                       s.out, s.in);
    grad_w = grad_z * acts[j].transpose();
    Eigen::Map<Eigen::VectorXd> grad_b(
        grad.data() + weight_offsets[j] + s.in * s.out, s.out);
    grad_b = grad_z.rowwise().sum();
    if (j > 0) {
      Eigen::Map<const Eigen::MatrixXd> w(theta_.data() + weight_offsets[j],
                                          s.out, s.in);
      grad_h = w.transpose() * grad_z;
    }
  }
  return grad;
}

}  // namespace dpembed
