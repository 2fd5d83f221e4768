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

#include "dpembed/feature_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dpembed/errors.hpp"
#include "dpembed/rng.hpp"

namespace dpembed {

FeatureMap::FeatureMap(std::vector<AffineTanhLayer> layers, int input_dim,
                       int moments, bool normalized, bool last_layer_only)
    : layers_(std::move(layers)),
      input_dim_(input_dim),
      moments_(moments),
      normalized_(normalized),
      last_layer_only_(last_layer_only) {
  if (input_dim_ < 1) throw std::domain_error("input_dim must be >= 1");
  if (moments_ != 1 && moments_ != 2) {
    throw std::domain_error("moments must be 1 or 2");
  }
  Eigen::Index prev = input_dim_;
  for (const AffineTanhLayer& l : layers_) {
    if (l.weight.cols() != prev || l.weight.rows() != l.bias.size() ||
        l.weight.rows() < 1) {
      throw ShapeError("inconsistent layer dimensions in feature map");
    }
    prev = l.weight.rows();
  }
  if (layers_.empty()) {
    layer_dims_ = {input_dim_};
  } else if (last_layer_only_) {
    layer_dims_ = {layers_.back().weight.rows()};
  } else {
    for (const AffineTanhLayer& l : layers_) {
      layer_dims_.push_back(l.weight.rows());
    }
  }
  total_dim_ = 0;
  for (Eigen::Index d : layer_dims_) total_dim_ += d;
}

FeatureMap FeatureMap::random(const FeatureMapConfig& cfg) {
  if (cfg.input_dim < 1) throw std::domain_error("input_dim must be >= 1");
  std::vector<AffineTanhLayer> layers;
  layers.reserve(cfg.widths.size());
  Eigen::Index in_dim = cfg.input_dim;
  for (std::size_t j = 0; j < cfg.widths.size(); ++j) {
    int width = cfg.widths[j];
    if (width < 1) throw std::domain_error("layer width must be >= 1");
    Rng rng(split_seed(cfg.seed, j));
    AffineTanhLayer layer;
    // Variance 1/fan_in keeps tanh pre-activations in the responsive range.
    layer.weight =
        rng.gaussian_matrix(width, in_dim) / std::sqrt(double(in_dim));
    layer.bias = 0.1 * rng.gaussian_vector(width);
    layers.push_back(std::move(layer));
    in_dim = width;
  }
  return FeatureMap(std::move(layers), cfg.input_dim, cfg.moments,
                    cfg.normalized);
}

FeatureMap FeatureMap::identity(int input_dim, int moments, bool normalized) {
  return FeatureMap({}, input_dim, moments, normalized);
}

double FeatureMap::norm_bound() const {
  return moments_ == 2 ? std::sqrt(2.0) : 1.0;
}

FeatureMap FeatureMap::last_layer_map() const {
  return FeatureMap(layers_, input_dim_, 2, normalized_,
                    /*last_layer_only=*/true);
}

std::vector<Eigen::MatrixXd> FeatureMap::forward(
    const Eigen::MatrixXd& x) const {
  if (x.rows() != input_dim_) {
    throw ShapeError("input has " + std::to_string(x.rows()) +
                     " rows, feature map expects " +
                     std::to_string(input_dim_));
  }
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers_.size() + 1);
  acts.push_back(x);
  for (const AffineTanhLayer& l : layers_) {
    Eigen::MatrixXd z = (l.weight * acts.back()).colwise() + l.bias;
    acts.push_back(z.array().tanh().matrix());
  }
  return acts;
}

Eigen::MatrixXd FeatureMap::extract(const Eigen::MatrixXd& x) const {
  std::vector<Eigen::MatrixXd> acts = forward(x);
  if (layers_.empty()) return acts.front();
  if (last_layer_only_) return acts.back();
  Eigen::MatrixXd raw(total_dim_, x.cols());
  Eigen::Index offset = 0;
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    raw.middleRows(offset, layer_dims_[j]) = acts[j + 1];
    offset += layer_dims_[j];
  }
  return raw;
}

namespace {

// Column-wise normalization; zero columns stay zero.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& raw) {
  Eigen::MatrixXd out(raw.rows(), raw.cols());
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    double norm = raw.col(c).norm();
    if (norm > 0.0) {
      out.col(c) = raw.col(c) / norm;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

}  // namespace

FeatureMap::Features FeatureMap::phi(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd raw = extract(x);
  Features f;
  if (normalized_) {
    f.part1 = normalize_columns(raw);
    if (moments_ == 2) {
      f.part2 = normalize_columns(raw.array().square().matrix());
    }
  } else {
    f.part1 = raw;
    if (moments_ == 2) f.part2 = raw.array().square().matrix();
  }
  return f;
}

Eigen::MatrixXd FeatureMap::phi_vjp(const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& cotangent1,
                                    const Eigen::MatrixXd& cotangent2) const {
  const Eigen::Index n = x.cols();
  if (cotangent1.rows() != total_dim_ || cotangent1.cols() != n) {
    throw ShapeError("cotangent1 shape does not match feature dimensions");
  }
  if (moments_ == 2) {
    if (cotangent2.rows() != total_dim_ || cotangent2.cols() != n) {
      throw ShapeError("cotangent2 shape does not match feature dimensions");
    }
  } else if (cotangent2.size() != 0) {
    throw ShapeError("cotangent2 given but the map has one moment");
  }

  std::vector<Eigen::MatrixXd> acts = forward(x);
  Eigen::MatrixXd raw;
  if (layers_.empty()) {
    raw = acts.front();
  } else if (last_layer_only_) {
    raw = acts.back();
  } else {
    raw.resize(total_dim_, n);
    Eigen::Index offset = 0;
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      raw.middleRows(offset, layer_dims_[j]) = acts[j + 1];
      offset += layer_dims_[j];
    }
  }

  // Pull the cotangents back through the per-part normalization. For
  // y = v/||v|| the pullback of g is (g - y (y.g)) / ||v||; for the squared
  // part the chain continues through s = v^2. Zero raw columns have zero
  // features and get zero gradient (documented degenerate case).
  Eigen::MatrixXd cot_raw(total_dim_, n);
  if (normalized_) {
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::VectorXd v = raw.col(c);
      double r1 = v.norm();
      if (r1 == 0.0) {
        cot_raw.col(c).setZero();
        continue;
      }
      Eigen::VectorXd y = v / r1;
      Eigen::VectorXd g = (cotangent1.col(c) - y * y.dot(cotangent1.col(c)));
      g /= r1;
      if (moments_ == 2) {
        Eigen::VectorXd s = v.array().square();
        double r2 = s.norm();
        Eigen::VectorXd y2 = s / r2;  // r2 > 0 since v != 0
        Eigen::VectorXd gs = (cotangent2.col(c) - y2 * y2.dot(cotangent2.col(c)));
        gs /= r2;
        g += 2.0 * v.cwiseProduct(gs);
      }
      cot_raw.col(c) = g;
    }
  } else {
    cot_raw = cotangent1;
    if (moments_ == 2) {
      cot_raw += 2.0 * raw.cwiseProduct(cotangent2);
    }
  }

  const std::size_t num_layers = layers_.size();
  if (num_layers == 0) return cot_raw;

  // Split the raw cotangent into per-layer segments, then run the network
  // backward accumulating each segment where its layer is reached.
  std::vector<Eigen::MatrixXd> segments(num_layers);
  if (last_layer_only_) {
    segments.back() = cot_raw;
  } else {
    Eigen::Index offset = 0;
    for (std::size_t j = 0; j < num_layers; ++j) {
      segments[j] = cot_raw.middleRows(offset, layer_dims_[j]);
      offset += layer_dims_[j];
    }
  }

  Eigen::MatrixXd grad_h = segments.back();
  for (std::size_t j = num_layers; j-- > 0;) {
    const Eigen::MatrixXd& h = acts[j + 1];
    Eigen::MatrixXd grad_z =
        (grad_h.array() * (1.0 - h.array().square())).matrix();
    Eigen::MatrixXd grad_prev = layers_[j].weight.transpose() * grad_z;
    if (j == 0) return grad_prev;
    if (segments[j - 1].size() != 0) grad_prev += segments[j - 1];
    grad_h = std::move(grad_prev);
  }
  return cot_raw;  // unreachable
}

}  // namespace dpembed
