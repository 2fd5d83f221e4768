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

#include "dpembed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpembed/errors.hpp"
#include "dpembed/rng.hpp"

namespace dpembed {

MeanEmbedding embed(const FeatureMap& map, const Eigen::MatrixXd& dataset) {
  const Eigen::Index m = dataset.cols();
  if (m < 1) throw std::domain_error("dataset must be non-empty");
  FeatureMap::Features f = map.phi(dataset);
  MeanEmbedding e;
  e.sample_count = m;
  e.feature_dim = map.total_dim();
  e.num_classes = 1;
  e.moments = map.moments();
  // Fixed left-to-right summation over samples for bit-reproducibility.
  e.part1 = Eigen::VectorXd::Zero(e.feature_dim);
  for (Eigen::Index i = 0; i < m; ++i) e.part1 += f.part1.col(i);
  e.part1 /= double(m);
  if (e.moments == 2) {
    e.part2 = Eigen::VectorXd::Zero(e.feature_dim);
    for (Eigen::Index i = 0; i < m; ++i) e.part2 += f.part2.col(i);
    e.part2 /= double(m);
  }
  return e;
}

MeanEmbedding embed_labeled(const FeatureMap& map,
                            const Eigen::MatrixXd& dataset,
                            const std::vector<int>& labels, int num_classes) {
  const Eigen::Index m = dataset.cols();
  if (m < 1) throw std::domain_error("dataset must be non-empty");
  if (num_classes < 1) throw std::domain_error("num_classes must be >= 1");
  if (static_cast<Eigen::Index>(labels.size()) != m) {
    throw ShapeError("label count does not match sample count");
  }
  for (int label : labels) {
    if (label < 0 || label >= num_classes) {
      throw std::domain_error("label " + std::to_string(label) +
                              " outside [0, " + std::to_string(num_classes) +
                              ")");
    }
  }
  FeatureMap::Features f = map.phi(dataset);
  const Eigen::Index d = map.total_dim();
  MeanEmbedding e;
  e.sample_count = m;
  e.feature_dim = d;
  e.num_classes = num_classes;
  e.moments = map.moments();
  e.class_counts.assign(num_classes, 0);
  e.part1 = Eigen::VectorXd::Zero(d * num_classes);
  if (e.moments == 2) e.part2 = Eigen::VectorXd::Zero(d * num_classes);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index offset = d * labels[i];
    e.part1.segment(offset, d) += f.part1.col(i);
    if (e.moments == 2) e.part2.segment(offset, d) += f.part2.col(i);
    ++e.class_counts[labels[i]];
  }
  e.part1 /= double(m);
  if (e.moments == 2) e.part2 /= double(m);
  return e;
}

double sensitivity(std::int64_t m) {
  if (m < 1) throw std::domain_error("sample count must be >= 1");
  return 2.0 / double(m);
}

MeanEmbedding privatize(const MeanEmbedding& embedding, double sigma,
                        std::uint64_t rng_seed) {
  if (!(sigma >= 0.0)) throw std::domain_error("sigma must be >= 0");
  if (embedding.sample_count < 1) {
    throw std::domain_error("embedding has no samples");
  }
  MeanEmbedding out = embedding;
  out.sigma = sigma;
  if (sigma == 0.0) return out;
  const double scale = sigma * sensitivity(embedding.sample_count);
  Rng rng(rng_seed);
  out.part1 += scale * rng.gaussian_vector(out.part1.size());
  if (out.moments == 2) {
    out.part2 += scale * rng.gaussian_vector(out.part2.size());
  }
  return out;
}

CovarianceTerms noise_covariance_terms(const NoiseCovariance& cov) {
  if (!(cov.sigma >= 0.0)) throw std::domain_error("sigma must be >= 0");
  if (cov.m < 1) throw std::domain_error("m must be >= 1");
  if (cov.dim < 1) throw std::domain_error("dim must be >= 1");
  if (cov.moments != 1 && cov.moments != 2) {
    throw std::domain_error("moments must be 1 or 2");
  }
  if (!(cov.c1 > 0.0) || !(cov.c2 > 0.0)) {
    throw std::domain_error("part scales must be > 0");
  }
  const double base = 4.0 * cov.sigma * cov.sigma / (double(cov.m) * cov.m);
  const double d = double(cov.dim);
  CovarianceTerms t;
  if (cov.moments == 1) {
    t.trace = base * d;
    t.frobenius = base * std::sqrt(d);
    t.operator_norm = base;
  } else {
    const double factor = cov.c1 * cov.c1 + cov.c2 * cov.c2;
    t.trace = base * factor * d;
    t.frobenius = base * factor * std::sqrt(d);
    t.operator_norm = base * std::max(cov.c1 * cov.c1, cov.c2 * cov.c2);
  }
  return t;
}

double sigma_half_a_norm(const NoiseCovariance& cov, double mmd1_sq,
                         double mmd2_sq) {
  if (!(mmd1_sq >= 0.0) || !(mmd2_sq >= 0.0)) {
    throw std::domain_error("squared MMD terms must be >= 0");
  }
  if (cov.moments == 1 && mmd2_sq != 0.0) {
    throw std::domain_error("mmd2_sq must be 0 with one moment");
  }
  const double scale = 2.0 * cov.sigma / double(cov.m);
  return scale *
         std::sqrt(cov.c1 * cov.c1 * mmd1_sq + cov.c2 * cov.c2 * mmd2_sq);
}

}  // namespace dpembed
