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

#include "dpembed/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpembed/errors.hpp"
#include "dpembed/mmd.hpp"
#include "dpembed/rng.hpp"

namespace dpembed {
namespace {

void validate(const TrainingConfig& cfg) {
  if (cfg.iterations < 1) throw std::domain_error("iterations must be >= 1");
  if (cfg.batch_size < 1) throw std::domain_error("batch_size must be >= 1");
  if (cfg.eval_every < 1) throw std::domain_error("eval_every must be >= 1");
  if (!(cfg.learning_rate >= 0.0)) {
    throw std::domain_error("learning_rate must be >= 0");
  }
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) ||
      !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0)) {
    throw std::domain_error("Adam betas must lie in [0, 1)");
  }
  if (!(cfg.adam_eps > 0.0)) throw std::domain_error("adam_eps must be > 0");
  if (cfg.early_stopping) {
    if (!(cfg.early_stopping->sigma_stopping >= 0.0)) {
      throw std::domain_error("sigma_stopping must be >= 0");
    }
    if (cfg.early_stopping->check_every < 1) {
      throw std::domain_error("check_every must be >= 1");
    }
  }
}

}  // namespace

Eigen::MatrixXd training_latents(const TrainingConfig& cfg, int latent_dim) {
  Rng rng(split_seed(cfg.seed, 0));
  return rng.gaussian_matrix(latent_dim, cfg.batch_size);
}

TrainingResult train(Generator& gen, const MeanEmbedding& private_target,
                     const FeatureMap& map, const TrainingConfig& cfg,
                     const MeanEmbedding* true_target,
                     const MeanEmbedding* proxy_target) {
  validate(cfg);
  if (cfg.early_stopping && proxy_target == nullptr) {
    throw std::invalid_argument(
        "early stopping configured but no proxy target given");
  }

  const Eigen::MatrixXd latents = training_latents(cfg, gen.latent_dim());
  const FeatureMap proxy_map = map.last_layer_map();

  Eigen::VectorXd theta = gen.parameters();
  Eigen::VectorXd adam_m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd adam_v = Eigen::VectorXd::Zero(theta.size());

  TrainingResult result;
  for (int it = 1; it <= cfg.iterations; ++it) {
    Eigen::MatrixXd x = gen.generate(latents);
    Eigen::MatrixXd grad_x = mmd_gradient_wrt_samples(map, private_target, x);
    if (!grad_x.allFinite()) {
      throw TrainingError("non-finite sample gradient", it);
    }
    Eigen::VectorXd grad = gen.parameter_gradient(latents, grad_x);
    if (!grad.allFinite()) {
      throw TrainingError("non-finite parameter gradient", it);
    }

    adam_m = cfg.adam_beta1 * adam_m + (1.0 - cfg.adam_beta1) * grad;
    adam_v = cfg.adam_beta2 * adam_v +
             (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, it);
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, it);
    theta -= (cfg.learning_rate *
              (adam_m / bias1).array() /
              ((adam_v / bias2).array().sqrt() + cfg.adam_eps))
                 .matrix();
    gen.set_parameters(theta);

    if (it % cfg.eval_every == 0 || it == cfg.iterations) {
      MeanEmbedding synthetic = embed(map, gen.generate(latents));
      EvalRecord rec;
      rec.iteration = it;
      rec.private_loss = private_mmd_squared(private_target, synthetic);
      if (!std::isfinite(rec.private_loss)) {
        throw TrainingError("non-finite training loss", it);
      }
      rec.true_loss = true_target
                          ? mmd_squared(*true_target, synthetic)
                          : std::numeric_limits<double>::quiet_NaN();
      result.history.push_back(rec);
    }

    if (cfg.early_stopping &&
        (it % cfg.early_stopping->check_every == 0 || it == cfg.iterations)) {
      CheckpointRecord cp;
      cp.iteration = it;
      cp.proxy_score =
          private_early_stopping_score(gen, *proxy_target, proxy_map, latents);
      cp.theta = theta;
      result.checkpoints.push_back(std::move(cp));
    }
  }

  result.theta_final = theta;
  if (cfg.early_stopping) {
    std::vector<double> scores;
    scores.reserve(result.checkpoints.size());
    for (const CheckpointRecord& cp : result.checkpoints) {
      scores.push_back(cp.proxy_score);
    }
    const std::size_t idx = select_checkpoint(scores);
    result.selected_iteration = result.checkpoints[idx].iteration;
    result.theta_selected = result.checkpoints[idx].theta;
  } else {
    result.selected_iteration = cfg.iterations;
    result.theta_selected = theta;
  }
  return result;
}

double private_early_stopping_score(const Generator& gen,
                                    const MeanEmbedding& proxy_target,
                                    const FeatureMap& proxy_map,
                                    const Eigen::MatrixXd& seeds) {
  MeanEmbedding synthetic = embed(proxy_map, gen.generate(seeds));
  return private_mmd_squared(proxy_target, synthetic);
}

std::size_t select_checkpoint(const std::vector<double>& proxy_scores) {
  if (proxy_scores.empty()) {
    throw std::domain_error("proxy score history is empty");
  }
  return static_cast<std::size_t>(
      std::min_element(proxy_scores.begin(), proxy_scores.end()) -
      proxy_scores.begin());
}

}  // namespace dpembed
