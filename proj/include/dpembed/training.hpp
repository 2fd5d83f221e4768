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

#ifndef DPEMBED_TRAINING_HPP_
#define DPEMBED_TRAINING_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dpembed/embedding.hpp"
#include "dpembed/feature_map.hpp"
#include "dpembed/generator.hpp"

namespace dpembed {

// Checkpoint selection by a separately privatized proxy score. The proxy
// noise multiplier is sigma_stopping = 10 * base sigma by convention; the
// proxy embedding (last feature layer, two moments) is released once, so
// scoring checkpoints consumes no further privacy budget.
struct EarlyStopConfig {
  double sigma_stopping = 0.0;
  int check_every = 100;  // checkpoint cadence in iterations
};

struct TrainingConfig {
  int iterations = 1000;
  int batch_size = 64;  // synthetic samples per step (fixed latent set)
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int eval_every = 10;
  std::uint64_t seed = 0;
  std::optional<EarlyStopConfig> early_stopping;
};

struct EvalRecord {
  int iteration = 0;
  double private_loss = 0.0;
  // Loss against the clean target when one was given; NaN otherwise.
  double true_loss = 0.0;
};

struct CheckpointRecord {
  int iteration = 0;
  double proxy_score = 0.0;
  Eigen::VectorXd theta;
};

struct TrainingResult {
  Eigen::VectorXd theta_final;
  Eigen::VectorXd theta_selected;
  int selected_iteration = 0;
  std::vector<EvalRecord> history;
  std::vector<CheckpointRecord> checkpoints;
};

// Minimizes the privatized MMD against private_target with Adam on a fixed
// latent set drawn once from cfg.seed. Evaluations happen at iterations
// divisible by eval_every and at the final iteration. With early stopping,
// checkpoints are scored against proxy_target through map.last_layer_map()
// at iterations divisible by check_every (plus the final iteration), and
// theta_selected is the earliest checkpoint minimizing the proxy score;
// without it, theta_selected is theta_final.
//
// true_target, when given, is only logged into history.true_loss.
// Throws TrainingError on a non-finite loss or gradient.
TrainingResult train(Generator& gen, const MeanEmbedding& private_target,
                     const FeatureMap& map, const TrainingConfig& cfg,
                     const MeanEmbedding* true_target = nullptr,
                     const MeanEmbedding* proxy_target = nullptr);

// Squared distance between the privatized proxy embedding and the
// synthetic embedding of gen's outputs under proxy_map (normally the
// last-layer two-moment view of the training feature map).
double private_early_stopping_score(const Generator& gen,
                                    const MeanEmbedding& proxy_target,
                                    const FeatureMap& proxy_map,
                                    const Eigen::MatrixXd& seeds);

// Earliest index achieving the minimum score.
std::size_t select_checkpoint(const std::vector<double>& proxy_scores);

// The fixed latent set used by train for a given config.
Eigen::MatrixXd training_latents(const TrainingConfig& cfg, int latent_dim);

}  // namespace dpembed

#endif  // DPEMBED_TRAINING_HPP_
