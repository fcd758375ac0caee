/*
 * Copyright 2026 The MMF Library Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MMF_TRAIN_CONFIG_HPP
#define MMF_TRAIN_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <optional>

#include "mmf/errors.hpp"

namespace mmf {

/// Hyperparameters shared by both trainers. Defaults are the ones the CLI
/// ships with; every field is overridable per run.
struct TrainConfig {
  int dim = 10;
  double lambda = 0.05;          // penalty on the latent factor matrices
  double learning_rate = 0.005;  // constant SGD step
  int epochs = 50;
  int batch = 1;  // records per SGD update
  std::uint64_t seed = 42;
  bool clamp_eval = false;  // clamp predictions to [1,5] when evaluating
  // Prediction for items the model cannot score; defaults to the mean
  // rating of the training data.
  std::optional<double> fallback_rating;
  // Also decay the preference/performance weights toward their learned
  // values with the same lambda. Off by default: the loss only penalizes
  // the factor matrices.
  bool regularize_weights = false;

  void validate() const {
    if (dim <= 0) throw ConfigError("dim must be positive");
    if (!(lambda >= 0) || !std::isfinite(lambda))
      throw ConfigError("lambda must be finite and non-negative");
    if (!(learning_rate >= 0) || !std::isfinite(learning_rate))
      throw ConfigError("learning_rate must be finite and non-negative");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch <= 0) throw ConfigError("batch must be positive");
    if (fallback_rating && !std::isfinite(*fallback_rating))
      throw ConfigError("fallback_rating must be finite");
  }
};

}  // namespace mmf

#endif  // MMF_TRAIN_CONFIG_HPP
