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

#ifndef MMF_HARNESS_HPP
#define MMF_HARNESS_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mmf/dataset.hpp"
#include "mmf/evaluation.hpp"
#include "mmf/train_config.hpp"

namespace mmf {

/// One trained-and-evaluated configuration inside an experiment.
struct ReportCell {
  std::string label;       // variant name, sweep value, ...
  std::string model_kind;  // "mf" or "mmf"
  std::string variant;     // empty for mf
  TrainConfig config;
  EvalResult eval;
  std::vector<double> loss_trace;
  // Wall clock is diagnostic output only; it is never serialized so that
  // reruns of the same seed produce byte-identical report files.
  double wall_seconds = 0;
};

struct ExperimentReport {
  std::string name;
  std::vector<ReportCell> cells;
};

/// Trains all four weight-combination variants on one shared random split
/// and seed, evaluating each on the held-out records.
ExperimentReport run_ablation(const RatingDataset& ds,
                              const AttributeCatalog& cat,
                              const TrainConfig& cfg, int jobs = 1);

/// Holds out a seed-chosen fraction of items with all their ratings, trains
/// the baseline and the full attribute model on the rest, and evaluates
/// both on the unseen items.
ExperimentReport run_cold_start(const RatingDataset& ds,
                                const AttributeCatalog& cat,
                                const TrainConfig& cfg,
                                double item_fraction = 0.1, int jobs = 1);

enum class SweepAxis { latent_dim, topic_count };

/// One cell per value over a shared split and seed. latent_dim reuses the
/// same catalog with varying dimension. topic_count swaps the `topic`
/// attribute type: value 0 drops it, any other value loads the matching
/// topic attribute file (ConfigError when none is configured).
ExperimentReport run_sweep(
    const RatingDataset& ds, const AttributeCatalog& cat,
    const TrainConfig& cfg, SweepAxis axis, const std::vector<int>& values,
    const std::map<int, std::filesystem::path>& topic_files = {},
    int jobs = 1);

}  // namespace mmf

#endif  // MMF_HARNESS_HPP
