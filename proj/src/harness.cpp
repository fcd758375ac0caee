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

#include "mmf/harness.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <thread>

#include "mmf/io.hpp"

namespace mmf {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Runs cell jobs [0, n) on up to `jobs` workers. Each job writes only its
// own slot, so scheduling cannot change results.
void run_cells(std::size_t n, int jobs,
               const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

ReportCell make_mmf_cell(const RatingDataset& train, const RatingDataset& test,
                         const AttributeCatalog& cat, const TrainConfig& cfg,
                         Variant variant, const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  MmfModel<double> model = fit(train, cat, cfg, variant);
  ReportCell cell;
  cell.label = label;
  cell.model_kind = "mmf";
  cell.variant = variant_name(variant);
  cell.config = cfg;
  cell.eval = evaluate(model, cat, test, cfg.clamp_eval);
  cell.loss_trace.assign(model.loss_trace.begin(), model.loss_trace.end());
  cell.wall_seconds = seconds_since(t0);
  return cell;
}

}  // namespace

ExperimentReport run_ablation(const RatingDataset& ds,
                              const AttributeCatalog& cat,
                              const TrainConfig& cfg, int jobs) {
  cfg.validate();
  const SplitResult parts = split(ds, SplitSpec::random(cfg.seed));
  static constexpr Variant kVariants[] = {Variant::base,
                                          Variant::base_preference,
                                          Variant::base_performance,
                                          Variant::full};
  ExperimentReport report{"ablation", std::vector<ReportCell>(4)};
  run_cells(4, jobs, [&](std::size_t i) {
    report.cells[i] = make_mmf_cell(parts.train, parts.test, cat, cfg,
                                    kVariants[i], variant_name(kVariants[i]));
  });
  return report;
}

ExperimentReport run_cold_start(const RatingDataset& ds,
                                const AttributeCatalog& cat,
                                const TrainConfig& cfg, double item_fraction,
                                int jobs) {
  cfg.validate();
  const SplitResult parts =
      split(ds, SplitSpec::cold_start(cfg.seed, item_fraction));
  ExperimentReport report{"cold_start", std::vector<ReportCell>(2)};
  run_cells(2, jobs, [&](std::size_t i) {
    if (i == 0) {
      const auto t0 = std::chrono::steady_clock::now();
      MfModel<double> model = fit(parts.train, cfg);
      ReportCell cell;
      cell.label = "mf";
      cell.model_kind = "mf";
      cell.config = cfg;
      cell.eval = evaluate(model, parts.test, cfg.clamp_eval);
      cell.loss_trace.assign(model.loss_trace.begin(),
                             model.loss_trace.end());
      cell.wall_seconds = seconds_since(t0);
      report.cells[0] = std::move(cell);
    } else {
      report.cells[1] = make_mmf_cell(parts.train, parts.test, cat, cfg,
                                      Variant::full, "mmf");
    }
  });
  return report;
}

ExperimentReport run_sweep(const RatingDataset& ds,
                           const AttributeCatalog& cat, const TrainConfig& cfg,
                           SweepAxis axis, const std::vector<int>& values,
                           const std::map<int, std::filesystem::path>& topics,
                           int jobs) {
  cfg.validate();
  if (values.empty()) throw ConfigError("sweep needs at least one value");

  // Per-value catalogs are resolved up front so config errors surface
  // before any training starts.
  std::vector<AttributeCatalog> catalogs;
  std::vector<TrainConfig> configs;
  catalogs.reserve(values.size());
  configs.reserve(values.size());
  for (int value : values) {
    TrainConfig cell_cfg = cfg;
    if (axis == SweepAxis::latent_dim) {
      if (value <= 0) throw ConfigError("latent dimension must be positive");
      cell_cfg.dim = value;
      catalogs.push_back(cat);
    } else {
      if (value < 0) throw ConfigError("topic count must be non-negative");
      if (value == 0) {
        catalogs.push_back(cat.without_type("topic"));
      } else {
        auto it = topics.find(value);
        if (it == topics.end())
          throw ConfigError("no topic attribute file configured for count " +
                            std::to_string(value));
        catalogs.push_back(
            cat.without_type("topic").merged_with(load_attributes(it->second)));
      }
    }
    configs.push_back(cell_cfg);
  }

  const SplitResult parts = split(ds, SplitSpec::random(cfg.seed));
  ExperimentReport report{
      axis == SweepAxis::latent_dim ? "latent_dim_sweep" : "topic_count_sweep",
      std::vector<ReportCell>(values.size())};
  run_cells(values.size(), jobs, [&](std::size_t i) {
    report.cells[i] =
        make_mmf_cell(parts.train, parts.test, catalogs[i], configs[i],
                      Variant::full, std::to_string(values[i]));
  });
  return report;
}

}  // namespace mmf
