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

#ifndef MMF_TESTS_SUPPORT_HPP
#define MMF_TESTS_SUPPORT_HPP

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mmf/dataset.hpp"
#include "mmf/mmf.hpp"
#include "mmf/random.hpp"

namespace mmf::test {

inline RatingDataset dataset(const std::vector<RatingTriple>& triples) {
  return RatingDataset::from_triples(triples);
}

inline AttributeCatalog catalog(const std::vector<AttributeRow>& rows) {
  return AttributeCatalog::from_rows(rows);
}

/// Temporary directory wiped on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("mmf-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path write_file(const std::filesystem::path& path,
                                        const std::string& content) {
  std::ofstream out(path);
  out << content;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

/// Central difference of `f` under perturbation of one scalar location.
/// Independent oracle for the analytic gradients: it only evaluates the
/// loss.
inline double central_difference(const std::function<double()>& f,
                                 double& location, double h = 1e-5) {
  const double keep = location;
  location = keep + h;
  const double hi = f();
  location = keep - h;
  const double lo = f();
  location = keep;
  return (hi - lo) / (2.0 * h);
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Bitwise matrix equality (determinism checks, not tolerance checks).
template <class A, class B>
bool exactly_equal(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

/// Random small problem for gradient checks: up to 5 users/items/attributes,
/// dim up to 4, most (user, item) pairs observed.
struct SmallInstance {
  RatingDataset ds;
  AttributeCatalog cat;
  MmfModel<double> model;
};

inline SmallInstance small_instance(Rng& rng, Variant variant) {
  const int n_users = 2 + static_cast<int>(rng.below(4));   // 2..5
  const int n_items = 2 + static_cast<int>(rng.below(4));   // 2..5
  const int n_attrs = 2 + static_cast<int>(rng.below(4));   // 2..5
  const int dim = 1 + static_cast<int>(rng.below(4));       // 1..4

  std::vector<AttributeRow> rows;
  for (int j = 0; j < n_items; ++j) {
    const int count = 1 + static_cast<int>(rng.below(n_attrs));
    for (int c = 0; c < count; ++c) {
      const int k = static_cast<int>(rng.below(n_attrs));
      rows.push_back({"i" + std::to_string(j), "t" + std::to_string(k % 2),
                      "a" + std::to_string(k)});
    }
  }
  // Attributes not attached to any item still need factor rows; attach each
  // once so the catalog covers the whole vocabulary.
  for (int k = 0; k < n_attrs; ++k)
    rows.push_back({"i0", "t" + std::to_string(k % 2),
                    "a" + std::to_string(k)});

  std::vector<RatingTriple> triples;
  for (int u = 0; u < n_users; ++u)
    for (int j = 0; j < n_items; ++j)
      if (rng.uniform() < 0.75)
        triples.push_back({"u" + std::to_string(u), "i" + std::to_string(j),
                           rng.uniform(1.0, 5.0)});
  if (triples.empty()) triples.push_back({"u0", "i0", 3.0});

  SmallInstance inst;
  inst.ds = dataset(triples);
  inst.cat = catalog(rows);
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.lambda = rng.uniform(0.0, 0.2);
  cfg.seed = rng.next();
  inst.model = init_mmf(inst.ds, inst.cat, cfg, variant);
  if (preference_trainable(variant))
    for (int u = 0; u < inst.model.num_users(); ++u)
      for (int k = 0; k < inst.model.num_attributes(); ++k)
        inst.model.preference(u, k) = rng.uniform(0.5, 1.5);
  if (performance_trainable(variant))
    for (int j = 0; j < inst.model.num_items(); ++j)
      for (int k = 0; k < inst.model.num_attributes(); ++k)
        inst.model.performance(j, k) = rng.uniform(0.5, 1.5);
  return inst;
}

/// Catalog where items share attributes from a common pool, plus a planted
/// model whose noise-free ratings span a realistic range. Used by the
/// recovery, ablation and cold-start constructions.
struct PlantedProblem {
  RatingDataset ds;
  AttributeCatalog cat;
  MmfModel<double> truth;
};

inline PlantedProblem planted_problem(std::uint64_t seed, int n_users,
                                      int n_items, int n_attrs, int dim,
                                      int attrs_per_item,
                                      bool heterogeneous_weights,
                                      double observed_fraction = 1.0,
                                      bool centered = false) {
  Rng rng(seed);
  std::vector<AttributeRow> rows;
  for (int j = 0; j < n_items; ++j) {
    std::vector<char> used(n_attrs, 0);
    int placed = 0;
    while (placed < attrs_per_item) {
      const int k = static_cast<int>(rng.below(n_attrs));
      if (used[k]) continue;
      used[k] = 1;
      ++placed;
      rows.push_back({"i" + std::to_string(j), k % 2 == 0 ? "genre" : "cast",
                      "a" + std::to_string(k)});
    }
  }
  AttributeCatalog cat = catalog(rows);

  // All-pairs placeholder ratings give the dataset its final shape; the
  // planted model then overwrites the values.
  std::vector<RatingTriple> triples;
  for (int u = 0; u < n_users; ++u)
    for (int j = 0; j < n_items; ++j)
      if (observed_fraction >= 1.0 || rng.uniform() < observed_fraction)
        triples.push_back(
            {"u" + std::to_string(u), "i" + std::to_string(j), 0.0});
  // Every user and item must appear at least once for the index maps to
  // cover them.
  for (int u = 0; u < n_users; ++u)
    triples.push_back(
        {"u" + std::to_string(u), "i" + std::to_string(u % n_items), 0.0});
  for (int j = 0; j < n_items; ++j)
    triples.push_back(
        {"u" + std::to_string(j % n_users), "i" + std::to_string(j), 0.0});
  RatingDataset shape = dataset(triples);

  TrainConfig cfg;
  cfg.dim = dim;
  cfg.seed = rng.next();
  MmfModel<double> truth = init_mmf(shape, cat, cfg, Variant::full);
  // Two planting styles. Centered: signed ratings on the scale of the
  // model's own initialization, so nothing forces the weight families away
  // from their neutral 1 while training. Uncentered: positive factors so
  // attribute ratings land around 2-4 like a real star scale.
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int u = 0; u < truth.num_users(); ++u)
    for (int c = 0; c < dim; ++c)
      truth.user_factors(u, c) = centered
                                     ? rng.uniform(-0.8, 0.8) * scale
                                     : rng.uniform(0.6, 1.4) * scale;
  for (int k = 0; k < truth.num_attributes(); ++k)
    for (int c = 0; c < dim; ++c)
      truth.attr_factors(k, c) = centered
                                     ? rng.uniform(-0.8, 0.8) * scale * 3.0
                                     : rng.uniform(0.6, 1.4) * scale * 3.0;
  if (heterogeneous_weights) {
    for (int u = 0; u < truth.num_users(); ++u)
      for (int k = 0; k < truth.num_attributes(); ++k)
        truth.preference(u, k) = rng.uniform(0.4, 1.6);
    for (int j = 0; j < truth.num_items(); ++j)
      for (int k = 0; k < truth.num_attributes(); ++k)
        truth.performance(j, k) = rng.uniform(0.4, 1.6);
  }

  for (RatingTriple& t : triples) {
    const int u = *shape.user_index(t.user_id);
    const int j = *shape.item_index(t.item_id);
    t.rating = predict(truth, cat, u, j);
  }
  PlantedProblem p;
  p.ds = dataset(triples);
  p.cat = std::move(cat);
  p.truth = std::move(truth);
  return p;
}

}  // namespace mmf::test

#endif  // MMF_TESTS_SUPPORT_HPP
