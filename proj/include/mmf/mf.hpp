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

#ifndef MMF_MF_HPP
#define MMF_MF_HPP

#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmf/dataset.hpp"
#include "mmf/errors.hpp"
#include "mmf/matrix.hpp"
#include "mmf/train_config.hpp"

namespace mmf {

/// Plain matrix factorization: ratings approximated by inner products of
/// user and item latent vectors. The comparison baseline.
template <class Scalar = double>
struct MfModel {
  DenseMatrix<Scalar> user_factors;  // num_users x dim
  DenseMatrix<Scalar> item_factors;  // num_items x dim
  Scalar lambda = 0;
  Scalar fallback_rating = 0;  // used for ids unseen in training
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<Scalar> loss_trace;  // full training loss after each epoch

  int dim() const { return static_cast<int>(user_factors.cols()); }
  int num_users() const { return static_cast<int>(user_factors.rows()); }
  int num_items() const { return static_cast<int>(item_factors.rows()); }
};

template <class Scalar>
struct MfGradients {
  DenseMatrix<Scalar> user_factors;
  DenseMatrix<Scalar> item_factors;
};

template <class Scalar>
Scalar predict(const MfModel<Scalar>& m, int user, int item) {
  detail::check_index(user, m.num_users(), "user");
  detail::check_index(item, m.num_items(), "item");
  return m.user_factors.row(user).dot(m.item_factors.row(item));
}

/// Squared error over the observed records plus
/// lambda * (|U|_F^2 + |V|_F^2). Records must index this model's maps.
template <class Scalar>
Scalar loss(const MfModel<Scalar>& m, const RatingDataset& ds) {
  Scalar sq{0};
  for (const RatingRecord& r : ds.records()) {
    detail::check_index(r.user, m.num_users(), "user");
    detail::check_index(r.item, m.num_items(), "item");
    const Scalar residual =
        static_cast<Scalar>(r.rating) -
        m.user_factors.row(r.user).dot(m.item_factors.row(r.item));
    sq += residual * residual;
  }
  return sq + m.lambda * (m.user_factors.squaredNorm() +
                          m.item_factors.squaredNorm());
}

/// Exact gradient of the batch-restricted loss: residual terms from `batch`
/// plus the full regularization gradient 2*lambda*U and 2*lambda*V.
template <class Scalar>
MfGradients<Scalar> gradients(const MfModel<Scalar>& m,
                              std::span<const RatingRecord> batch) {
  MfGradients<Scalar> g;
  g.user_factors = DenseMatrix<Scalar>::Zero(m.num_users(), m.dim());
  g.item_factors = DenseMatrix<Scalar>::Zero(m.num_items(), m.dim());
  for (const RatingRecord& r : batch) {
    detail::check_index(r.user, m.num_users(), "user");
    detail::check_index(r.item, m.num_items(), "item");
    const Scalar residual = static_cast<Scalar>(r.rating) -
                            m.user_factors.row(r.user).dot(
                                m.item_factors.row(r.item));
    const Scalar scale = Scalar(-2) * residual;
    g.user_factors.row(r.user) += scale * m.item_factors.row(r.item);
    g.item_factors.row(r.item) += scale * m.user_factors.row(r.user);
  }
  g.user_factors += Scalar(2) * m.lambda * m.user_factors;
  g.item_factors += Scalar(2) * m.lambda * m.item_factors;
  return g;
}

/// Seeded model with uniform factor entries; no training steps taken.
template <class Scalar = double>
MfModel<Scalar> init_mf(const RatingDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw EmptyDataError("cannot initialize from no ratings");
  Rng rng(cfg.seed);
  MfModel<Scalar> m;
  m.user_factors = random_factor_matrix<Scalar>(rng, ds.num_users(), cfg.dim);
  m.item_factors = random_factor_matrix<Scalar>(rng, ds.num_items(), cfg.dim);
  m.lambda = static_cast<Scalar>(cfg.lambda);
  m.fallback_rating = static_cast<Scalar>(
      cfg.fallback_rating ? *cfg.fallback_rating : ds.mean_rating());
  m.user_ids = ds.user_ids();
  m.item_ids = ds.item_ids();
  return m;
}

/// SGD over the observed records, `cfg.epochs` seeded-shuffled passes.
/// Factor rows touched by an update step also receive the regularization
/// pull 2*lambda*row. Appends the full training loss per epoch to the
/// model's trace and throws DivergenceError when it turns non-finite.
template <class Scalar>
void train(MfModel<Scalar>& m, const RatingDataset& ds,
           const TrainConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw EmptyDataError("cannot train on no ratings");
  if (m.num_users() != ds.num_users() || m.num_items() != ds.num_items() ||
      m.user_ids != ds.user_ids() || m.item_ids != ds.item_ids())
    throw ArgumentError("model id maps do not match dataset");

  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar reg = Scalar(2) * m.lambda;
  const std::size_t batch = static_cast<std::size_t>(cfg.batch);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  DenseRow<Scalar> user_snapshot(m.dim());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, order.size());
      if (stop - start == 1) {
        const RatingRecord& r = ds.records()[order[start]];
        const Scalar residual =
            static_cast<Scalar>(r.rating) -
            m.user_factors.row(r.user).dot(m.item_factors.row(r.item));
        const Scalar scale = Scalar(-2) * residual;
        user_snapshot = m.user_factors.row(r.user);
        m.user_factors.row(r.user) -=
            lr * (scale * m.item_factors.row(r.item) +
                  reg * m.user_factors.row(r.user));
        m.item_factors.row(r.item) -=
            lr * (scale * user_snapshot + reg * m.item_factors.row(r.item));
      } else {
        std::unordered_map<int, DenseRow<Scalar>> du, dv;
        for (std::size_t s = start; s < stop; ++s) {
          const RatingRecord& r = ds.records()[order[s]];
          const Scalar residual =
              static_cast<Scalar>(r.rating) -
              m.user_factors.row(r.user).dot(m.item_factors.row(r.item));
          const Scalar scale = Scalar(-2) * residual;
          auto [ui, unew] = du.try_emplace(r.user,
                                           DenseRow<Scalar>::Zero(m.dim()));
          ui->second += scale * m.item_factors.row(r.item);
          auto [vi, vnew] = dv.try_emplace(r.item,
                                           DenseRow<Scalar>::Zero(m.dim()));
          vi->second += scale * m.user_factors.row(r.user);
        }
        for (const auto& [user, delta] : du)
          m.user_factors.row(user) -=
              lr * (delta + reg * m.user_factors.row(user));
        for (const auto& [item, delta] : dv)
          m.item_factors.row(item) -=
              lr * (delta + reg * m.item_factors.row(item));
      }
    }
    const Scalar epoch_loss = loss(m, ds);
    m.loss_trace.push_back(epoch_loss);
    if (!std::isfinite(static_cast<double>(epoch_loss)))
      throw DivergenceError("training loss became non-finite at epoch " +
                            std::to_string(epoch));
  }
}

/// init_mf followed by train.
template <class Scalar = double>
MfModel<Scalar> fit(const RatingDataset& ds, const TrainConfig& cfg) {
  MfModel<Scalar> m = init_mf<Scalar>(ds, cfg);
  train(m, ds, cfg);
  return m;
}

}  // namespace mmf

#endif  // MMF_MF_HPP
