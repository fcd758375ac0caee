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

#ifndef MMF_MMF_HPP
#define MMF_MMF_HPP

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

/// Which weight families train; the frozen ones stay pinned at 1.
enum class Variant { base, base_preference, base_performance, full };

inline bool preference_trainable(Variant v) {
  return v == Variant::base_preference || v == Variant::full;
}
inline bool performance_trainable(Variant v) {
  return v == Variant::base_performance || v == Variant::full;
}

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::base_preference: return "base+omega";
    case Variant::base_performance: return "base+theta";
    case Variant::full: return "full";
  }
  return "?";
}

inline Variant variant_from_name(std::string_view name) {
  if (name == "base") return Variant::base;
  if (name == "base+omega") return Variant::base_preference;
  if (name == "base+theta") return Variant::base_performance;
  if (name == "full") return Variant::full;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

/// Attribute-level factorization: an item's rating is the mean of its
/// attributes' weighted ratings. Each attribute rating is the inner product
/// of a user latent vector and an attribute latent vector, scaled by the
/// user's preference weight for the attribute and the attribute's
/// performance weight inside the item.
template <class Scalar = double>
struct MmfModel {
  DenseMatrix<Scalar> user_factors;  // num_users x dim
  DenseMatrix<Scalar> attr_factors;  // num_attrs x dim
  DenseMatrix<Scalar> preference;    // omega, num_users x num_attrs
  DenseMatrix<Scalar> performance;   // theta, num_items x num_attrs
  Variant variant = Variant::full;
  Scalar lambda = 0;
  Scalar fallback_rating = 0;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<std::string> attr_types;   // aligned with attr_factors rows
  std::vector<std::string> attr_values;  // aligned with attr_factors rows
  std::vector<Scalar> loss_trace;

  int dim() const { return static_cast<int>(user_factors.cols()); }
  int num_users() const { return static_cast<int>(user_factors.rows()); }
  int num_items() const { return static_cast<int>(performance.rows()); }
  int num_attributes() const { return static_cast<int>(attr_factors.rows()); }
};

template <class Scalar>
struct MmfGradients {
  DenseMatrix<Scalar> user_factors;
  DenseMatrix<Scalar> attr_factors;
  DenseMatrix<Scalar> preference;
  DenseMatrix<Scalar> performance;
};

namespace detail {

template <class Scalar>
void check_catalog_alignment(const MmfModel<Scalar>& m,
                             const AttributeCatalog& cat) {
  if (m.num_attributes() != cat.num_attributes())
    throw ArgumentError("catalog has " +
                        std::to_string(cat.num_attributes()) +
                        " attributes but the model was built with " +
                        std::to_string(m.num_attributes()));
}

/// Attribute index sets per model item index, resolved through the catalog.
template <class Scalar>
std::vector<const std::vector<int>*> attribute_lists(
    const MmfModel<Scalar>& m, const AttributeCatalog& cat) {
  check_catalog_alignment(m, cat);
  std::vector<const std::vector<int>*> lists;
  lists.reserve(m.item_ids.size());
  for (const std::string& id : m.item_ids)
    lists.push_back(&cat.attributes_of(id));
  return lists;
}

/// Mean weighted attribute rating for a known (user, item) pair.
template <class Scalar>
Scalar predict_over(const MmfModel<Scalar>& m, const std::vector<int>& attrs,
                    int user, int item) {
  if (attrs.empty()) return m.fallback_rating;
  Scalar sum{0};
  for (int k : attrs)
    sum += m.preference(user, k) * m.performance(item, k) *
           m.user_factors.row(user).dot(m.attr_factors.row(k));
  return sum / static_cast<Scalar>(attrs.size());
}

}  // namespace detail

/// Predicted rating for model indices (user, item). Items with no catalog
/// attributes fall back to the stored global-mean rating.
template <class Scalar>
Scalar predict(const MmfModel<Scalar>& m, const AttributeCatalog& cat,
               int user, int item) {
  detail::check_index(user, m.num_users(), "user");
  detail::check_index(item, m.num_items(), "item");
  detail::check_catalog_alignment(m, cat);
  return detail::predict_over(m, cat.attributes_of(m.item_ids[item]), user,
                              item);
}

/// Squared error over observed records plus lambda * (|U|_F^2 + |F|_F^2).
/// The preference and performance weights are not penalized. Records must
/// index this model's maps.
template <class Scalar>
Scalar loss(const MmfModel<Scalar>& m, const RatingDataset& ds,
            const AttributeCatalog& cat) {
  const auto lists = detail::attribute_lists(m, cat);
  Scalar sq{0};
  for (const RatingRecord& r : ds.records()) {
    detail::check_index(r.user, m.num_users(), "user");
    detail::check_index(r.item, m.num_items(), "item");
    const Scalar residual =
        static_cast<Scalar>(r.rating) -
        detail::predict_over(m, *lists[r.item], r.user, r.item);
    sq += residual * residual;
  }
  return sq + m.lambda * (m.user_factors.squaredNorm() +
                          m.attr_factors.squaredNorm());
}

/// Exact gradient of the batch-restricted loss: residual terms from `batch`
/// plus the full regularization gradient on the factor matrices. Weight
/// entries untouched by the batch stay zero, and families frozen by the
/// variant stay zero everywhere.
template <class Scalar>
MmfGradients<Scalar> gradients(const MmfModel<Scalar>& m,
                               std::span<const RatingRecord> batch,
                               const AttributeCatalog& cat) {
  const auto lists = detail::attribute_lists(m, cat);
  const bool train_pref = preference_trainable(m.variant);
  const bool train_perf = performance_trainable(m.variant);

  MmfGradients<Scalar> g;
  g.user_factors = DenseMatrix<Scalar>::Zero(m.num_users(), m.dim());
  g.attr_factors = DenseMatrix<Scalar>::Zero(m.num_attributes(), m.dim());
  g.preference = DenseMatrix<Scalar>::Zero(m.num_users(), m.num_attributes());
  g.performance =
      DenseMatrix<Scalar>::Zero(m.num_items(), m.num_attributes());

  for (const RatingRecord& r : batch) {
    detail::check_index(r.user, m.num_users(), "user");
    detail::check_index(r.item, m.num_items(), "item");
    const std::vector<int>& attrs = *lists[r.item];
    if (attrs.empty()) continue;  // constant fallback term
    const Scalar residual =
        static_cast<Scalar>(r.rating) -
        detail::predict_over(m, attrs, r.user, r.item);
    const Scalar scale =
        Scalar(-2) * residual / static_cast<Scalar>(attrs.size());
    for (int k : attrs) {
      const Scalar w_pref = m.preference(r.user, k);
      const Scalar w_perf = m.performance(r.item, k);
      const Scalar rating_k =
          m.user_factors.row(r.user).dot(m.attr_factors.row(k));
      g.user_factors.row(r.user) +=
          (scale * w_pref * w_perf) * m.attr_factors.row(k);
      g.attr_factors.row(k) +=
          (scale * w_pref * w_perf) * m.user_factors.row(r.user);
      if (train_pref) g.preference(r.user, k) += scale * w_perf * rating_k;
      if (train_perf) g.performance(r.item, k) += scale * w_pref * rating_k;
    }
  }
  g.user_factors += Scalar(2) * m.lambda * m.user_factors;
  g.attr_factors += Scalar(2) * m.lambda * m.attr_factors;
  return g;
}

/// The item's latent vector implied by the model: the mean of its weighted
/// attribute vectors. Its inner product with the user vector reproduces
/// predict(). Throws NoAttributesError when the item has no attributes.
template <class Scalar>
DenseVector<Scalar> item_embedding(const MmfModel<Scalar>& m,
                                   const AttributeCatalog& cat, int user,
                                   int item) {
  detail::check_index(user, m.num_users(), "user");
  detail::check_index(item, m.num_items(), "item");
  detail::check_catalog_alignment(m, cat);
  const std::vector<int>& attrs = cat.attributes_of(m.item_ids[item]);
  if (attrs.empty())
    throw NoAttributesError("item '" + m.item_ids[item] +
                            "' has no attributes");
  DenseVector<Scalar> embedding = DenseVector<Scalar>::Zero(m.dim());
  for (int k : attrs)
    embedding += m.preference(user, k) * m.performance(item, k) *
                 m.attr_factors.row(k).transpose();
  return embedding / static_cast<Scalar>(attrs.size());
}

/// Seeded model: uniform factor entries, all weights at 1 (the neutral
/// point, and the values frozen families keep).
template <class Scalar = double>
MmfModel<Scalar> init_mmf(const RatingDataset& ds, const AttributeCatalog& cat,
                          const TrainConfig& cfg,
                          Variant variant = Variant::full) {
  cfg.validate();
  if (ds.empty()) throw EmptyDataError("cannot initialize from no ratings");
  Rng rng(cfg.seed);
  MmfModel<Scalar> m;
  m.user_factors = random_factor_matrix<Scalar>(rng, ds.num_users(), cfg.dim);
  m.attr_factors =
      random_factor_matrix<Scalar>(rng, cat.num_attributes(), cfg.dim);
  m.preference =
      DenseMatrix<Scalar>::Ones(ds.num_users(), cat.num_attributes());
  m.performance =
      DenseMatrix<Scalar>::Ones(ds.num_items(), cat.num_attributes());
  m.variant = variant;
  m.lambda = static_cast<Scalar>(cfg.lambda);
  m.fallback_rating = static_cast<Scalar>(
      cfg.fallback_rating ? *cfg.fallback_rating : ds.mean_rating());
  m.user_ids = ds.user_ids();
  m.item_ids = ds.item_ids();
  m.attr_types.reserve(cat.num_attributes());
  m.attr_values.reserve(cat.num_attributes());
  for (int k = 0; k < cat.num_attributes(); ++k) {
    m.attr_types.push_back(cat.type_of(k));
    m.attr_values.push_back(cat.value_of(k));
  }
  return m;
}

/// Mini-batch SGD, `cfg.epochs` seeded-shuffled passes; batch size 1 means
/// one update per record. Rows touched by an update also receive the
/// regularization pull; frozen weight families are never written. Appends
/// the full training loss per epoch to the trace and throws DivergenceError
/// when it turns non-finite.
template <class Scalar>
void train(MmfModel<Scalar>& m, const RatingDataset& ds,
           const AttributeCatalog& cat, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.empty()) throw EmptyDataError("cannot train on no ratings");
  if (m.num_users() != ds.num_users() || m.num_items() != ds.num_items() ||
      m.user_ids != ds.user_ids() || m.item_ids != ds.item_ids())
    throw ArgumentError("model id maps do not match dataset");
  const auto lists = detail::attribute_lists(m, cat);

  const bool train_pref = preference_trainable(m.variant);
  const bool train_perf = performance_trainable(m.variant);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar reg = Scalar(2) * m.lambda;
  const Scalar weight_reg =
      cfg.regularize_weights ? Scalar(2) * m.lambda : Scalar(0);
  const std::size_t batch = static_cast<std::size_t>(cfg.batch);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<Scalar> attr_ratings;  // u . f_k per attribute, scratch
  DenseRow<Scalar> user_delta(m.dim());
  DenseRow<Scalar> user_snapshot(m.dim());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, order.size());
      if (stop - start == 1) {
        const RatingRecord& r = ds.records()[order[start]];
        const std::vector<int>& attrs = *lists[r.item];
        if (attrs.empty()) continue;
        const auto count = static_cast<Scalar>(attrs.size());
        attr_ratings.resize(attrs.size());
        Scalar sum{0};
        for (std::size_t a = 0; a < attrs.size(); ++a) {
          const int k = attrs[a];
          attr_ratings[a] =
              m.user_factors.row(r.user).dot(m.attr_factors.row(k));
          sum += m.preference(r.user, k) * m.performance(r.item, k) *
                 attr_ratings[a];
        }
        const Scalar residual = static_cast<Scalar>(r.rating) - sum / count;
        const Scalar scale = Scalar(-2) * residual / count;

        user_delta.setZero();
        for (int k : attrs)
          user_delta += (scale * m.preference(r.user, k) *
                         m.performance(r.item, k)) *
                        m.attr_factors.row(k);
        user_snapshot = m.user_factors.row(r.user);
        m.user_factors.row(r.user) -=
            lr * (user_delta + reg * m.user_factors.row(r.user));
        for (std::size_t a = 0; a < attrs.size(); ++a) {
          const int k = attrs[a];
          const Scalar w_pref = m.preference(r.user, k);
          const Scalar w_perf = m.performance(r.item, k);
          m.attr_factors.row(k) -=
              lr * ((scale * w_pref * w_perf) * user_snapshot +
                    reg * m.attr_factors.row(k));
          if (train_pref)
            m.preference(r.user, k) -=
                lr * (scale * w_perf * attr_ratings[a] + weight_reg * w_pref);
          if (train_perf)
            m.performance(r.item, k) -=
                lr * (scale * w_pref * attr_ratings[a] + weight_reg * w_perf);
        }
      } else {
        // Accumulate the whole batch at its starting parameters, then apply.
        std::unordered_map<int, DenseRow<Scalar>> du, df;
        std::unordered_map<std::int64_t, Scalar> dpref, dperf;
        for (std::size_t s = start; s < stop; ++s) {
          const RatingRecord& r = ds.records()[order[s]];
          const std::vector<int>& attrs = *lists[r.item];
          if (attrs.empty()) continue;
          const auto count = static_cast<Scalar>(attrs.size());
          const Scalar residual =
              static_cast<Scalar>(r.rating) -
              detail::predict_over(m, attrs, r.user, r.item);
          const Scalar scale = Scalar(-2) * residual / count;
          auto [ui, ignored_u] =
              du.try_emplace(r.user, DenseRow<Scalar>::Zero(m.dim()));
          for (int k : attrs) {
            const Scalar w_pref = m.preference(r.user, k);
            const Scalar w_perf = m.performance(r.item, k);
            const Scalar rating_k =
                m.user_factors.row(r.user).dot(m.attr_factors.row(k));
            ui->second += (scale * w_pref * w_perf) * m.attr_factors.row(k);
            auto [fi, ignored_f] =
                df.try_emplace(k, DenseRow<Scalar>::Zero(m.dim()));
            fi->second +=
                (scale * w_pref * w_perf) * m.user_factors.row(r.user);
            if (train_pref)
              dpref[(static_cast<std::int64_t>(r.user) << 32) | k] +=
                  scale * w_perf * rating_k;
            if (train_perf)
              dperf[(static_cast<std::int64_t>(r.item) << 32) | k] +=
                  scale * w_pref * rating_k;
          }
        }
        for (const auto& [user, delta] : du)
          m.user_factors.row(user) -=
              lr * (delta + reg * m.user_factors.row(user));
        for (const auto& [attr, delta] : df)
          m.attr_factors.row(attr) -=
              lr * (delta + reg * m.attr_factors.row(attr));
        for (const auto& [key, delta] : dpref) {
          const int user = static_cast<int>(key >> 32);
          const int attr = static_cast<int>(key & 0xffffffff);
          m.preference(user, attr) -=
              lr * (delta + weight_reg * m.preference(user, attr));
        }
        for (const auto& [key, delta] : dperf) {
          const int item = static_cast<int>(key >> 32);
          const int attr = static_cast<int>(key & 0xffffffff);
          m.performance(item, attr) -=
              lr * (delta + weight_reg * m.performance(item, attr));
        }
      }
    }
    Scalar epoch_loss{0};
    for (const RatingRecord& r : ds.records()) {
      const Scalar residual =
          static_cast<Scalar>(r.rating) -
          detail::predict_over(m, *lists[r.item], r.user, r.item);
      epoch_loss += residual * residual;
    }
    epoch_loss += m.lambda * (m.user_factors.squaredNorm() +
                              m.attr_factors.squaredNorm());
    m.loss_trace.push_back(epoch_loss);
    if (!std::isfinite(static_cast<double>(epoch_loss)))
      throw DivergenceError("training loss became non-finite at epoch " +
                            std::to_string(epoch));
  }
}

/// init_mmf followed by train.
template <class Scalar = double>
MmfModel<Scalar> fit(const RatingDataset& ds, const AttributeCatalog& cat,
                     const TrainConfig& cfg, Variant variant = Variant::full) {
  MmfModel<Scalar> m = init_mmf<Scalar>(ds, cat, cfg, variant);
  train(m, ds, cat, cfg);
  return m;
}

}  // namespace mmf

#endif  // MMF_MMF_HPP
