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

#ifndef MMF_EVALUATION_HPP
#define MMF_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmf/dataset.hpp"
#include "mmf/errors.hpp"
#include "mmf/mf.hpp"
#include "mmf/mmf.hpp"

namespace mmf {

inline double rmse(std::span<const double> predictions,
                   std::span<const double> truths) {
  if (predictions.size() != truths.size())
    throw ArgumentError("prediction/truth length mismatch: " +
                        std::to_string(predictions.size()) + " vs " +
                        std::to_string(truths.size()));
  if (predictions.empty()) throw ArgumentError("rmse of empty lists");
  double sum = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(predictions.size()));
}

/// Test-set accuracy and a tally of how often the model had to fall back to
/// the global train mean. `rmse` honors the clamp flag the evaluation ran
/// with; both the raw and the [1,5]-clamped numbers are always kept.
struct EvalResult {
  double rmse = 0;
  double rmse_raw = 0;
  double rmse_clamped = 0;
  std::size_t count = 0;
  std::size_t unknown_user_fallbacks = 0;
  std::size_t unknown_item_fallbacks = 0;
  std::size_t no_attribute_fallbacks = 0;

  std::size_t fallbacks() const {
    return unknown_user_fallbacks + unknown_item_fallbacks +
           no_attribute_fallbacks;
  }
};

namespace detail {

inline std::unordered_map<std::string, int> index_of(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, int> map;
  map.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    map.emplace(ids[i], static_cast<int>(i));
  return map;
}

inline EvalResult finish_eval(std::vector<double>& predictions,
                              const std::vector<double>& truths, bool clamp,
                              EvalResult partial) {
  partial.rmse_raw = rmse(predictions, truths);
  for (double& p : predictions) p = std::clamp(p, 1.0, 5.0);
  partial.rmse_clamped = rmse(predictions, truths);
  partial.rmse = clamp ? partial.rmse_clamped : partial.rmse_raw;
  partial.count = truths.size();
  return partial;
}

}  // namespace detail

/// RMSE of the baseline over a test set addressed by external ids. Users or
/// items unseen in training predict the stored global train mean.
template <class Scalar>
EvalResult evaluate(const MfModel<Scalar>& m, const RatingDataset& test,
                    bool clamp = false) {
  if (test.empty()) throw ArgumentError("empty test set");
  const auto users = detail::index_of(m.user_ids);
  const auto items = detail::index_of(m.item_ids);

  EvalResult result;
  std::vector<double> predictions, truths;
  predictions.reserve(test.size());
  truths.reserve(test.size());
  for (const RatingRecord& r : test.records()) {
    const RatingTriple t = test.triple(r);
    const auto u = users.find(t.user_id);
    const auto i = items.find(t.item_id);
    double p;
    if (u == users.end()) {
      p = static_cast<double>(m.fallback_rating);
      ++result.unknown_user_fallbacks;
    } else if (i == items.end()) {
      p = static_cast<double>(m.fallback_rating);
      ++result.unknown_item_fallbacks;
    } else {
      p = static_cast<double>(predict(m, u->second, i->second));
    }
    predictions.push_back(p);
    truths.push_back(t.rating);
  }
  return detail::finish_eval(predictions, truths, clamp, result);
}

/// RMSE of the attribute model over a test set addressed by external ids.
/// An item unseen in training is still scored through the attributes it
/// shares with training items (its per-item performance weights stay at the
/// neutral 1); only items without any such attribute fall back to the global
/// train mean, as do unknown users.
template <class Scalar>
EvalResult evaluate(const MmfModel<Scalar>& m, const AttributeCatalog& cat,
                    const RatingDataset& test, bool clamp = false) {
  if (test.empty()) throw ArgumentError("empty test set");
  detail::check_catalog_alignment(m, cat);
  const auto users = detail::index_of(m.user_ids);
  const auto items = detail::index_of(m.item_ids);

  // Attributes that actually occur on training items; only those carry
  // learned information to new items.
  std::vector<char> seen_in_training(m.num_attributes(), 0);
  for (const std::string& id : m.item_ids)
    for (int k : cat.attributes_of(id)) seen_in_training[k] = 1;

  EvalResult result;
  std::vector<double> predictions, truths;
  predictions.reserve(test.size());
  truths.reserve(test.size());
  std::vector<int> usable;
  for (const RatingRecord& r : test.records()) {
    const RatingTriple t = test.triple(r);
    const auto u = users.find(t.user_id);
    double p;
    if (u == users.end()) {
      p = static_cast<double>(m.fallback_rating);
      ++result.unknown_user_fallbacks;
    } else if (auto i = items.find(t.item_id); i != items.end()) {
      const std::vector<int>& attrs = cat.attributes_of(t.item_id);
      if (attrs.empty()) ++result.no_attribute_fallbacks;
      p = static_cast<double>(
          detail::predict_over(m, attrs, u->second, i->second));
    } else {
      const std::vector<int>& attrs = cat.attributes_of(t.item_id);
      usable.clear();
      for (int k : attrs)
        if (seen_in_training[k]) usable.push_back(k);
      if (usable.empty()) {
        p = static_cast<double>(m.fallback_rating);
        if (attrs.empty())
          ++result.unknown_item_fallbacks;
        else
          ++result.no_attribute_fallbacks;
      } else {
        Scalar sum{0};
        for (int k : usable)
          sum += m.preference(u->second, k) *
                 m.user_factors.row(u->second).dot(m.attr_factors.row(k));
        p = static_cast<double>(sum / static_cast<Scalar>(usable.size()));
      }
    }
    predictions.push_back(p);
    truths.push_back(t.rating);
  }
  return detail::finish_eval(predictions, truths, clamp, result);
}

}  // namespace mmf

#endif  // MMF_EVALUATION_HPP
