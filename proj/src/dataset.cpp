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

#include "mmf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmf/errors.hpp"
#include "mmf/random.hpp"

namespace mmf {

namespace {

int intern(std::vector<std::string>& ids,
           std::unordered_map<std::string, int>& map, const std::string& id) {
  auto it = map.find(id);
  if (it != map.end()) return it->second;
  int idx = static_cast<int>(ids.size());
  ids.push_back(id);
  map.emplace(id, idx);
  return idx;
}

}  // namespace

RatingDataset RatingDataset::from_triples(
    const std::vector<RatingTriple>& triples) {
  RatingDataset ds;
  std::unordered_map<std::int64_t, std::size_t> seen;  // (user, item) -> slot
  seen.reserve(triples.size());
  ds.records_.reserve(triples.size());
  for (const RatingTriple& t : triples) {
    if (!std::isfinite(t.rating))
      throw ArgumentError("non-finite rating for user '" + t.user_id +
                          "', item '" + t.item_id + "'");
    int u = intern(ds.user_ids_, ds.user_map_, t.user_id);
    int i = intern(ds.item_ids_, ds.item_map_, t.item_id);
    std::int64_t key = static_cast<std::int64_t>(u) << 32 | i;
    auto [it, fresh] = seen.emplace(key, ds.records_.size());
    if (fresh) {
      ds.records_.push_back({u, i, t.rating});
    } else {
      ds.records_[it->second].rating = t.rating;  // last occurrence wins
      ++ds.duplicates_;
    }
  }
  return ds;
}

std::optional<int> RatingDataset::user_index(std::string_view user_id) const {
  auto it = user_map_.find(std::string(user_id));
  if (it == user_map_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> RatingDataset::item_index(std::string_view item_id) const {
  auto it = item_map_.find(std::string(item_id));
  if (it == item_map_.end()) return std::nullopt;
  return it->second;
}

double RatingDataset::mean_rating() const {
  if (records_.empty()) throw EmptyDataError("mean of an empty rating set");
  double sum = 0;
  for (const auto& r : records_) sum += r.rating;
  return sum / static_cast<double>(records_.size());
}

AttributeCatalog AttributeCatalog::from_rows(
    const std::vector<AttributeRow>& rows) {
  AttributeCatalog cat;
  for (const AttributeRow& row : rows) {
    int t = intern(cat.types_, cat.type_map_, row.type);
    if (t == static_cast<int>(cat.by_type_.size())) cat.by_type_.emplace_back();
    auto& values = cat.by_type_[t];
    int attr;
    auto it = values.find(row.value);
    if (it == values.end()) {
      attr = cat.num_attributes();
      values.emplace(row.value, attr);
      cat.attr_type_.push_back(t);
      cat.attr_value_.push_back(row.value);
    } else {
      attr = it->second;
    }
    int item = intern(cat.item_ids_, cat.item_map_, row.item_id);
    if (item == static_cast<int>(cat.item_attrs_.size()))
      cat.item_attrs_.emplace_back();
    cat.item_attrs_[item].push_back(attr);
  }
  for (auto& attrs : cat.item_attrs_) {
    std::sort(attrs.begin(), attrs.end());
    attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  }
  return cat;
}

const std::string& AttributeCatalog::type_of(int attr) const {
  if (attr < 0 || attr >= num_attributes())
    throw IndexError("attribute index " + std::to_string(attr) +
                     " out of range");
  return types_[attr_type_[attr]];
}

int AttributeCatalog::type_index_of(int attr) const {
  if (attr < 0 || attr >= num_attributes())
    throw IndexError("attribute index " + std::to_string(attr) +
                     " out of range");
  return attr_type_[attr];
}

const std::string& AttributeCatalog::value_of(int attr) const {
  if (attr < 0 || attr >= num_attributes())
    throw IndexError("attribute index " + std::to_string(attr) +
                     " out of range");
  return attr_value_[attr];
}

std::optional<int> AttributeCatalog::find(std::string_view type,
                                          std::string_view value) const {
  auto t = type_map_.find(std::string(type));
  if (t == type_map_.end()) return std::nullopt;
  const auto& values = by_type_[t->second];
  auto it = values.find(std::string(value));
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::size_t AttributeCatalog::type_size(std::string_view type) const {
  auto t = type_map_.find(std::string(type));
  if (t == type_map_.end()) return 0;
  return by_type_[t->second].size();
}

std::vector<int> AttributeCatalog::indices_of_type(
    std::string_view type) const {
  std::vector<int> out;
  auto t = type_map_.find(std::string(type));
  if (t == type_map_.end()) return out;
  for (int k = 0; k < num_attributes(); ++k)
    if (attr_type_[k] == t->second) out.push_back(k);
  return out;
}

const std::vector<int>& AttributeCatalog::attributes_of(
    std::string_view item_id) const {
  static const std::vector<int> kEmpty;
  auto it = item_map_.find(std::string(item_id));
  if (it == item_map_.end()) return kEmpty;
  return item_attrs_[it->second];
}

std::vector<std::string> AttributeCatalog::items_without_attributes(
    std::span<const std::string> universe) const {
  std::vector<std::string> out;
  for (const std::string& id : universe)
    if (attributes_of(id).empty()) out.push_back(id);
  return out;
}

std::vector<AttributeRow> AttributeCatalog::rows() const {
  std::vector<AttributeRow> out;
  for (std::size_t i = 0; i < item_ids_.size(); ++i)
    for (int attr : item_attrs_[i])
      out.push_back({item_ids_[i], types_[attr_type_[attr]],
                     attr_value_[attr]});
  return out;
}

AttributeCatalog AttributeCatalog::without_type(std::string_view type) const {
  std::vector<AttributeRow> kept;
  for (AttributeRow& row : rows())
    if (row.type != type) kept.push_back(std::move(row));
  return from_rows(kept);
}

AttributeCatalog AttributeCatalog::merged_with(
    const AttributeCatalog& other) const {
  std::vector<AttributeRow> combined;
  for (const AttributeRow& row : rows())
    if (other.type_map_.find(row.type) == other.type_map_.end())
      combined.push_back(row);
  for (const AttributeRow& row : other.rows()) combined.push_back(row);
  return from_rows(combined);
}

double compute_rate(const RatingDataset& ds) {
  if (ds.num_users() == 0 || ds.num_items() == 0)
    throw UndefinedDensityError("rating density needs users and items");
  return static_cast<double>(ds.size()) /
         (static_cast<double>(ds.num_items()) *
          static_cast<double>(ds.num_users()));
}

double compute_dense_rate(const AttributeCatalog& cat,
                          std::span<const std::string> items) {
  if (items.empty())
    throw UndefinedDensityError("attribute density needs items");
  // Assignment totals and distinct vocabularies per type, both scoped to
  // the given item universe. Types that never occur on it drop out of the
  // average.
  std::vector<std::size_t> type_totals(cat.num_types(), 0);
  std::vector<std::vector<char>> seen(cat.num_types());
  for (int t = 0; t < cat.num_types(); ++t)
    seen[t].assign(cat.num_attributes(), 0);
  for (const std::string& id : items) {
    for (int attr : cat.attributes_of(id)) {
      const int t = cat.type_index_of(attr);
      type_totals[t] += 1;
      seen[t][attr] = 1;
    }
  }
  double sum = 0;
  int counted_types = 0;
  for (int t = 0; t < cat.num_types(); ++t) {
    if (type_totals[t] == 0) continue;
    const auto distinct = static_cast<double>(
        std::count(seen[t].begin(), seen[t].end(), 1));
    const double average = static_cast<double>(type_totals[t]) /
                           static_cast<double>(items.size());
    sum += average / distinct;
    ++counted_types;
  }
  if (counted_types == 0)
    throw UndefinedDensityError("no attributes occur on the given items");
  return sum / counted_types;
}

SplitResult split(const RatingDataset& ds, const SplitSpec& spec) {
  if (ds.empty()) throw EmptyDataError("cannot split an empty dataset");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in (0, 1)");

  std::vector<char> in_test(ds.size(), 0);
  Rng rng(spec.seed);

  if (spec.kind == SplitKind::random_holdout) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    auto take = static_cast<std::size_t>(
        std::llround(static_cast<double>(ds.size()) * spec.test_fraction));
    for (std::size_t i = 0; i < take && i < order.size(); ++i)
      in_test[order[i]] = 1;
  } else {
    std::vector<int> items(ds.num_items());
    std::iota(items.begin(), items.end(), 0);
    rng.shuffle(items);
    auto take = static_cast<std::size_t>(std::llround(
        static_cast<double>(ds.num_items()) * spec.test_fraction));
    std::vector<char> held(ds.num_items(), 0);
    for (std::size_t i = 0; i < take && i < items.size(); ++i)
      held[items[i]] = 1;
    for (std::size_t r = 0; r < ds.size(); ++r)
      in_test[r] = held[ds.records()[r].item];
  }

  std::vector<RatingTriple> train, test;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    (in_test[r] ? test : train).push_back(ds.triple(ds.records()[r]));
  }
  return {RatingDataset::from_triples(train),
          RatingDataset::from_triples(test)};
}

}  // namespace mmf
