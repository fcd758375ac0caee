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

#ifndef MMF_DATASET_HPP
#define MMF_DATASET_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mmf {

/// One observed rating, by external ids.
struct RatingTriple {
  std::string user_id;
  std::string item_id;
  double rating = 0;
};

/// One observed rating, by dense indices into a RatingDataset's maps.
struct RatingRecord {
  int user = 0;
  int item = 0;
  double rating = 0;
};

/// Immutable sparse rating data: (user, item, rating) records plus the
/// user/item id <-> dense index bijections, built in first-appearance order.
/// Duplicate (user, item) pairs collapse to a single record; the last
/// occurrence wins and the collision count is kept for diagnostics.
class RatingDataset {
 public:
  RatingDataset() = default;

  static RatingDataset from_triples(const std::vector<RatingTriple>& triples);

  const std::vector<RatingRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  int num_users() const { return static_cast<int>(user_ids_.size()); }
  int num_items() const { return static_cast<int>(item_ids_.size()); }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  std::optional<int> user_index(std::string_view user_id) const;
  std::optional<int> item_index(std::string_view item_id) const;

  /// Mean of all stored ratings. Throws EmptyDataError on an empty dataset.
  double mean_rating() const;

  /// Number of (user, item) collisions dropped during construction.
  std::size_t duplicate_count() const { return duplicates_; }

  RatingTriple triple(const RatingRecord& r) const {
    return {user_ids_[r.user], item_ids_[r.item], r.rating};
  }

 private:
  std::vector<RatingRecord> records_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, int> user_map_;
  std::unordered_map<std::string, int> item_map_;
  std::size_t duplicates_ = 0;
};

/// One attribute assignment row of the canonical attribute file.
struct AttributeRow {
  std::string item_id;
  std::string type;
  std::string value;
};

/// Immutable per-item attribute sets. Attributes are namespaced by type and
/// numbered with one dense global index per distinct (type, value) pair, in
/// first-appearance order. Items keep their attribute index sets sorted.
class AttributeCatalog {
 public:
  AttributeCatalog() = default;

  static AttributeCatalog from_rows(const std::vector<AttributeRow>& rows);

  int num_attributes() const { return static_cast<int>(attr_value_.size()); }
  int num_types() const { return static_cast<int>(types_.size()); }

  const std::vector<std::string>& types() const { return types_; }

  const std::string& type_of(int attr) const;
  int type_index_of(int attr) const;
  const std::string& value_of(int attr) const;

  std::optional<int> find(std::string_view type, std::string_view value) const;

  /// Distinct attributes of one type (N_i in the density statistic).
  std::size_t type_size(std::string_view type) const;

  /// All global indices belonging to one type, ascending.
  std::vector<int> indices_of_type(std::string_view type) const;

  /// Sorted attribute index set M_j for an item; empty for unknown items.
  const std::vector<int>& attributes_of(std::string_view item_id) const;

  /// Items mentioned in the catalog, first-appearance order.
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  /// Items in `universe` that end up with an empty attribute set.
  std::vector<std::string> items_without_attributes(
      std::span<const std::string> universe) const;

  /// Rebuilds the catalog without one attribute type.
  AttributeCatalog without_type(std::string_view type) const;

  /// Rebuilds with `other`'s rows appended; types present in `other` replace
  /// the same-named types here.
  AttributeCatalog merged_with(const AttributeCatalog& other) const;

  /// Flattens back to rows (items in first-appearance order, attributes
  /// ascending). from_rows(rows()) reproduces the same content; global
  /// indices may renumber, so derived catalogs pair with freshly built
  /// models.
  std::vector<AttributeRow> rows() const;

 private:
  std::vector<std::string> types_;
  std::unordered_map<std::string, int> type_map_;
  std::vector<int> attr_type_;                                // attr -> type
  std::vector<std::string> attr_value_;                       // attr -> value
  std::vector<std::unordered_map<std::string, int>> by_type_; // value -> attr
  std::vector<std::string> item_ids_;
  std::unordered_map<std::string, int> item_map_;
  std::vector<std::vector<int>> item_attrs_;
};

/// Rating density N_r / (N_p * N_u). Throws UndefinedDensityError when the
/// dataset has no users or no items.
double compute_rate(const RatingDataset& ds);

/// Attribute density: the per-type ratio of mean attribute count per item to
/// the distinct attribute count, averaged over the types that occur on
/// `items` at all. Throws UndefinedDensityError when nothing occurs.
double compute_dense_rate(const AttributeCatalog& cat,
                          std::span<const std::string> items);

enum class SplitKind { random_holdout, item_cold_start };

struct SplitSpec {
  SplitKind kind = SplitKind::random_holdout;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  static SplitSpec random(std::uint64_t seed, double test_fraction = 0.2) {
    return {SplitKind::random_holdout, test_fraction, seed};
  }
  static SplitSpec cold_start(std::uint64_t seed, double item_fraction = 0.1) {
    return {SplitKind::item_cold_start, item_fraction, seed};
  }
};

struct SplitResult {
  RatingDataset train;
  RatingDataset test;
};

/// Deterministically partitions `ds`. Random split: round(N * fraction)
/// records drawn uniformly form the test set. Cold-start split: a seed-chosen
/// fraction of items is held out and all their ratings form the test set.
/// Record order within each side follows the original dataset.
SplitResult split(const RatingDataset& ds, const SplitSpec& spec);

}  // namespace mmf

#endif  // MMF_DATASET_HPP
