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

#ifndef MMF_INTERPRETABILITY_HPP
#define MMF_INTERPRETABILITY_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmf/dataset.hpp"
#include "mmf/errors.hpp"
#include "mmf/io.hpp"
#include "mmf/mmf.hpp"

namespace mmf {

struct ContributionEntry {
  int attribute = 0;
  std::string type;
  std::string value;
  double raw = 0;          // this attribute's share of the predicted rating
  double percent = 0;      // raw / sum(raw) * 100; may leave [0, 100]
  double percent_abs = 0;  // |raw| / sum(|raw|) * 100, for pie-style display
};

struct ContributionBreakdown {
  std::string user_id;
  std::string item_id;
  double prediction = 0;
  std::vector<ContributionEntry> entries;
};

/// Splits a prediction into its per-attribute terms. The raw entries sum to
/// the predicted rating exactly (up to rounding); two normalizations are
/// reported because raw contributions may be negative.
template <class Scalar>
ContributionBreakdown contribution_breakdown(const MmfModel<Scalar>& m,
                                             const AttributeCatalog& cat,
                                             int user, int item) {
  detail::check_index(user, m.num_users(), "user");
  detail::check_index(item, m.num_items(), "item");
  detail::check_catalog_alignment(m, cat);
  const std::vector<int>& attrs = cat.attributes_of(m.item_ids[item]);
  if (attrs.empty())
    throw NoAttributesError("item '" + m.item_ids[item] +
                            "' has no attributes to explain");

  ContributionBreakdown b;
  b.user_id = m.user_ids[user];
  b.item_id = m.item_ids[item];
  const auto count = static_cast<double>(attrs.size());
  double total = 0, total_abs = 0;
  for (int k : attrs) {
    ContributionEntry e;
    e.attribute = k;
    e.type = m.attr_types[k];
    e.value = m.attr_values[k];
    e.raw = static_cast<double>(m.preference(user, k) *
                                m.performance(item, k) *
                                m.user_factors.row(user).dot(
                                    m.attr_factors.row(k))) /
            count;
    total += e.raw;
    total_abs += std::abs(e.raw);
    b.entries.push_back(std::move(e));
  }
  if (total == 0 || total_abs == 0)
    throw ArgumentError("contributions sum to zero; shares are undefined");
  for (ContributionEntry& e : b.entries) {
    e.percent = e.raw / total * 100.0;
    e.percent_abs = std::abs(e.raw) / total_abs * 100.0;
  }
  b.prediction = total;
  return b;
}

/// The `k` candidates closest to the query attribute in latent space
/// (Euclidean distance between attribute factor rows), query excluded, ties
/// broken by ascending attribute index.
template <class Scalar>
std::vector<int> nearest_attributes(const MmfModel<Scalar>& m, int query,
                                    int k, std::span<const int> candidates) {
  detail::check_index(query, m.num_attributes(), "attribute");
  if (k <= 0) throw ArgumentError("neighbor count must be positive");
  std::vector<std::pair<double, int>> scored;
  scored.reserve(candidates.size());
  for (int c : candidates) {
    detail::check_index(c, m.num_attributes(), "attribute");
    if (c == query) continue;
    const double dist = static_cast<double>(
        (m.attr_factors.row(c) - m.attr_factors.row(query)).norm());
    scored.emplace_back(dist, c);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int> out;
  out.reserve(std::min<std::size_t>(scored.size(), k));
  for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k);
       ++i)
    out.push_back(scored[i].second);
  return out;
}

/// Same, over the whole attribute vocabulary.
template <class Scalar>
std::vector<int> nearest_attributes(const MmfModel<Scalar>& m, int query,
                                    int k) {
  std::vector<int> all(m.num_attributes());
  std::iota(all.begin(), all.end(), 0);
  return nearest_attributes(m, query, k, all);
}

/// Attribute-aware rating difference: the user's mean rating over rated
/// items carrying the query attribute or one of its k nearest same-type
/// neighbors, minus the user's overall mean rating. Empty neighborhood
/// rating set yields nullopt (undefined, distinct from 0).
template <class Scalar>
std::optional<double> aad(const MmfModel<Scalar>& m, const RatingDataset& ds,
                          const AttributeCatalog& cat, int user, int attr,
                          int k = 5) {
  detail::check_index(user, m.num_users(), "user");
  detail::check_index(attr, m.num_attributes(), "attribute");
  detail::check_catalog_alignment(m, cat);
  if (k <= 0) throw ArgumentError("neighbor count must be positive");

  // Same-type neighborhood; cross-type distances would compare unrelated
  // vocabularies.
  const std::vector<int> candidates =
      cat.indices_of_type(m.attr_types[attr]);
  std::vector<char> in_neighborhood(m.num_attributes(), 0);
  in_neighborhood[attr] = 1;
  for (int n : nearest_attributes(m, attr, k, candidates))
    in_neighborhood[n] = 1;

  const auto ds_user = ds.user_index(m.user_ids[user]);
  if (!ds_user) throw ArgumentError("user '" + m.user_ids[user] +
                                    "' has no ratings in the dataset");
  double all_sum = 0, hit_sum = 0;
  std::size_t all_n = 0, hit_n = 0;
  for (const RatingRecord& r : ds.records()) {
    if (r.user != *ds_user) continue;
    all_sum += r.rating;
    ++all_n;
    for (int a : cat.attributes_of(ds.item_ids()[r.item])) {
      if (in_neighborhood[a]) {
        hit_sum += r.rating;
        ++hit_n;
        break;
      }
    }
  }
  if (all_n == 0)
    throw ArgumentError("user '" + m.user_ids[user] + "' has no ratings");
  if (hit_n == 0) return std::nullopt;
  return hit_sum / static_cast<double>(hit_n) -
         all_sum / static_cast<double>(all_n);
}

/// Pearson correlation between contribution percentages and AADs across an
/// item's attributes; entries with undefined AAD are skipped. Undefined
/// (nullopt) with fewer than two valid pairs or zero variance.
inline std::optional<double> contribution_aad_correlation(
    const ContributionBreakdown& breakdown,
    std::span<const std::optional<double>> aads) {
  if (aads.size() != breakdown.entries.size())
    throw ArgumentError("one AAD per breakdown entry expected");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < aads.size(); ++i) {
    if (!aads[i]) continue;
    xs.push_back(breakdown.entries[i].percent);
    ys.push_back(*aads[i]);
  }
  if (xs.size() < 2) return std::nullopt;
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  if (*xmin == *xmax || *ymin == *ymax) return std::nullopt;  // no variance
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

enum class VectorKind { users, attributes };

/// Writes latent vectors as CSV `id,type,v1..vd` for external projection
/// tools. An empty index list produces a header-only file.
template <class Scalar>
void export_vectors(const MmfModel<Scalar>& m, VectorKind kind,
                    std::span<const int> indices,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "id,type";
  for (int c = 0; c < m.dim(); ++c) out << ",v" << (c + 1);
  out << '\n';
  for (int idx : indices) {
    if (kind == VectorKind::users) {
      detail::check_index(idx, m.num_users(), "user");
      out << csv_escape(m.user_ids[idx]) << ",user";
      for (int c = 0; c < m.dim(); ++c)
        out << ',' << format_double(static_cast<double>(
                          m.user_factors(idx, c)));
    } else {
      detail::check_index(idx, m.num_attributes(), "attribute");
      out << csv_escape(m.attr_values[idx]) << ','
          << csv_escape(m.attr_types[idx]);
      for (int c = 0; c < m.dim(); ++c)
        out << ',' << format_double(static_cast<double>(
                          m.attr_factors(idx, c)));
    }
    out << '\n';
  }
}

struct VectorTableRow {
  std::string id;
  std::string type;
  DenseVector<double> values;
};

struct VectorTable {
  int dim = 0;
  std::vector<VectorTableRow> rows;
};

/// Reads a file produced by export_vectors.
VectorTable load_vectors(const std::filesystem::path& path);

}  // namespace mmf

#endif  // MMF_INTERPRETABILITY_HPP
