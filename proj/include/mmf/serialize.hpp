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

#ifndef MMF_SERIALIZE_HPP
#define MMF_SERIALIZE_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "mmf/errors.hpp"
#include "mmf/harness.hpp"
#include "mmf/mf.hpp"
#include "mmf/mmf.hpp"

namespace mmf {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

template <class Scalar>
nlohmann::json matrix_to_json(const DenseMatrix<Scalar>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(static_cast<double>(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class Scalar>
DenseMatrix<Scalar> matrix_from_json(const nlohmann::json& j,
                                     Eigen::Index rows, Eigen::Index cols,
                                     const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw FormatError(std::string("bad row count for ") + what);
  DenseMatrix<Scalar> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError(std::string("bad column count for ") + what);
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = static_cast<Scalar>(row[c].get<double>());
  }
  return m;
}

// Entries differing from the all-ones initialization, as [row, col, value].
template <class Scalar>
nlohmann::json deviations_to_json(const DenseMatrix<Scalar>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != Scalar(1))
        out.push_back({r, c, static_cast<double>(m(r, c))});
  return out;
}

template <class Scalar>
void apply_deviations(DenseMatrix<Scalar>& m, const nlohmann::json& j,
                      const char* what) {
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 3)
      throw FormatError(std::string("bad deviation entry in ") + what);
    const auto r = entry[0].get<Eigen::Index>();
    const auto c = entry[1].get<Eigen::Index>();
    if (r < 0 || r >= m.rows() || c < 0 || c >= m.cols())
      throw FormatError(std::string("deviation out of range in ") + what);
    m(r, c) = static_cast<Scalar>(entry[2].get<double>());
  }
}

inline void check_model_header(const nlohmann::json& j,
                               const std::filesystem::path& path) {
  if (!j.is_object() || j.value("format", "") != "mmf-model")
    throw FormatError("'" + path.string() + "' is not a model file");
  if (j.value("version", 0) != kModelFormatVersion)
    throw FormatError("'" + path.string() + "': unsupported model version");
}

}  // namespace detail

template <class Scalar>
nlohmann::json model_to_json(const MfModel<Scalar>& m) {
  return nlohmann::json{
      {"format", "mmf-model"},
      {"version", kModelFormatVersion},
      {"kind", "mf"},
      {"dim", m.dim()},
      {"lambda", static_cast<double>(m.lambda)},
      {"fallback_rating", static_cast<double>(m.fallback_rating)},
      {"user_ids", m.user_ids},
      {"item_ids", m.item_ids},
      {"user_factors", detail::matrix_to_json(m.user_factors)},
      {"item_factors", detail::matrix_to_json(m.item_factors)},
  };
}

template <class Scalar>
nlohmann::json model_to_json(const MmfModel<Scalar>& m) {
  return nlohmann::json{
      {"format", "mmf-model"},
      {"version", kModelFormatVersion},
      {"kind", "mmf"},
      {"dim", m.dim()},
      {"lambda", static_cast<double>(m.lambda)},
      {"fallback_rating", static_cast<double>(m.fallback_rating)},
      {"variant", variant_name(m.variant)},
      {"user_ids", m.user_ids},
      {"item_ids", m.item_ids},
      {"attr_types", m.attr_types},
      {"attr_values", m.attr_values},
      {"user_factors", detail::matrix_to_json(m.user_factors)},
      {"attr_factors", detail::matrix_to_json(m.attr_factors)},
      {"preference_deviations", detail::deviations_to_json(m.preference)},
      {"performance_deviations", detail::deviations_to_json(m.performance)},
  };
}

template <class Model>
void save_model(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(m).dump(2) << '\n';
}

template <class Scalar = double>
std::variant<MfModel<Scalar>, MmfModel<Scalar>> load_model(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
  detail::check_model_header(j, path);

  const std::string kind = j.value("kind", "");
  const auto dim = j.at("dim").get<Eigen::Index>();
  if (kind == "mf") {
    MfModel<Scalar> m;
    m.lambda = static_cast<Scalar>(j.at("lambda").get<double>());
    m.fallback_rating =
        static_cast<Scalar>(j.at("fallback_rating").get<double>());
    m.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    m.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    m.user_factors = detail::matrix_from_json<Scalar>(
        j.at("user_factors"), m.user_ids.size(), dim, "user_factors");
    m.item_factors = detail::matrix_from_json<Scalar>(
        j.at("item_factors"), m.item_ids.size(), dim, "item_factors");
    return m;
  }
  if (kind == "mmf") {
    MmfModel<Scalar> m;
    m.variant = variant_from_name(j.at("variant").get<std::string>());
    m.lambda = static_cast<Scalar>(j.at("lambda").get<double>());
    m.fallback_rating =
        static_cast<Scalar>(j.at("fallback_rating").get<double>());
    m.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    m.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    m.attr_types = j.at("attr_types").get<std::vector<std::string>>();
    m.attr_values = j.at("attr_values").get<std::vector<std::string>>();
    if (m.attr_types.size() != m.attr_values.size())
      throw FormatError("attribute type/value lists differ in length");
    m.user_factors = detail::matrix_from_json<Scalar>(
        j.at("user_factors"), m.user_ids.size(), dim, "user_factors");
    m.attr_factors = detail::matrix_from_json<Scalar>(
        j.at("attr_factors"), m.attr_types.size(), dim, "attr_factors");
    m.preference = DenseMatrix<Scalar>::Ones(m.user_ids.size(),
                                             m.attr_types.size());
    m.performance = DenseMatrix<Scalar>::Ones(m.item_ids.size(),
                                              m.attr_types.size());
    detail::apply_deviations(m.preference, j.at("preference_deviations"),
                             "preference_deviations");
    detail::apply_deviations(m.performance, j.at("performance_deviations"),
                             "performance_deviations");
    return m;
  }
  throw FormatError("'" + path.string() + "': unknown model kind '" + kind +
                    "'");
}

/// Asserts that a reloaded model can be scored against this catalog: the
/// attribute axis must match index for index.
template <class Scalar>
void check_catalog_compatible(const MmfModel<Scalar>& m,
                              const AttributeCatalog& cat) {
  detail::check_catalog_alignment(m, cat);
  for (int k = 0; k < m.num_attributes(); ++k)
    if (cat.type_of(k) != m.attr_types[k] ||
        cat.value_of(k) != m.attr_values[k])
      throw FormatError("catalog attribute " + std::to_string(k) +
                        " is (" + cat.type_of(k) + ", " + cat.value_of(k) +
                        ") but the model was trained with (" +
                        m.attr_types[k] + ", " + m.attr_values[k] + ")");
}

/// Report JSON: cells with configs, accuracies and traces. Timing is
/// deliberately absent so identical seeds rewrite identical bytes.
nlohmann::json report_to_json(const ExperimentReport& report);

/// Flat one-row-per-cell table next to the JSON.
std::string report_to_csv(const ExperimentReport& report);

void save_report(const ExperimentReport& report,
                 const std::filesystem::path& dir,
                 const std::string& basename);

}  // namespace mmf

#endif  // MMF_SERIALIZE_HPP
