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

#ifndef MMF_IO_HPP
#define MMF_IO_HPP

#include <filesystem>
#include <string>

#include "mmf/dataset.hpp"

namespace mmf {

enum class RatingsFormat {
  tsv4,  // user \t item \t rating \t timestamp (timestamp ignored)
  csv3,  // user,item,rating
};

/// Reads a ratings file. Malformed rows raise ParseError naming the line;
/// a file with no data rows raises EmptyDataError.
RatingDataset load_ratings(const std::filesystem::path& path,
                           RatingsFormat format);

/// Writes records in dataset order; load_ratings of the result reproduces
/// the dataset record-for-record.
void save_ratings(const RatingDataset& ds, const std::filesystem::path& path,
                  RatingsFormat format = RatingsFormat::csv3);

/// Reads the canonical attribute file: UTF-8 CSV with header
/// `item_id,type,value`, one row per assignment. Values containing commas or
/// quotes use double-quote escaping. A zero-byte file yields an empty
/// catalog; a wrong header raises FormatError.
AttributeCatalog load_attributes(const std::filesystem::path& path);

/// Persists a split as train.csv/test.csv plus a split.json sidecar with the
/// SplitSpec that produced it.
void save_split(const SplitResult& parts, const SplitSpec& spec,
                const std::filesystem::path& dir);

SplitResult load_split(const std::filesystem::path& dir);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

/// Double-quote escape for a CSV field; returns the field unchanged when no
/// escaping is needed.
std::string csv_escape(const std::string& field);

/// Splits one CSV line honoring double-quote escaping. Throws ParseError on
/// an unterminated quote; `context` names the source in the message.
std::vector<std::string> parse_csv_row(const std::string& line,
                                       const std::string& context);

}  // namespace mmf

#endif  // MMF_IO_HPP
