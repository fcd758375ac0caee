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

#include "mmf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmf/errors.hpp"

namespace mmf {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

double parse_rating(std::string_view field, const std::filesystem::path& path,
                    std::size_t line) {
  double value = 0;
  auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size())
    throw ParseError(path.string() + ":" + std::to_string(line) +
                     ": bad rating '" + std::string(field) + "'");
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<std::string> parse_csv_row(const std::string& line,
                                       const std::string& context) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"' && current.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw ParseError(context + ": unterminated quote");
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

RatingDataset load_ratings(const std::filesystem::path& path,
                           RatingsFormat format) {
  std::ifstream in = open_input(path);
  std::vector<RatingTriple> triples;
  std::string line;
  std::size_t lineno = 0;
  const char sep = format == RatingsFormat::tsv4 ? '\t' : ',';
  const std::size_t want = format == RatingsFormat::tsv4 ? 4u : 3u;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line, sep);
    if (fields.size() != want)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(want) + " fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": empty user or item id");
    triples.push_back({std::string(fields[0]), std::string(fields[1]),
                       parse_rating(fields[2], path, lineno)});
  }
  if (triples.empty())
    throw EmptyDataError("'" + path.string() + "' contains no ratings");
  return RatingDataset::from_triples(triples);
}

void save_ratings(const RatingDataset& ds, const std::filesystem::path& path,
                  RatingsFormat format) {
  std::ofstream out = open_output(path);
  for (const RatingRecord& r : ds.records()) {
    RatingTriple t = ds.triple(r);
    if (format == RatingsFormat::tsv4)
      out << t.user_id << '\t' << t.item_id << '\t' << format_double(t.rating)
          << '\t' << 0 << '\n';
    else
      out << t.user_id << ',' << t.item_id << ',' << format_double(t.rating)
          << '\n';
  }
}

AttributeCatalog load_attributes(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<AttributeRow> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto fields =
        parse_csv_row(line, path.string() + ":" + std::to_string(lineno));
    if (!saw_header) {
      if (fields != std::vector<std::string>{"item_id", "type", "value"})
        throw FormatError(path.string() +
                          ": expected header 'item_id,type,value'");
      saw_header = true;
      continue;
    }
    if (fields.size() != 3)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": empty field");
    rows.push_back({fields[0], fields[1], fields[2]});
  }
  return AttributeCatalog::from_rows(rows);
}

void save_split(const SplitResult& parts, const SplitSpec& spec,
                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_ratings(parts.train, dir / "train.csv");
  save_ratings(parts.test, dir / "test.csv");
  nlohmann::json j{
      {"kind", spec.kind == SplitKind::random_holdout ? "random"
                                                      : "item-cold-start"},
      {"test_fraction", spec.test_fraction},
      {"seed", spec.seed},
  };
  open_output(dir / "split.json") << j.dump(2) << '\n';
}

SplitResult load_split(const std::filesystem::path& dir) {
  return {load_ratings(dir / "train.csv", RatingsFormat::csv3),
          load_ratings(dir / "test.csv", RatingsFormat::csv3)};
}

}  // namespace mmf
