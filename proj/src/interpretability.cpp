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

#include "mmf/interpretability.hpp"

#include <charconv>
#include <fstream>

namespace mmf {

VectorTable load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  VectorTable table;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    auto fields = parse_csv_row(line, context);
    if (!saw_header) {
      if (fields.size() < 2 || fields[0] != "id" || fields[1] != "type")
        throw FormatError(path.string() + ": expected header 'id,type,v1..'");
      table.dim = static_cast<int>(fields.size()) - 2;
      saw_header = true;
      continue;
    }
    if (static_cast<int>(fields.size()) != table.dim + 2)
      throw ParseError(context + ": expected " + std::to_string(table.dim + 2) +
                       " fields, got " + std::to_string(fields.size()));
    VectorTableRow row;
    row.id = fields[0];
    row.type = fields[1];
    row.values.resize(table.dim);
    for (int c = 0; c < table.dim; ++c) {
      const std::string& f = fields[c + 2];
      double v = 0;
      auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || end != f.data() + f.size())
        throw ParseError(context + ": bad number '" + f + "'");
      row.values[c] = v;
    }
    table.rows.push_back(std::move(row));
  }
  if (!saw_header)
    throw FormatError(path.string() + ": missing header row");
  return table;
}

}  // namespace mmf
