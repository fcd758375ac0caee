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

#ifndef MMF_ERRORS_HPP
#define MMF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmf {

/// Base class of everything thrown by this library. `kind()` is a stable
/// machine-readable tag used by the CLI error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct ParseError final : Error {
  explicit ParseError(const std::string& m) : Error("parse_error", m) {}
};

struct FormatError final : Error {
  explicit FormatError(const std::string& m) : Error("format_error", m) {}
};

struct EmptyDataError final : Error {
  explicit EmptyDataError(const std::string& m) : Error("empty_data", m) {}
};

struct UndefinedDensityError final : Error {
  explicit UndefinedDensityError(const std::string& m)
      : Error("undefined_density", m) {}
};

struct ConfigError final : Error {
  explicit ConfigError(const std::string& m) : Error("config_error", m) {}
};

struct IndexError final : Error {
  explicit IndexError(const std::string& m) : Error("index_error", m) {}
};

struct ArgumentError final : Error {
  explicit ArgumentError(const std::string& m) : Error("argument_error", m) {}
};

struct DivergenceError final : Error {
  explicit DivergenceError(const std::string& m) : Error("divergence", m) {}
};

struct NoAttributesError final : Error {
  explicit NoAttributesError(const std::string& m)
      : Error("no_attributes", m) {}
};

struct IoError final : Error {
  explicit IoError(const std::string& m) : Error("io_error", m) {}
};

}  // namespace mmf

#endif  // MMF_ERRORS_HPP
