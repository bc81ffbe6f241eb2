// Copyright 2026 The Fovea Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FOVEA_ERRORS_HPP_
#define FOVEA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fovea {

/// Coarse error class; the CLI maps it to an exit status.
enum class ErrorKind { kUsage, kData, kModel };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorKind::kUsage, w) {}
};

// Operation called on an object that has not been fitted or loaded.
struct InvalidState : Error {
  explicit InvalidState(const std::string& w) : Error(ErrorKind::kModel, w) {}
};

struct DecodeError : Error {
  explicit DecodeError(const std::string& w) : Error(ErrorKind::kData, w) {}
};

struct FitError : Error {
  explicit FitError(const std::string& w) : Error(ErrorKind::kData, w) {}
};

struct UndefinedMetric : Error {
  explicit UndefinedMetric(const std::string& w) : Error(ErrorKind::kData, w) {}
};

struct IngestError : Error {
  IngestError(const std::string& w, int line)
      : Error(ErrorKind::kData, line > 0 ? "line " + std::to_string(line) + ": " + w : w), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::kUsage, w) {}
};

/// Model bundle load failures. Each subclass is a distinct failure mode.
struct BundleError : Error {
  explicit BundleError(const std::string& w) : Error(ErrorKind::kModel, w) {}
};
struct BundleFormatError : BundleError {
  using BundleError::BundleError;
};
struct BundleTruncatedError : BundleError {
  using BundleError::BundleError;
};
struct BundleVersionError : BundleError {
  using BundleError::BundleError;
};
struct BundleChecksumError : BundleError {
  BundleChecksumError(const std::string& section)
      : BundleError("checksum mismatch in section '" + section + "'"), section_(section) {}
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

}  // namespace fovea

#endif  // FOVEA_ERRORS_HPP_
