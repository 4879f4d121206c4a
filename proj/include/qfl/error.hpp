// Copyright 2026 The QFL-HEP Authors
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
/**
 * @file
 * Exception hierarchy shared by every qfl module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qfl {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration values (qubit counts, node counts, flags).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Qubit index out of range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Input data is not usable (non-finite values, bad labels, empty input).
class DataError : public Error {
  public:
    using Error::Error;
};

class UnsupportedError : public Error {
  public:
    using Error::Error;
};

/// Non-finite loss or gradient encountered during optimization.
class TrainingError : public Error {
  public:
    using Error::Error;
};

class AggregationError : public Error {
  public:
    using Error::Error;
};

class MetricError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// Malformed file content; messages carry the offending line number.
class FormatError : public Error {
  public:
    using Error::Error;
};

} // namespace qfl
