// Copyright 2026 The vbpc Authors
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

#ifndef VBPC_ERROR_HPP_
#define VBPC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace vbpc {

/// Base class of every exception thrown by vbpc.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, labels, point clouds).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Mismatched tensor shapes passed to a numeric routine.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or failed numeric preconditions (e.g. non-PD matrix).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration text or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vbpc

#endif  // VBPC_ERROR_HPP_
