// Copyright 2026 The PGen Authors. All Rights Reserved.
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

#ifndef PGEN_ERRORS_H_
#define PGEN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pgen {

// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Serialized input (PGRV, track file, .pgen container) is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An entropy-coded payload could not be decoded (truncated or corrupt).
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Encoder and decoder disagree on shared state (e.g. base-layer checksum).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgen

#endif  // PGEN_ERRORS_H_
