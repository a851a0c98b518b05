// Copyright 2026 The snnkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace snnkit {

// Bad specs, bad shapes, bad flags. CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem and serialization failures. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values and other numeric breakdowns. CLI exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace snnkit

#define SNNKIT_CHECK(cond, msg)                \
  do {                                         \
    if (!(cond)) throw ::snnkit::ConfigError(msg); \
  } while (0)

#define SNNKIT_CHECK_NUMERIC(cond, msg)         \
  do {                                          \
    if (!(cond)) throw ::snnkit::NumericError(msg); \
  } while (0)
