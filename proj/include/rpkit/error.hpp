// Copyright 2026 The rpkit Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace rpkit {

// Error taxonomy. Precondition violations on in-process arguments throw
// std::invalid_argument; the two classes below cover the remaining failure
// modes so callers (and the command line tool) can map them to distinct
// exit paths.

// A file could not be read, written, or parsed. Messages name the path and,
// where it is known, the line or byte offset of the defect.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// An algorithm failed numerically: an iteration ran out of its sweep budget,
// or arithmetic escaped the finite range.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rpkit
