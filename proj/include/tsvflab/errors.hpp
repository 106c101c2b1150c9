// Copyright 2026 The tsvflab Authors
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

namespace tsvflab {

/// Rejected input: a precondition on arguments was violated.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string &what)
        : std::invalid_argument(what) {}
};

/// A state collapsed to the zero vector (impossible branch). The trial
/// engine converts this into an "absorbed" outcome at block elements.
class NullBranchError : public std::runtime_error {
  public:
    explicit NullBranchError(const std::string &what)
        : std::runtime_error(what) {}
};

/// A conditional quantity (ABL probability, weak value, post-selected
/// pointer shift) is undefined for the given boundary states.
class UndefinedConditionalError : public std::runtime_error {
  public:
    explicit UndefinedConditionalError(const std::string &what)
        : std::runtime_error(what) {}
};

} // namespace tsvflab
