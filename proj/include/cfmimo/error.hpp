// Copyright 2026 The cfmimo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CFMIMO_ERROR_HPP
#define CFMIMO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cfmimo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration or argument rejected before any computation starts.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of a model function (e.g. d <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Factorization failure, non-finite moment, degenerate quotient.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfmimo

#endif  // CFMIMO_ERROR_HPP
