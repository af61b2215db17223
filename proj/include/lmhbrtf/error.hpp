/* Copyright 2026 The lmh-brtf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace lmhbrtf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible shapes, bad mode indices, out-of-range slice indices.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument values (ranks, tolerances, hyperparameters).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: singular precision matrices, imaginary residue
/// above threshold, non-finite state.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File-format and filesystem problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lmhbrtf
