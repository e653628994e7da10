//
// Copyright 2026 The Cleanmark Authors
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
//

#ifndef CLEANMARK_ERRORS_H_
#define CLEANMARK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cleanmark {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value violates a documented precondition.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A file is missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file exists but its contents are inconsistent or malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The operation is not defined for the sample modality (e.g. gradients of
// token inputs).
class UnsupportedModalityError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity surfaced in a loss or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace cleanmark

#endif  // CLEANMARK_ERRORS_H_
