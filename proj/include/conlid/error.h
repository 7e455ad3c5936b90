// Copyright 2026 The conlid Authors.
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

#ifndef CONLID_ERROR_H_
#define CONLID_ERROR_H_

#include <stdexcept>
#include <string>

namespace conlid {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed or inconsistent (empty dataset, length mismatch,
// misaligned label sets).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or inconsistent combination of settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A model file failed to load. The message names the failing section.
class FormatError : public Error {
 public:
  FormatError(std::string section, const std::string& what)
      : Error("model file section '" + section + "': " + what),
        section_(std::move(section)) {}

  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

// Training hit a non-finite gradient.
class TrainingError : public Error {
 public:
  TrainingError(long step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace conlid

#endif  // CONLID_ERROR_H_
