// Copyright 2026 The Hopper Authors
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

#ifndef HOPPER_ERRORS_H_
#define HOPPER_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hopper {

// Base class for every error raised by the library. what() is a single line
// so the CLI can forward it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class OutOfWorkspaceError : public Error {
 public:
  OutOfWorkspaceError(const std::string& message, double radius)
      : Error(message), radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

class IntegrationDivergedError : public Error {
 public:
  IntegrationDivergedError(const std::string& quantity, double time)
      : Error("integration diverged: " + quantity + " is not finite at t=" +
              std::to_string(time)),
        quantity_(quantity) {}
  const std::string& quantity() const { return quantity_; }

 private:
  std::string quantity_;
};

class DegenerateStrokeError : public Error {
 public:
  using Error::Error;
};

class InvalidEnergyError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error("config key '" + key + "': " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace hopper

#endif  // HOPPER_ERRORS_H_
