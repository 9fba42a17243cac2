// Copyright 2026 The ldi4d Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ldi4d {

/// Every failure raised by the engine. `origin()` names the module (and, for
/// I/O, the offending file) so the CLI can print a single parsable line.
class Error : public std::runtime_error {
 public:
  Error(std::string origin, const std::string& message)
      : std::runtime_error(origin + ": " + message), origin_(std::move(origin)) {}

  const std::string& origin() const noexcept { return origin_; }

 private:
  std::string origin_;
};

}  // namespace ldi4d
