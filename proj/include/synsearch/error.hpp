// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synsearch {

enum class ErrorKind {
  SyntaxError,
  DuplicateCapture,
  InvalidExpansion,
  NoMarkedWords,
  UnknownProperty,
  RegexError,
  MissingProperty,
  ProviderUnavailable,
  AlignmentError,
  MalformedInput,
  DuplicateSentenceId,
  FormatMismatch,
  Io,
  Internal,
};

std::string_view to_string(ErrorKind kind);

/// The single exception type thrown by the library. `position` is a character
/// offset into the query string for query errors, a 1-based line number for
/// CoNLL-U errors, and npos when there is nothing to point at.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorKind kind, std::string message, std::size_t position = npos)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }
  bool has_position() const noexcept { return position_ != npos; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

}  // namespace synsearch
