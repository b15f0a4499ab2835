// SPDX-License-Identifier: Apache-2.0

#include "synsearch/error.hpp"

namespace synsearch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateCapture: return "DuplicateCapture";
    case ErrorKind::InvalidExpansion: return "InvalidExpansion";
    case ErrorKind::NoMarkedWords: return "NoMarkedWords";
    case ErrorKind::UnknownProperty: return "UnknownProperty";
    case ErrorKind::RegexError: return "RegexError";
    case ErrorKind::MissingProperty: return "MissingProperty";
    case ErrorKind::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::DuplicateSentenceId: return "DuplicateSentenceId";
    case ErrorKind::FormatMismatch: return "FormatMismatch";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace synsearch
