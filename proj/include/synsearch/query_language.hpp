// SPDX-License-Identifier: Apache-2.0
//
// Example-based markup queries. Each whitespace-separated item is
//
//   [<>] ( $ | [name] : )? ( '[' constraint-spec ']' )? surface
//
// e.g. `<>founder:[e]Paul was a t:[w]founder of <>entity:[e]Microsoft`.
// This layer is purely syntactic: constraint specs are kept as raw text and
// only checked for well-formedness; values are pulled later, once the query
// sentence has been parsed.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synsearch {

enum class CaptureKind { None, Auto, Named };

struct QueryToken {
  std::string surface;
  CaptureKind capture = CaptureKind::None;
  std::string name;  // set only for CaptureKind::Named
  bool is_anchor = false;
  bool expand = false;
  std::optional<std::string> constraint_spec;
  std::size_t position = 0;            // offset of the item in the query string
  std::size_t constraint_position = 0; // offset of the first character inside `[`

  bool is_marked() const { return is_anchor || capture != CaptureKind::None; }
  friend bool operator==(const QueryToken& a, const QueryToken& b) {
    return a.surface == b.surface && a.capture == b.capture && a.name == b.name && a.is_anchor == b.is_anchor &&
           a.expand == b.expand && a.constraint_spec == b.constraint_spec;
  }
};

struct QueryTokenSeq {
  std::vector<QueryToken> tokens;
  std::string original;

  std::vector<std::string> words() const;
};

bool is_valid_capture_name(std::string_view name);

/// Throws Error with kinds SyntaxError, DuplicateCapture, InvalidExpansion,
/// NoMarkedWords, UnknownProperty or RegexError; every error carries the
/// character offset of the offending item.
QueryTokenSeq parse_query(std::string_view query);

/// Canonical markup: single spaces, `<>` then `$`/`name:`/`:` then `[spec]`.
std::string render_query(const QueryTokenSeq& seq);

}  // namespace synsearch
