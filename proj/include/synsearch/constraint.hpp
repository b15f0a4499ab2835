// SPDX-License-Identifier: Apache-2.0
//
// Within-token constraints: a conjunction over properties, each clause a
// disjunction of literal values or a single fully-anchored regular expression.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "synsearch/corpus.hpp"

namespace synsearch {

enum class Property { Word, Lemma, Tag, Entity };

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);
std::string_view property_value(const Token& t, Property p);

struct Clause {
  Property property = Property::Word;
  std::vector<std::string> literals;  // sorted, unique; empty iff regex clause
  std::string regex_source;           // without delimiters
  std::shared_ptr<const std::regex> regex;

  bool is_regex() const { return regex != nullptr; }
  bool holds(std::string_view value) const;

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.property == b.property && a.literals == b.literals && a.regex_source == b.regex_source &&
           a.is_regex() == b.is_regex();
  }
};

Clause literal_clause(Property p, std::vector<std::string> values);
/// Throws Error(RegexError) when `pattern` does not compile.
Clause regex_clause(Property p, std::string pattern);

class TokenConstraint {
 public:
  TokenConstraint() = default;

  /// Adds or replaces the clause for `clause.property`.
  void set(Clause clause);
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause* find(Property p) const;
  bool matches_anything() const { return clauses_.empty(); }
  TokenConstraint without(Property p) const;

  /// Canonical markup form, e.g. `lemma=buy&tag=VBD|VBZ`; empty for match-anything.
  std::string to_string() const;

  friend bool operator==(const TokenConstraint&, const TokenConstraint&) = default;

 private:
  std::vector<Clause> clauses_;  // ordered by property
};

bool satisfies(const Token& t, const TokenConstraint& c);

/// Parses the text between `[` and `]`. Bare property names pull their value
/// from `default_source`. Error positions are offset by `base_offset` so they
/// point into the enclosing query string.
TokenConstraint parse_constraint_spec(std::string_view spec, const Token& default_source,
                                      std::size_t base_offset = 0);

/// Syntax-only validation (no value pulling); used while parsing the query
/// before a parse of the query sentence exists.
void validate_constraint_spec(std::string_view spec, std::size_t base_offset = 0);

}  // namespace synsearch
