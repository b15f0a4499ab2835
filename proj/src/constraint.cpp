// SPDX-License-Identifier: Apache-2.0

#include "synsearch/constraint.hpp"

#include <algorithm>

#include "synsearch/error.hpp"

namespace synsearch {

std::string_view property_name(Property p) {
  switch (p) {
    case Property::Word: return "word";
    case Property::Lemma: return "lemma";
    case Property::Tag: return "tag";
    case Property::Entity: return "entity";
  }
  return "word";
}

std::optional<Property> property_from_name(std::string_view name) {
  if (name == "word" || name == "w") return Property::Word;
  if (name == "lemma" || name == "l") return Property::Lemma;
  if (name == "tag" || name == "t") return Property::Tag;
  if (name == "entity" || name == "e") return Property::Entity;
  return std::nullopt;
}

std::string_view property_value(const Token& t, Property p) {
  switch (p) {
    case Property::Word: return t.word;
    case Property::Lemma: return t.lemma;
    case Property::Tag: return t.tag;
    case Property::Entity: return t.entity;
  }
  return {};
}

bool Clause::holds(std::string_view value) const {
  if (regex) return std::regex_match(value.begin(), value.end(), *regex);
  return std::binary_search(literals.begin(), literals.end(), value, std::less<>{});
}

Clause literal_clause(Property p, std::vector<std::string> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Clause c;
  c.property = p;
  c.literals = std::move(values);
  return c;
}

Clause regex_clause(Property p, std::string pattern) {
  Clause c;
  c.property = p;
  try {
    c.regex = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorKind::RegexError, "invalid regular expression /" + pattern + "/: " + e.what());
  }
  c.regex_source = std::move(pattern);
  return c;
}

void TokenConstraint::set(Clause clause) {
  auto it = std::lower_bound(clauses_.begin(), clauses_.end(), clause.property,
                             [](const Clause& c, Property p) { return c.property < p; });
  if (it != clauses_.end() && it->property == clause.property) *it = std::move(clause);
  else clauses_.insert(it, std::move(clause));
}

const Clause* TokenConstraint::find(Property p) const {
  for (const auto& c : clauses_)
    if (c.property == p) return &c;
  return nullptr;
}

TokenConstraint TokenConstraint::without(Property p) const {
  TokenConstraint out;
  for (const auto& c : clauses_)
    if (c.property != p) out.clauses_.push_back(c);
  return out;
}

std::string TokenConstraint::to_string() const {
  std::string out;
  for (const auto& c : clauses_) {
    if (!out.empty()) out += '&';
    out += property_name(c.property);
    out += '=';
    if (c.is_regex()) {
      out += '/' + c.regex_source + '/';
    } else {
      for (std::size_t i = 0; i < c.literals.size(); ++i) {
        if (i) out += '|';
        out += c.literals[i];
      }
    }
  }
  return out;
}

bool satisfies(const Token& t, const TokenConstraint& c) {
  for (const auto& clause : c.clauses()) {
    if (clause.property == Property::Entity && !t.has_entity()) return false;
    if (!clause.holds(property_value(t, clause.property))) return false;
  }
  return true;
}

namespace {

[[noreturn]] void syntax_error(std::size_t pos, const std::string& what) {
  throw Error(ErrorKind::SyntaxError, what + " at position " + std::to_string(pos), pos);
}

// Shared scanner for both validation and materialization. `source` is null
// when only the syntax is being checked.
TokenConstraint parse_spec(std::string_view spec, const Token* source, std::size_t base) {
  TokenConstraint out;
  std::vector<Property> seen;
  if (spec.empty()) return out;

  std::size_t i = 0;
  while (true) {
    const std::size_t clause_start = i;
    std::size_t name_end = i;
    while (name_end < spec.size() && spec[name_end] != '=' && spec[name_end] != '&') ++name_end;
    auto name = spec.substr(i, name_end - i);
    if (name.empty()) syntax_error(base + clause_start, "empty constraint clause");
    auto prop = property_from_name(name);
    if (!prop)
      throw Error(ErrorKind::UnknownProperty, "unknown property '" + std::string(name) + "' at position " +
                                                  std::to_string(base + clause_start),
                  base + clause_start);
    if (std::find(seen.begin(), seen.end(), *prop) != seen.end())
      syntax_error(base + clause_start, "property '" + std::string(property_name(*prop)) + "' given twice");
    seen.push_back(*prop);

    i = name_end;
    if (i == spec.size() || spec[i] == '&') {
      // Bare property: value pulled from the query word.
      if (source) {
        auto value = property_value(*source, *prop);
        if (value.empty())
          throw Error(ErrorKind::MissingProperty,
                      "query word '" + source->word + "' has no " + std::string(property_name(*prop)) +
                          " to pull (position " + std::to_string(base + clause_start) + ")",
                      base + clause_start);
        out.set(literal_clause(*prop, {std::string(value)}));
      }
    } else {
      ++i;  // '='
      if (i < spec.size() && spec[i] == '/') {
        const std::size_t open = i;
        std::size_t j = i + 1;
        std::string pattern;
        while (j < spec.size() && spec[j] != '/') {
          if (spec[j] == '\\' && j + 1 < spec.size()) {
            if (spec[j + 1] == '/') {
              pattern += '/';
              j += 2;
              continue;
            }
            pattern += spec[j++];
          }
          pattern += spec[j++];
        }
        if (j >= spec.size()) syntax_error(base + open, "unterminated regular expression");
        i = j + 1;
        if (i < spec.size() && spec[i] != '&') syntax_error(base + i, "unexpected text after regular expression");
        try {
          auto clause = regex_clause(*prop, pattern);
          if (source) out.set(std::move(clause));
        } catch (const Error& e) {
          throw Error(ErrorKind::RegexError, e.what(), base + open);
        }
      } else {
        std::vector<std::string> values;
        std::size_t v = i;
        while (true) {
          std::size_t end = v;
          while (end < spec.size() && spec[end] != '|' && spec[end] != '&') ++end;
          if (end == v) syntax_error(base + v, "empty value");
          values.emplace_back(spec.substr(v, end - v));
          v = end;
          if (v < spec.size() && spec[v] == '|') {
            ++v;
            continue;
          }
          break;
        }
        i = v;
        if (source) out.set(literal_clause(*prop, std::move(values)));
      }
    }
    if (i == spec.size()) break;
    ++i;  // '&'
    if (i == spec.size()) syntax_error(base + i, "empty constraint clause");
  }
  return out;
}

}  // namespace

TokenConstraint parse_constraint_spec(std::string_view spec, const Token& default_source, std::size_t base_offset) {
  return parse_spec(spec, &default_source, base_offset);
}

void validate_constraint_spec(std::string_view spec, std::size_t base_offset) {
  parse_spec(spec, nullptr, base_offset);
}

}  // namespace synsearch
