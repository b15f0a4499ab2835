// SPDX-License-Identifier: Apache-2.0

#include "synsearch/query_language.hpp"

#include <cctype>
#include <unordered_set>

#include "synsearch/constraint.hpp"
#include "synsearch/error.hpp"

namespace synsearch {
namespace {

[[noreturn]] void fail(ErrorKind kind, std::size_t pos, const std::string& what) {
  throw Error(kind, what + " at position " + std::to_string(pos), pos);
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Index of the `]` closing the `[` at `open`, honouring nesting (regex
// character classes) and backslash escapes; npos if unbalanced.
std::size_t matching_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == '[') ++depth;
    else if (s[i] == ']' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

QueryToken parse_item(std::string_view item, std::size_t base) {
  QueryToken tok;
  tok.position = base;
  std::size_t i = 0;

  if (item.substr(0, 2) == "<>") {
    tok.expand = true;
    i = 2;
  }
  if (i < item.size() && item[i] == '$') {
    tok.is_anchor = true;
    ++i;
  } else {
    auto rest = item.substr(i);
    auto colon = rest.find(':');
    auto bracket = rest.find('[');
    if (colon != std::string_view::npos && (bracket == std::string_view::npos || colon < bracket)) {
      auto name = rest.substr(0, colon);
      if (name.empty()) {
        tok.capture = CaptureKind::Auto;
      } else if (is_valid_capture_name(name)) {
        tok.capture = CaptureKind::Named;
        tok.name = std::string(name);
      } else {
        fail(ErrorKind::SyntaxError, base + i, "invalid capture name '" + std::string(name) + "'");
      }
      i += colon + 1;
    }
  }

  if (i < item.size() && item[i] == '[') {
    auto close = matching_bracket(item, i);
    if (close == std::string_view::npos) fail(ErrorKind::SyntaxError, base + i, "unbalanced '['");
    tok.constraint_spec = std::string(item.substr(i + 1, close - i - 1));
    tok.constraint_position = base + i + 1;
    i = close + 1;
  }

  auto surface = item.substr(i);
  if (surface.empty()) fail(ErrorKind::SyntaxError, base + i, "missing word after markup");
  if (auto bad = surface.find_first_of("[]"); bad != std::string_view::npos)
    fail(ErrorKind::SyntaxError, base + i + bad, surface[bad] == '[' ? "misplaced '['" : "unbalanced ']'");
  if (surface.front() == ':' || surface.front() == '$')
    fail(ErrorKind::SyntaxError, base + i, std::string("unexpected '") + surface.front() + "'");
  tok.surface = std::string(surface);

  if (tok.expand && tok.capture == CaptureKind::None)
    fail(ErrorKind::InvalidExpansion, base,
         tok.is_anchor ? "expansion '<>' cannot apply to an anchor" : "expansion '<>' requires a capture");
  if (tok.constraint_spec && !tok.is_marked())
    fail(ErrorKind::SyntaxError, base, "constraint on an unmarked word");
  if (tok.constraint_spec) validate_constraint_spec(*tok.constraint_spec, tok.constraint_position);
  return tok;
}

}  // namespace

bool is_valid_capture_name(std::string_view name) {
  if (name.empty()) return false;
  auto first = static_cast<unsigned char>(name.front());
  if (!std::isalpha(first) && first != '_') return false;
  for (char c : name) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && u != '_') return false;
  }
  return true;
}

std::vector<std::string> QueryTokenSeq::words() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

QueryTokenSeq parse_query(std::string_view query) {
  QueryTokenSeq seq;
  seq.original = std::string(query);

  std::size_t i = 0;
  while (i < query.size()) {
    while (i < query.size() && is_space(query[i])) ++i;
    if (i == query.size()) break;
    std::size_t end = i;
    while (end < query.size() && !is_space(query[end])) ++end;
    seq.tokens.push_back(parse_item(query.substr(i, end - i), i));
    i = end;
  }
  if (seq.tokens.empty()) fail(ErrorKind::SyntaxError, 0, "empty query");

  std::unordered_set<std::string> names;
  bool marked = false;
  for (const auto& t : seq.tokens) {
    marked = marked || t.is_marked();
    if (t.capture == CaptureKind::Named && !names.insert(t.name).second)
      fail(ErrorKind::DuplicateCapture, t.position, "duplicate capture name '" + t.name + "'");
  }
  if (!marked) fail(ErrorKind::NoMarkedWords, 0, "query has no marked words (use name:word, :word or $word)");
  return seq;
}

std::string render_query(const QueryTokenSeq& seq) {
  std::string out;
  for (const auto& t : seq.tokens) {
    if (!out.empty()) out += ' ';
    if (t.expand) out += "<>";
    if (t.is_anchor) out += '$';
    else if (t.capture == CaptureKind::Named) out += t.name + ':';
    else if (t.capture == CaptureKind::Auto) out += ':';
    if (t.constraint_spec) out += '[' + *t.constraint_spec + ']';
    out += t.surface;
  }
  return out;
}

}  // namespace synsearch
