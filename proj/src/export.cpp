// SPDX-License-Identifier: Apache-2.0

#include "synsearch/export.hpp"

namespace synsearch {

std::string tsv_escape(std::string_view cell) {
  std::string out(cell);
  for (auto& c : out)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return out;
}

void write_tsv_header(std::ostream& out, const std::vector<std::string>& capture_names) {
  out << "sentence_id\tsentence_text";
  for (const auto& name : capture_names) {
    auto n = tsv_escape(name);
    out << '\t' << n << "_text\t" << n << "_start\t" << n << "_end";
  }
  out << '\n';
}

void write_tsv_row(std::ostream& out, const MatchResult& result) {
  out << tsv_escape(result.sentence_id) << '\t' << tsv_escape(result.sentence_text);
  for (const auto& c : result.captures)
    out << '\t' << tsv_escape(c.text) << '\t' << c.span.start << '\t' << c.span.end;
  out << '\n';
}

std::size_t export_tsv(ResultStream& stream, std::optional<std::size_t> limit, std::ostream& out) {
  write_tsv_header(out, stream.graph().capture_names());
  std::size_t rows = 0;
  while (!limit || rows < *limit) {
    auto r = stream.next();
    if (!r) break;
    write_tsv_row(out, *r);
    ++rows;
  }
  return rows;
}

}  // namespace synsearch
