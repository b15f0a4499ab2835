// SPDX-License-Identifier: Apache-2.0
//
// Tab-separated export shared by the CLI and the HTTP service, so both produce
// identical bytes: a header row `sentence_id sentence_text` followed by
// `<name>_text <name>_start <name>_end` per capture, then one row per match.
// UTF-8, LF line endings; tabs and newlines inside cells become spaces.

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "synsearch/matcher.hpp"

namespace synsearch {

std::string tsv_escape(std::string_view cell);

void write_tsv_header(std::ostream& out, const std::vector<std::string>& capture_names);
void write_tsv_row(std::ostream& out, const MatchResult& result);

/// Drains up to `limit` results (all when nullopt); returns the row count.
std::size_t export_tsv(ResultStream& stream, std::optional<std::size_t> limit, std::ostream& out);

}  // namespace synsearch
