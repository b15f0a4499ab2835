// SPDX-License-Identifier: Apache-2.0
//
// Reader and writer for the annotated CoNLL-U dialect: the ten standard
// columns, with MISC carrying `Entity=B-X|I-X`, `Chunk=B-NP|I-NP` and
// `SpaceAfter=No`, and a mandatory `# sent_id = <id>` comment per sentence.
// Basic (HEAD/DEPREL) and enhanced (DEPS) edges are merged into one set.

#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "synsearch/corpus.hpp"

namespace synsearch {

enum class TagColumn { Upos, Xpos };

struct IngestOptions {
  TagColumn tag_column = TagColumn::Xpos;
  // Parse-provider responses may omit sent_id; corpora may not.
  bool require_sent_id = true;
};

/// Reads every sentence block from `input`. Malformed lines throw
/// Error(MalformedInput) with the 1-based line number; duplicate sentence ids
/// throw Error(DuplicateSentenceId). Disconnected sentences are skipped and
/// reported in `Corpus::warnings`.
Corpus ingest_conllu(std::istream& input, const IngestOptions& options = {},
                     const std::string& source_name = "<stream>");

/// Appends the sentences of `more` to `into`, enforcing id uniqueness.
void merge_corpus(Corpus& into, Corpus&& more);

void render_conllu(std::ostream& out, const SentenceGraph& s,
                   TagColumn tag_column = TagColumn::Xpos);
void render_conllu(std::ostream& out, const Corpus& corpus,
                   TagColumn tag_column = TagColumn::Xpos);

}  // namespace synsearch
