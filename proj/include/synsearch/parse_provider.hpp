// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "synsearch/conllu.hpp"
#include "synsearch/corpus.hpp"

namespace synsearch {

struct ParseRequest {
  std::vector<std::string> words;

  std::string joined() const;
};

/// Source of dependency parses for query sentences. Implementations must
/// return exactly one token per requested word, in order.
class ParseProvider {
 public:
  virtual ~ParseProvider() = default;
  /// Throws Error(ProviderUnavailable) or Error(AlignmentError).
  virtual SentenceGraph parse(const ParseRequest& request) const = 0;
};

/// Throws Error(AlignmentError) unless `graph` has one token per word and is
/// connected.
void check_alignment(const ParseRequest& request, const SentenceGraph& graph);

/// Serves parses from CoNLL-U files, keyed by the exact space-joined words of
/// each sentence.
class FixtureParseProvider final : public ParseProvider {
 public:
  explicit FixtureParseProvider(const std::filesystem::path& directory, const IngestOptions& options = {});
  explicit FixtureParseProvider(const Corpus& corpus);

  SentenceGraph parse(const ParseRequest& request) const override;
  std::size_t size() const { return parses_.size(); }

 private:
  void add(const SentenceGraph& s);
  std::unordered_map<std::string, SentenceGraph> parses_;
};

/// POSTs one word per line to `url` and reads back a single CoNLL-U sentence.
class HttpParseProvider final : public ParseProvider {
 public:
  explicit HttpParseProvider(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(5),
                             IngestOptions options = {});

  SentenceGraph parse(const ParseRequest& request) const override;

 private:
  std::string origin_;  // scheme://host:port
  std::string path_;
  std::chrono::milliseconds timeout_;
  IngestOptions options_;
};

}  // namespace synsearch
