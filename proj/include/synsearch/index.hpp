// SPDX-License-Identifier: Apache-2.0
//
// Inverted index over token features (word, lemma, tag, entity) and per-token
// incoming/outgoing edge labels, stored as one memory-mappable file together
// with the corpus itself. Retrieval is sentence-granular boolean conjunction:
// it returns a superset of the sentences the matcher will accept.
//
// The byte layout is documented in docs/index_format.md.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synsearch/corpus.hpp"
#include "synsearch/query_graph.hpp"

namespace synsearch {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

enum class FeatureKind : std::uint32_t { Word = 0, Lemma = 1, Tag = 2, Entity = 3, InLabel = 4, OutLabel = 5 };

std::string_view feature_kind_name(FeatureKind kind);

struct FeatureKey {
  FeatureKind kind = FeatureKind::Word;
  std::string value;

  friend bool operator==(const FeatureKey&, const FeatureKey&) = default;
  friend auto operator<=>(const FeatureKey&, const FeatureKey&) = default;
};

struct Posting {
  std::uint32_t sentence = 0;
  std::uint32_t token = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
  friend auto operator<=>(const Posting&, const Posting&) = default;
};

/// Read-only view of one posting list inside the artifact bytes.
class PostingList {
 public:
  PostingList() = default;
  PostingList(const std::byte* data, std::size_t count) : data_(data), count_(count) {}

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  Posting operator[](std::size_t i) const;
  /// First position at or after `from` whose sentence is >= `sentence`.
  std::size_t seek(std::size_t from, std::uint32_t sentence) const;
  std::vector<Posting> to_vector() const;

 private:
  const std::byte* data_ = nullptr;
  std::size_t count_ = 0;
};

class IndexArtifact {
 public:
  IndexArtifact(IndexArtifact&&) noexcept;
  IndexArtifact& operator=(IndexArtifact&&) noexcept;
  IndexArtifact(const IndexArtifact&) = delete;
  IndexArtifact& operator=(const IndexArtifact&) = delete;
  ~IndexArtifact();

  /// Memory-maps `path`. Throws Error(Io) or Error(FormatMismatch).
  static IndexArtifact open(const std::filesystem::path& path);
  static IndexArtifact from_bytes(std::vector<std::byte> bytes);

  void write(const std::filesystem::path& path) const;
  std::span<const std::byte> bytes() const { return data_; }

  std::uint32_t version() const;
  std::uint64_t corpus_checksum() const;
  std::size_t sentence_count() const { return sentence_count_; }
  std::size_t feature_count() const { return feature_count_; }
  std::size_t posting_count() const { return posting_total_; }
  std::size_t token_count() const;

  PostingList postings(const FeatureKey& key) const;  // empty if absent
  std::vector<FeatureKey> features() const;

  std::string_view sentence_id(std::uint32_t ordinal) const;
  std::uint32_t sentence_length(std::uint32_t ordinal) const;
  SentenceGraph load_sentence(std::uint32_t ordinal) const;

 private:
  struct Mapping;
  IndexArtifact() = default;
  void validate();
  std::string_view string_at(std::uint32_t id) const;

  std::vector<std::byte> owned_;
  std::unique_ptr<Mapping> mapping_;
  std::span<const std::byte> data_;

  std::size_t string_count_ = 0, feature_count_ = 0, posting_total_ = 0, sentence_count_ = 0;
  const std::byte* string_offsets_ = nullptr;
  const std::byte* string_bytes_ = nullptr;
  std::size_t string_bytes_size_ = 0;
  const std::byte* features_ = nullptr;
  const std::byte* postings_ = nullptr;
  const std::byte* sentences_ = nullptr;
  const std::byte* corpus_ = nullptr;
  std::size_t corpus_size_ = 0;
};

/// Streaming builder: sentences are appended one at a time so corpora larger
/// than memory-as-objects can be indexed.
class IndexBuilder {
 public:
  IndexBuilder();
  ~IndexBuilder();
  IndexBuilder(const IndexBuilder&) = delete;
  IndexBuilder& operator=(const IndexBuilder&) = delete;

  void add(const SentenceGraph& s);
  std::size_t sentence_count() const;
  std::size_t feature_count() const;

  IndexArtifact finish();
  /// Writes the artifact straight to disk without materializing it in memory.
  void write(const std::filesystem::path& path);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

IndexArtifact build_index(const Corpus& corpus);

/// Disjunction of feature keys: a sentence qualifies if it holds any of them.
struct FeatureGroup {
  std::vector<FeatureKey> any_of;  // sorted, unique

  friend bool operator==(const FeatureGroup&, const FeatureGroup&) = default;
  friend auto operator<=>(const FeatureGroup&, const FeatureGroup&) = default;
};

struct NodeRequirement {
  NodeId node = 0;
  std::vector<FeatureGroup> all_of;  // sorted, unique
};

struct CandidatePlan {
  std::vector<NodeRequirement> nodes;

  /// All groups across nodes, sorted and deduplicated.
  std::vector<FeatureGroup> groups() const;
  bool requires_nothing() const { return groups().empty(); }
};

CandidatePlan plan(const QueryGraph& g);

/// Lazy, sorted, duplicate-free stream of candidate sentence ordinals;
/// intersection runs cheapest posting list first with galloping seeks.
class CandidateIterator {
 public:
  CandidateIterator(const IndexArtifact& index, const CandidatePlan& plan);
  ~CandidateIterator();
  CandidateIterator(CandidateIterator&&) noexcept;
  CandidateIterator& operator=(CandidateIterator&&) noexcept;

  std::optional<std::uint32_t> next();

 private:
  struct Cursor;
  std::optional<std::uint32_t> advance_to(std::uint32_t target);

  std::vector<Cursor> cursors_;
  std::uint32_t sentence_count_ = 0;
  std::uint32_t next_target_ = 0;
  bool exhausted_ = false;
};

std::vector<std::uint32_t> candidates(const IndexArtifact& index, const CandidatePlan& plan);

}  // namespace synsearch
