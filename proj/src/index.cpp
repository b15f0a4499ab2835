// SPDX-License-Identifier: Apache-2.0

#include "synsearch/index.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "synsearch/error.hpp"

namespace synsearch {
namespace {

constexpr char kMagic[8] = {'S', 'Y', 'N', 'S', 'R', 'C', 'H', '\0'};
constexpr std::size_t kHeaderSize = 128;
constexpr std::size_t kFeatureEntrySize = 24;
constexpr std::size_t kPostingSize = 8;
constexpr std::size_t kSentenceRowSize = 16;
constexpr std::size_t kTokenRecordWords = 9;
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// Header field offsets.
enum : std::size_t {
  kVersionAt = 8,
  kChecksumAt = 16,
  kStringCountAt = 24,
  kStringOffsetsAt = 32,
  kStringBytesAt = 40,
  kStringBytesSizeAt = 48,
  kFeatureCountAt = 56,
  kFeaturesAt = 64,
  kPostingTotalAt = 72,
  kPostingsAt = 80,
  kSentenceCountAt = 88,
  kSentencesAt = 96,
  kCorpusAt = 104,
  kCorpusSizeAt = 112,
  kFileSizeAt = 120,
};

template <typename T>
T byteswap(T v) {
  if constexpr (sizeof(T) == 4) return __builtin_bswap32(v);
  else return __builtin_bswap64(v);
}

template <typename T>
T load_le(const std::byte* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
  return v;
}

template <typename T>
void store_le(std::byte* p, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap(v);
  std::memcpy(p, &v, sizeof v);
}

template <typename T>
void append_le(std::vector<std::byte>& out, T v) {
  auto n = out.size();
  out.resize(n + sizeof v);
  store_le(out.data() + n, v);
}

std::size_t pad8(std::size_t n) { return (n + 7) & ~std::size_t{7}; }

class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorKind::FormatMismatch, "corrupt index: " + what);
}

class VectorSink {
 public:
  explicit VectorSink(std::vector<std::byte>& out) : out_(out) {}
  void write(const void* data, std::size_t n) {
    auto p = static_cast<const std::byte*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  std::vector<std::byte>& out_;
};

class FileSink {
 public:
  explicit FileSink(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  }
  void write(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) throw Error(ErrorKind::Io, "write failed for " + path_.string() + " (out of space?)");
  }
  void reserve(std::size_t) {}
  void close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::Io, "close failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

std::string_view feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Word: return "word";
    case FeatureKind::Lemma: return "lemma";
    case FeatureKind::Tag: return "tag";
    case FeatureKind::Entity: return "entity";
    case FeatureKind::InLabel: return "in_label";
    case FeatureKind::OutLabel: return "out_label";
  }
  return "word";
}

// ---------------------------------------------------------------------------
// PostingList

Posting PostingList::operator[](std::size_t i) const {
  const auto* p = data_ + i * kPostingSize;
  return {load_le<std::uint32_t>(p), load_le<std::uint32_t>(p + 4)};
}

std::size_t PostingList::seek(std::size_t from, std::uint32_t sentence) const {
  auto sentence_at = [&](std::size_t i) { return load_le<std::uint32_t>(data_ + i * kPostingSize); };
  if (from >= count_ || sentence_at(from) >= sentence) return from;
  // Gallop, then binary search in the bracketed range.
  std::size_t step = 1, lo = from, hi = from + 1;
  while (hi < count_ && sentence_at(hi) < sentence) {
    lo = hi;
    step *= 2;
    hi = std::min(count_, hi + step);
  }
  while (lo + 1 < hi) {
    auto mid = lo + (hi - lo) / 2;
    if (sentence_at(mid) < sentence) lo = mid;
    else hi = mid;
  }
  return hi;
}

std::vector<Posting> PostingList::to_vector() const {
  std::vector<Posting> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = (*this)[i];
  return out;
}

// ---------------------------------------------------------------------------
// IndexBuilder

struct IndexBuilder::State {
  struct SentenceRow {
    std::uint32_t id;
    std::uint32_t tokens;
    std::uint64_t offset;
  };

  std::vector<std::string> strings;
  std::unordered_map<std::string, std::uint32_t> string_ids;
  std::unordered_map<std::uint64_t, std::uint32_t> feature_ids;
  std::vector<std::pair<FeatureKind, std::uint32_t>> feature_keys;
  std::vector<std::vector<Posting>> postings;
  std::vector<SentenceRow> sentences;
  std::vector<std::byte> corpus;

  // Scratch, reused across sentences.
  std::vector<std::vector<std::uint32_t>> in_labels, out_labels;

  std::uint32_t intern(const std::string& s) {
    auto [it, inserted] = string_ids.try_emplace(s, static_cast<std::uint32_t>(strings.size()));
    if (inserted) strings.push_back(s);
    return it->second;
  }

  void post(FeatureKind kind, std::uint32_t value, std::uint32_t sentence, std::uint32_t token) {
    auto key = (static_cast<std::uint64_t>(kind) << 32) | value;
    auto [it, inserted] = feature_ids.try_emplace(key, static_cast<std::uint32_t>(feature_keys.size()));
    if (inserted) {
      feature_keys.emplace_back(kind, value);
      postings.emplace_back();
    }
    postings[it->second].push_back({sentence, token});
  }

  void add(const SentenceGraph& s) {
    const auto ordinal = static_cast<std::uint32_t>(sentences.size());
    const auto n = static_cast<std::uint32_t>(s.tokens.size());
    sentences.push_back({intern(s.sentence_id), n, corpus.size()});

    append_le(corpus, n);
    append_le(corpus, static_cast<std::uint32_t>(s.edges.size()));
    in_labels.assign(n, {});
    out_labels.assign(n, {});

    std::vector<std::uint32_t> token_strings;
    for (const auto& t : s.tokens) {
      auto word = intern(t.word), lemma = intern(t.lemma), tag = intern(t.tag);
      auto entity = t.has_entity() ? intern(t.entity) : kNone;
      append_le(corpus, word);
      append_le(corpus, lemma);
      append_le(corpus, tag);
      append_le(corpus, entity);
      append_le(corpus, t.entity_span ? t.entity_span->start : kNone);
      append_le(corpus, t.entity_span ? t.entity_span->end : kNone);
      append_le(corpus, t.chunk_span ? t.chunk_span->start : kNone);
      append_le(corpus, t.chunk_span ? t.chunk_span->end : kNone);
      append_le(corpus, static_cast<std::uint32_t>(t.space_after ? 1 : 0));
      token_strings.insert(token_strings.end(), {word, lemma, tag, entity});
    }
    for (const auto& e : s.edges) {
      auto label = intern(e.label);
      append_le(corpus, e.head);
      append_le(corpus, e.dependent);
      append_le(corpus, label);
      out_labels[e.head].push_back(label);
      in_labels[e.dependent].push_back(label);
    }

    for (std::uint32_t i = 0; i < n; ++i) {
      const auto* ts = &token_strings[i * 4];
      post(FeatureKind::Word, ts[0], ordinal, i);
      if (!s.tokens[i].lemma.empty()) post(FeatureKind::Lemma, ts[1], ordinal, i);
      if (!s.tokens[i].tag.empty()) post(FeatureKind::Tag, ts[2], ordinal, i);
      if (ts[3] != kNone) post(FeatureKind::Entity, ts[3], ordinal, i);
      for (auto* labels : {&in_labels[i], &out_labels[i]}) {
        std::sort(labels->begin(), labels->end());
        labels->erase(std::unique(labels->begin(), labels->end()), labels->end());
      }
      for (auto l : in_labels[i]) post(FeatureKind::InLabel, l, ordinal, i);
      for (auto l : out_labels[i]) post(FeatureKind::OutLabel, l, ordinal, i);
    }
  }

  template <typename Sink>
  void serialize(Sink& sink) {
    std::vector<std::uint32_t> order(feature_keys.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto& ka = feature_keys[a];
      const auto& kb = feature_keys[b];
      if (ka.first != kb.first) return ka.first < kb.first;
      return strings[ka.second] < strings[kb.second];
    });

    std::size_t string_bytes = 0;
    for (const auto& s : strings) string_bytes += s.size();
    std::size_t posting_total = 0;
    for (const auto& p : postings) posting_total += p.size();

    const std::size_t string_offsets_at = kHeaderSize;
    const std::size_t string_bytes_at = string_offsets_at + (strings.size() + 1) * 8;
    const std::size_t features_at = pad8(string_bytes_at + string_bytes);
    const std::size_t postings_at = features_at + order.size() * kFeatureEntrySize;
    const std::size_t sentences_at = postings_at + posting_total * kPostingSize;
    const std::size_t corpus_at = sentences_at + sentences.size() * kSentenceRowSize;
    const std::size_t file_size = pad8(corpus_at + corpus.size());
    sink.reserve(file_size);

    Fnv1a checksum;
    for (const auto& s : strings) {
      auto len = static_cast<std::uint64_t>(s.size());
      checksum.update(&len, sizeof len);
      checksum.update(s.data(), s.size());
    }
    for (const auto& row : sentences) {
      checksum.update(&row.id, 4);
      checksum.update(&row.tokens, 4);
    }
    checksum.update(corpus.data(), corpus.size());

    std::vector<std::byte> buf(kHeaderSize);
    std::memcpy(buf.data(), kMagic, sizeof kMagic);
    store_le(buf.data() + kVersionAt, kIndexFormatVersion);
    store_le<std::uint64_t>(buf.data() + kChecksumAt, checksum.value());
    store_le<std::uint64_t>(buf.data() + kStringCountAt, strings.size());
    store_le<std::uint64_t>(buf.data() + kStringOffsetsAt, string_offsets_at);
    store_le<std::uint64_t>(buf.data() + kStringBytesAt, string_bytes_at);
    store_le<std::uint64_t>(buf.data() + kStringBytesSizeAt, string_bytes);
    store_le<std::uint64_t>(buf.data() + kFeatureCountAt, order.size());
    store_le<std::uint64_t>(buf.data() + kFeaturesAt, features_at);
    store_le<std::uint64_t>(buf.data() + kPostingTotalAt, posting_total);
    store_le<std::uint64_t>(buf.data() + kPostingsAt, postings_at);
    store_le<std::uint64_t>(buf.data() + kSentenceCountAt, sentences.size());
    store_le<std::uint64_t>(buf.data() + kSentencesAt, sentences_at);
    store_le<std::uint64_t>(buf.data() + kCorpusAt, corpus_at);
    store_le<std::uint64_t>(buf.data() + kCorpusSizeAt, corpus.size());
    store_le<std::uint64_t>(buf.data() + kFileSizeAt, file_size);
    sink.write(buf.data(), buf.size());

    buf.clear();
    std::uint64_t offset = 0;
    for (const auto& s : strings) {
      append_le(buf, offset);
      offset += s.size();
    }
    append_le(buf, offset);
    sink.write(buf.data(), buf.size());
    for (const auto& s : strings) sink.write(s.data(), s.size());
    const std::byte zeros[8] = {};
    sink.write(zeros, features_at - (string_bytes_at + string_bytes));

    buf.clear();
    std::uint64_t first = 0;
    for (auto f : order) {
      append_le(buf, static_cast<std::uint32_t>(feature_keys[f].first));
      append_le(buf, feature_keys[f].second);
      append_le(buf, first);
      append_le(buf, static_cast<std::uint64_t>(postings[f].size()));
      first += postings[f].size();
    }
    sink.write(buf.data(), buf.size());

    for (auto f : order) {
      buf.resize(postings[f].size() * kPostingSize);
      for (std::size_t i = 0; i < postings[f].size(); ++i) {
        store_le(buf.data() + i * kPostingSize, postings[f][i].sentence);
        store_le(buf.data() + i * kPostingSize + 4, postings[f][i].token);
      }
      sink.write(buf.data(), buf.size());
    }

    buf.clear();
    for (const auto& row : sentences) {
      append_le(buf, row.id);
      append_le(buf, row.tokens);
      append_le(buf, row.offset);
    }
    sink.write(buf.data(), buf.size());
    sink.write(corpus.data(), corpus.size());
    sink.write(zeros, file_size - (corpus_at + corpus.size()));
  }
};

IndexBuilder::IndexBuilder() : state_(std::make_unique<State>()) {}
IndexBuilder::~IndexBuilder() = default;

void IndexBuilder::add(const SentenceGraph& s) { state_->add(s); }
std::size_t IndexBuilder::sentence_count() const { return state_->sentences.size(); }
std::size_t IndexBuilder::feature_count() const { return state_->feature_keys.size(); }

IndexArtifact IndexBuilder::finish() {
  std::vector<std::byte> bytes;
  VectorSink sink(bytes);
  state_->serialize(sink);
  state_ = std::make_unique<State>();
  return IndexArtifact::from_bytes(std::move(bytes));
}

void IndexBuilder::write(const std::filesystem::path& path) {
  FileSink sink(path);
  state_->serialize(sink);
  sink.close();
  state_ = std::make_unique<State>();
}

IndexArtifact build_index(const Corpus& corpus) {
  IndexBuilder builder;
  for (const auto& s : corpus.sentences) builder.add(s);
  return builder.finish();
}

// ---------------------------------------------------------------------------
// IndexArtifact

struct IndexArtifact::Mapping {
  void* address = nullptr;
  std::size_t length = 0;
  ~Mapping() {
    if (address) ::munmap(address, length);
  }
};

IndexArtifact::IndexArtifact(IndexArtifact&&) noexcept = default;
IndexArtifact& IndexArtifact::operator=(IndexArtifact&&) noexcept = default;
IndexArtifact::~IndexArtifact() = default;

IndexArtifact IndexArtifact::open(const std::filesystem::path& path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw Error(ErrorKind::Io, "cannot open index " + path.string() + ": " + std::strerror(errno));
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw Error(ErrorKind::Io, "cannot stat index " + path.string());
  }
  const auto length = static_cast<std::size_t>(st.st_size);
  if (length < kHeaderSize) {
    ::close(fd);
    throw Error(ErrorKind::FormatMismatch, "index version/magic mismatch: " + path.string() + " is too short");
  }
  void* address = ::mmap(nullptr, length, PROT_READ, MAP_PRIVATE, fd, 0);
  ::close(fd);
  if (address == MAP_FAILED) throw Error(ErrorKind::Io, "cannot map index " + path.string());

  IndexArtifact idx;
  idx.mapping_ = std::make_unique<Mapping>();
  idx.mapping_->address = address;
  idx.mapping_->length = length;
  idx.data_ = {static_cast<const std::byte*>(address), length};
  idx.validate();
  return idx;
}

IndexArtifact IndexArtifact::from_bytes(std::vector<std::byte> bytes) {
  IndexArtifact idx;
  idx.owned_ = std::move(bytes);
  idx.data_ = idx.owned_;
  idx.validate();
  return idx;
}

void IndexArtifact::write(const std::filesystem::path& path) const {
  FileSink sink(path);
  sink.write(data_.data(), data_.size());
  sink.close();
}

void IndexArtifact::validate() {
  if (data_.size() < kHeaderSize || std::memcmp(data_.data(), kMagic, sizeof kMagic) != 0)
    throw Error(ErrorKind::FormatMismatch, "index version/magic mismatch: bad magic");
  if (version() != kIndexFormatVersion)
    throw Error(ErrorKind::FormatMismatch, "index version/magic mismatch: file has version " +
                                               std::to_string(version()) + ", expected " +
                                               std::to_string(kIndexFormatVersion));
  const auto* h = data_.data();
  auto field = [&](std::size_t at) { return load_le<std::uint64_t>(h + at); };
  if (field(kFileSizeAt) != data_.size()) corrupt("file size does not match header");

  auto section = [&](std::size_t offset, std::size_t count, std::size_t width) -> const std::byte* {
    if (offset > data_.size() || count > (data_.size() - offset) / std::max<std::size_t>(width, 1))
      corrupt("section out of bounds");
    return h + offset;
  };
  string_count_ = field(kStringCountAt);
  string_offsets_ = section(field(kStringOffsetsAt), string_count_ + 1, 8);
  string_bytes_size_ = field(kStringBytesSizeAt);
  string_bytes_ = section(field(kStringBytesAt), string_bytes_size_, 1);
  feature_count_ = field(kFeatureCountAt);
  features_ = section(field(kFeaturesAt), feature_count_, kFeatureEntrySize);
  posting_total_ = field(kPostingTotalAt);
  postings_ = section(field(kPostingsAt), posting_total_, kPostingSize);
  sentence_count_ = field(kSentenceCountAt);
  sentences_ = section(field(kSentencesAt), sentence_count_, kSentenceRowSize);
  corpus_size_ = field(kCorpusSizeAt);
  corpus_ = section(field(kCorpusAt), corpus_size_, 1);
  if (load_le<std::uint64_t>(string_offsets_ + string_count_ * 8) != string_bytes_size_)
    corrupt("string table size mismatch");
}

std::uint32_t IndexArtifact::version() const { return load_le<std::uint32_t>(data_.data() + kVersionAt); }
std::uint64_t IndexArtifact::corpus_checksum() const { return load_le<std::uint64_t>(data_.data() + kChecksumAt); }

std::string_view IndexArtifact::string_at(std::uint32_t id) const {
  if (id >= string_count_) corrupt("string id out of range");
  auto begin = load_le<std::uint64_t>(string_offsets_ + std::size_t{id} * 8);
  auto end = load_le<std::uint64_t>(string_offsets_ + (std::size_t{id} + 1) * 8);
  if (begin > end || end > string_bytes_size_) corrupt("string offsets out of range");
  return {reinterpret_cast<const char*>(string_bytes_ + begin), end - begin};
}

std::size_t IndexArtifact::token_count() const {
  std::size_t n = 0;
  for (std::uint32_t i = 0; i < sentence_count_; ++i) n += sentence_length(i);
  return n;
}

PostingList IndexArtifact::postings(const FeatureKey& key) const {
  std::size_t lo = 0, hi = feature_count_;
  while (lo < hi) {
    auto mid = lo + (hi - lo) / 2;
    const auto* entry = features_ + mid * kFeatureEntrySize;
    auto kind = static_cast<FeatureKind>(load_le<std::uint32_t>(entry));
    auto value = string_at(load_le<std::uint32_t>(entry + 4));
    bool less = kind != key.kind ? kind < key.kind : value < std::string_view(key.value);
    if (less) lo = mid + 1;
    else hi = mid;
  }
  if (lo == feature_count_) return {};
  const auto* entry = features_ + lo * kFeatureEntrySize;
  if (static_cast<FeatureKind>(load_le<std::uint32_t>(entry)) != key.kind ||
      string_at(load_le<std::uint32_t>(entry + 4)) != key.value)
    return {};
  auto first = load_le<std::uint64_t>(entry + 8), count = load_le<std::uint64_t>(entry + 16);
  if (first > posting_total_ || count > posting_total_ - first) corrupt("posting range out of bounds");
  return {postings_ + first * kPostingSize, count};
}

std::vector<FeatureKey> IndexArtifact::features() const {
  std::vector<FeatureKey> out;
  out.reserve(feature_count_);
  for (std::size_t i = 0; i < feature_count_; ++i) {
    const auto* entry = features_ + i * kFeatureEntrySize;
    out.push_back({static_cast<FeatureKind>(load_le<std::uint32_t>(entry)),
                   std::string(string_at(load_le<std::uint32_t>(entry + 4)))});
  }
  return out;
}

std::string_view IndexArtifact::sentence_id(std::uint32_t ordinal) const {
  if (ordinal >= sentence_count_) corrupt("sentence ordinal out of range");
  return string_at(load_le<std::uint32_t>(sentences_ + std::size_t{ordinal} * kSentenceRowSize));
}

std::uint32_t IndexArtifact::sentence_length(std::uint32_t ordinal) const {
  if (ordinal >= sentence_count_) corrupt("sentence ordinal out of range");
  return load_le<std::uint32_t>(sentences_ + std::size_t{ordinal} * kSentenceRowSize + 4);
}

SentenceGraph IndexArtifact::load_sentence(std::uint32_t ordinal) const {
  if (ordinal >= sentence_count_) corrupt("sentence ordinal out of range");
  const auto* row = sentences_ + std::size_t{ordinal} * kSentenceRowSize;
  auto offset = load_le<std::uint64_t>(row + 8);
  if (offset > corpus_size_ || corpus_size_ - offset < 8) corrupt("sentence record out of range");
  const auto* p = corpus_ + offset;
  auto n = load_le<std::uint32_t>(p), m = load_le<std::uint32_t>(p + 4);
  const std::size_t need = 8 + (std::size_t{n} * kTokenRecordWords + std::size_t{m} * 3) * 4;
  if (corpus_size_ - offset < need) corrupt("sentence record truncated");
  p += 8;

  SentenceGraph s;
  s.sentence_id = std::string(string_at(load_le<std::uint32_t>(row)));
  s.tokens.resize(n);
  auto span_of = [](std::uint32_t start, std::uint32_t end) -> std::optional<Span> {
    if (start == kNone) return std::nullopt;
    return Span{start, end};
  };
  for (std::uint32_t i = 0; i < n; ++i, p += kTokenRecordWords * 4) {
    auto& t = s.tokens[i];
    t.index = i;
    t.word = std::string(string_at(load_le<std::uint32_t>(p)));
    t.lemma = std::string(string_at(load_le<std::uint32_t>(p + 4)));
    t.tag = std::string(string_at(load_le<std::uint32_t>(p + 8)));
    auto entity = load_le<std::uint32_t>(p + 12);
    if (entity != kNone) t.entity = std::string(string_at(entity));
    t.entity_span = span_of(load_le<std::uint32_t>(p + 16), load_le<std::uint32_t>(p + 20));
    t.chunk_span = span_of(load_le<std::uint32_t>(p + 24), load_le<std::uint32_t>(p + 28));
    t.space_after = load_le<std::uint32_t>(p + 32) != 0;
  }
  s.edges.resize(m);
  for (std::uint32_t i = 0; i < m; ++i, p += 12) {
    s.edges[i].head = load_le<std::uint32_t>(p);
    s.edges[i].dependent = load_le<std::uint32_t>(p + 4);
    s.edges[i].label = std::string(string_at(load_le<std::uint32_t>(p + 8)));
    if (s.edges[i].head >= n || s.edges[i].dependent >= n) corrupt("edge endpoint out of range");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Planning and retrieval

std::vector<FeatureGroup> CandidatePlan::groups() const {
  std::vector<FeatureGroup> out;
  for (const auto& n : nodes) out.insert(out.end(), n.all_of.begin(), n.all_of.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CandidatePlan plan(const QueryGraph& g) {
  CandidatePlan p;
  auto kind_of = [](Property prop) {
    switch (prop) {
      case Property::Word: return FeatureKind::Word;
      case Property::Lemma: return FeatureKind::Lemma;
      case Property::Tag: return FeatureKind::Tag;
      case Property::Entity: return FeatureKind::Entity;
    }
    return FeatureKind::Word;
  };
  for (const auto& node : g.nodes) {
    NodeRequirement req;
    req.node = node.id;
    for (const auto& clause : node.constraint.clauses()) {
      if (clause.is_regex()) continue;
      FeatureGroup group;
      for (const auto& v : clause.literals) group.any_of.push_back({kind_of(clause.property), v});
      req.all_of.push_back(std::move(group));
    }
    for (const auto& e : g.edges) {
      if (e.from == node.id) req.all_of.push_back({{{FeatureKind::OutLabel, e.label}}});
      if (e.to == node.id) req.all_of.push_back({{{FeatureKind::InLabel, e.label}}});
    }
    for (auto& group : req.all_of) {
      std::sort(group.any_of.begin(), group.any_of.end());
      group.any_of.erase(std::unique(group.any_of.begin(), group.any_of.end()), group.any_of.end());
    }
    std::sort(req.all_of.begin(), req.all_of.end());
    req.all_of.erase(std::unique(req.all_of.begin(), req.all_of.end()), req.all_of.end());
    p.nodes.push_back(std::move(req));
  }
  return p;
}

// Union of posting lists, positioned by sentence.
struct CandidateIterator::Cursor {
  static constexpr std::uint32_t kEnd = std::numeric_limits<std::uint32_t>::max();

  std::vector<PostingList> lists;
  std::vector<std::size_t> positions;
  std::size_t cost = 0;

  // Smallest sentence >= target held by any list, or kEnd.
  std::uint32_t seek(std::uint32_t target) {
    std::uint32_t best = kEnd;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      positions[i] = lists[i].seek(positions[i], target);
      if (positions[i] < lists[i].size()) best = std::min(best, lists[i][positions[i]].sentence);
    }
    return best;
  }
};

CandidateIterator::CandidateIterator(const IndexArtifact& index, const CandidatePlan& plan)
    : sentence_count_(static_cast<std::uint32_t>(index.sentence_count())) {
  for (const auto& group : plan.groups()) {
    Cursor c;
    for (const auto& key : group.any_of) {
      auto list = index.postings(key);
      if (list.empty()) continue;
      c.cost += list.size();
      c.lists.push_back(list);
    }
    if (c.lists.empty()) {
      exhausted_ = true;
      return;
    }
    c.positions.assign(c.lists.size(), 0);
    cursors_.push_back(std::move(c));
  }
  std::stable_sort(cursors_.begin(), cursors_.end(),
                   [](const Cursor& a, const Cursor& b) { return a.cost < b.cost; });
}

CandidateIterator::~CandidateIterator() = default;
CandidateIterator::CandidateIterator(CandidateIterator&&) noexcept = default;
CandidateIterator& CandidateIterator::operator=(CandidateIterator&&) noexcept = default;

std::optional<std::uint32_t> CandidateIterator::advance_to(std::uint32_t target) {
  // Leapfrog: raise the target until every cursor agrees on it.
  std::size_t agreeing = 0, i = 0;
  while (agreeing < cursors_.size()) {
    auto s = cursors_[i].seek(target);
    if (s == Cursor::kEnd || s >= sentence_count_) return std::nullopt;
    if (s == target) {
      ++agreeing;
    } else {
      target = s;
      agreeing = 1;
    }
    i = (i + 1) % cursors_.size();
  }
  return target;
}

std::optional<std::uint32_t> CandidateIterator::next() {
  if (exhausted_ || next_target_ >= sentence_count_) {
    exhausted_ = true;
    return std::nullopt;
  }
  std::optional<std::uint32_t> found;
  if (cursors_.empty()) found = next_target_;
  else found = advance_to(next_target_);
  if (!found) {
    exhausted_ = true;
    return std::nullopt;
  }
  next_target_ = *found + 1;
  return found;
}

std::vector<std::uint32_t> candidates(const IndexArtifact& index, const CandidatePlan& plan) {
  std::vector<std::uint32_t> out;
  CandidateIterator it(index, plan);
  while (auto s = it.next()) out.push_back(*s);
  return out;
}

}  // namespace synsearch
