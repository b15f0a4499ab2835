// SPDX-License-Identifier: Apache-2.0

#include "synsearch/conllu.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <sstream>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "synsearch/error.hpp"

namespace synsearch {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_uint(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::MalformedInput, "line " + std::to_string(line) + ": " + what, line);
}

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One B/I/O annotation from MISC, before span resolution.
struct BioTag {
  char prefix = 'O';  // 'B', 'I' or 'O'
  std::string type;
};

BioTag parse_bio(std::string_view value, std::size_t line) {
  if (value == "O") return {};
  if (value.size() < 3 || (value[0] != 'B' && value[0] != 'I') || value[1] != '-')
    malformed(line, "bad BIO value '" + std::string(value) + "'");
  return {value[0], std::string(value.substr(2))};
}

// Maximal runs: B always opens a run, I continues a run of the same type and
// otherwise opens one.
std::vector<std::optional<Span>> resolve_bio(const std::vector<BioTag>& tags) {
  std::vector<std::optional<Span>> spans(tags.size());
  std::size_t i = 0;
  while (i < tags.size()) {
    if (tags[i].prefix == 'O') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j].prefix == 'I' && tags[j].type == tags[i].type) ++j;
    for (std::size_t k = i; k < j; ++k)
      spans[k] = Span{static_cast<TokenIndex>(i), static_cast<TokenIndex>(j)};
    i = j;
  }
  return spans;
}

struct PendingEdge {
  std::uint32_t head;  // 1-based, 0 = root
  std::uint32_t dependent;
  std::string label;
  std::size_t line;
};

class BlockReader {
 public:
  BlockReader(const IngestOptions& options, Corpus& corpus, std::unordered_set<std::string>& ids,
              const std::string& source)
      : options_(options), corpus_(corpus), ids_(ids), source_(source) {}

  void comment(std::string_view line) {
    auto body = trim(line.substr(1));
    if (body.rfind("sent_id", 0) != 0) return;
    body.remove_prefix(7);
    body = trim(body);
    if (!body.empty() && body.front() == '=') body = trim(body.substr(1));
    sent_id_ = std::string(body);
    sent_id_line_ = line_no_;
  }

  void token_line(std::string_view line) {
    auto cols = split(line, '\t');
    if (cols.size() != 10) malformed(line_no_, "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    if (!in_block_) start_block();
    // Multiword ranges and empty nodes carry no graph tokens.
    if (cols[0].find_first_of("-.") != std::string_view::npos) return;
    std::uint32_t id = 0;
    if (!parse_uint(cols[0], id) || id != tokens_.size() + 1)
      malformed(line_no_, "token id '" + std::string(cols[0]) + "' out of sequence");

    Token t;
    t.index = id - 1;
    t.word = std::string(cols[1]);
    if (t.word.empty() || t.word.find_first_of(" \t") != std::string::npos)
      malformed(line_no_, "word is empty or contains whitespace");
    t.lemma = std::string(cols[2]);
    auto tag = options_.tag_column == TagColumn::Xpos ? cols[4] : cols[3];
    t.tag = tag == "_" ? std::string() : std::string(tag);

    if (cols[6] != "_") {
      std::uint32_t head = 0;
      if (!parse_uint(cols[6], head)) malformed(line_no_, "bad HEAD '" + std::string(cols[6]) + "'");
      if (head != 0) {
        if (cols[7].empty() || cols[7] == "_") malformed(line_no_, "missing DEPREL");
        edges_.push_back({head, id, std::string(cols[7]), line_no_});
      }
    }
    if (cols[8] != "_") {
      for (auto item : split(cols[8], '|')) {
        auto colon = item.find(':');
        if (colon == std::string_view::npos || colon + 1 == item.size())
          malformed(line_no_, "bad DEPS entry '" + std::string(item) + "'");
        auto head_text = item.substr(0, colon);
        if (head_text.find('.') != std::string_view::npos) continue;
        std::uint32_t head = 0;
        if (!parse_uint(head_text, head)) malformed(line_no_, "bad DEPS head '" + std::string(head_text) + "'");
        if (head != 0) edges_.push_back({head, id, std::string(item.substr(colon + 1)), line_no_});
      }
    }

    BioTag entity, chunk;
    if (cols[9] != "_") {
      for (auto item : split(cols[9], '|')) {
        auto eq = item.find('=');
        if (eq == std::string_view::npos) continue;
        auto key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "Entity") entity = parse_bio(value, line_no_);
        else if (key == "Chunk") chunk = parse_bio(value, line_no_);
        else if (key == "SpaceAfter") t.space_after = value != "No";
      }
    }
    entity_tags_.push_back(std::move(entity));
    chunk_tags_.push_back(std::move(chunk));
    tokens_.push_back(std::move(t));
  }

  void end_block() {
    if (!in_block_) return;
    in_block_ = false;
    if (tokens_.empty()) return;

    SentenceGraph s;
    if (sent_id_.empty()) {
      if (options_.require_sent_id) malformed(block_line_, "sentence block without '# sent_id'");
      sent_id_ = std::to_string(corpus_.sentences.size() + corpus_.skipped_sentences + 1);
    }
    s.sentence_id = std::move(sent_id_);

    const auto n = static_cast<std::uint32_t>(tokens_.size());
    for (auto& e : edges_) {
      if (e.head > n) malformed(e.line, "head " + std::to_string(e.head) + " beyond sentence length");
      if (e.head == e.dependent) malformed(e.line, "self-loop edge");
      s.edges.push_back({e.head - 1, e.dependent - 1, std::move(e.label)});
    }
    s.normalize_edges();

    auto entity_spans = resolve_bio(entity_tags_);
    auto chunk_spans = resolve_bio(chunk_tags_);
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (entity_spans[i]) {
        tokens_[i].entity = entity_tags_[i].type;
        tokens_[i].entity_span = entity_spans[i];
      }
      if (chunk_spans[i] && chunk_tags_[i].type == "NP") tokens_[i].chunk_span = chunk_spans[i];
    }
    s.tokens = std::move(tokens_);

    if (!s.is_connected()) {
      corpus_.warnings.push_back(source_ + ":" + std::to_string(block_line_) + ": sentence '" + s.sentence_id +
                                 "' skipped: dependency graph is not connected");
      ++corpus_.skipped_sentences;
      return;
    }
    if (!ids_.insert(s.sentence_id).second)
      throw Error(ErrorKind::DuplicateSentenceId,
                  "line " + std::to_string(sent_id_line_) + ": duplicate sentence id '" + s.sentence_id + "'",
                  sent_id_line_);
    corpus_.sentences.push_back(std::move(s));
  }

  void advance_line() { ++line_no_; }
  void mark_comment_start() {
    if (!in_block_) start_block();
  }

 private:
  void start_block() {
    in_block_ = true;
    block_line_ = line_no_;
    tokens_.clear();
    edges_.clear();
    entity_tags_.clear();
    chunk_tags_.clear();
    sent_id_.clear();
  }

  const IngestOptions& options_;
  Corpus& corpus_;
  std::unordered_set<std::string>& ids_;
  const std::string& source_;

  std::size_t line_no_ = 0;
  std::size_t block_line_ = 0;
  std::size_t sent_id_line_ = 0;
  bool in_block_ = false;
  std::string sent_id_;
  std::vector<Token> tokens_;
  std::vector<PendingEdge> edges_;
  std::vector<BioTag> entity_tags_;
  std::vector<BioTag> chunk_tags_;
};

}  // namespace

Corpus ingest_conllu(std::istream& input, const IngestOptions& options, const std::string& source_name) {
  Corpus corpus;
  corpus.sources.push_back({source_name, now_iso8601()});
  std::unordered_set<std::string> ids;
  BlockReader reader(options, corpus, ids, source_name);

  std::string line;
  while (std::getline(input, line)) {
    reader.advance_line();
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) {
      reader.end_block();
    } else if (view.front() == '#') {
      reader.mark_comment_start();
      reader.comment(view);
    } else {
      reader.token_line(view);
    }
  }
  reader.end_block();
  return corpus;
}

void merge_corpus(Corpus& into, Corpus&& more) {
  std::unordered_set<std::string> ids;
  for (const auto& s : into.sentences) ids.insert(s.sentence_id);
  for (auto& s : more.sentences) {
    if (!ids.insert(s.sentence_id).second)
      throw Error(ErrorKind::DuplicateSentenceId, "duplicate sentence id '" + s.sentence_id + "'");
    into.sentences.push_back(std::move(s));
  }
  for (auto& src : more.sources) into.sources.push_back(std::move(src));
  for (auto& w : more.warnings) into.warnings.push_back(std::move(w));
  into.skipped_sentences += more.skipped_sentences;
}

void render_conllu(std::ostream& out, const SentenceGraph& s, TagColumn tag_column) {
  out << "# sent_id = " << s.sentence_id << '\n';
  out << "# text = " << sentence_text(s) << '\n';
  std::vector<std::vector<const DepEdge*>> incoming(s.tokens.size());
  for (const auto& e : s.edges) incoming[e.dependent].push_back(&e);

  auto bio = [](const std::optional<Span>& span, TokenIndex i, const std::string& type) {
    return std::string(span && span->start != i ? "I-" : "B-") + type;
  };
  auto or_blank = [](const std::string& v) -> std::string_view { return v.empty() ? "_" : std::string_view(v); };

  for (const auto& t : s.tokens) {
    const auto& in = incoming[t.index];
    out << t.index + 1 << '\t' << t.word << '\t' << or_blank(t.lemma) << '\t';
    if (tag_column == TagColumn::Upos) out << or_blank(t.tag) << "\t_\t";
    else out << "_\t" << or_blank(t.tag) << '\t';
    out << "_\t";
    if (in.empty()) {
      out << "0\troot\t0:root\t";
    } else {
      out << in.front()->head + 1 << '\t' << in.front()->label << '\t';
      for (std::size_t k = 0; k < in.size(); ++k) out << (k ? "|" : "") << in[k]->head + 1 << ':' << in[k]->label;
      out << '\t';
    }
    std::vector<std::string> misc;
    if (t.has_entity()) misc.push_back("Entity=" + bio(t.entity_span, t.index, t.entity));
    if (t.chunk_span) misc.push_back("Chunk=" + bio(t.chunk_span, t.index, "NP"));
    if (!t.space_after) misc.emplace_back("SpaceAfter=No");
    if (misc.empty()) out << '_';
    for (std::size_t k = 0; k < misc.size(); ++k) out << (k ? "|" : "") << misc[k];
    out << '\n';
  }
  out << '\n';
}

void render_conllu(std::ostream& out, const Corpus& corpus, TagColumn tag_column) {
  for (const auto& s : corpus.sentences) render_conllu(out, s, tag_column);
}

}  // namespace synsearch
