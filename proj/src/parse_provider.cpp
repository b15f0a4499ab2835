// SPDX-License-Identifier: Apache-2.0

#include "synsearch/parse_provider.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "synsearch/error.hpp"

namespace synsearch {

std::string ParseRequest::joined() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void check_alignment(const ParseRequest& request, const SentenceGraph& graph) {
  if (graph.tokens.size() != request.words.size())
    throw Error(ErrorKind::AlignmentError, "query could not be parsed: parser returned " +
                                               std::to_string(graph.tokens.size()) + " tokens for " +
                                               std::to_string(request.words.size()) + " words");
  if (!graph.is_connected())
    throw Error(ErrorKind::AlignmentError, "query could not be parsed: parse graph is not connected");
}

FixtureParseProvider::FixtureParseProvider(const std::filesystem::path& directory, const IngestOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw Error(ErrorKind::Io, "parse fixture directory not found: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".conllu") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  IngestOptions opts = options;
  opts.require_sent_id = false;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + file.string());
    for (const auto& s : ingest_conllu(in, opts, file.string()).sentences) add(s);
  }
}

FixtureParseProvider::FixtureParseProvider(const Corpus& corpus) {
  for (const auto& s : corpus.sentences) add(s);
}

void FixtureParseProvider::add(const SentenceGraph& s) {
  ParseRequest key;
  for (const auto& t : s.tokens) key.words.push_back(t.word);
  parses_.emplace(key.joined(), s);  // first definition wins
}

SentenceGraph FixtureParseProvider::parse(const ParseRequest& request) const {
  auto it = parses_.find(request.joined());
  if (it == parses_.end())
    throw Error(ErrorKind::ProviderUnavailable, "no fixture parse for '" + request.joined() + "'");
  check_alignment(request, it->second);
  return it->second;
}

HttpParseProvider::HttpParseProvider(std::string url, std::chrono::milliseconds timeout, IngestOptions options)
    : timeout_(timeout), options_(options) {
  options_.require_sent_id = false;
  auto scheme_end = url.find("://");
  auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) {
    origin_ = url;
    path_ = "/";
  } else {
    origin_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
  if (scheme_end == std::string::npos) origin_ = "http://" + origin_;
}

SentenceGraph HttpParseProvider::parse(const ParseRequest& request) const {
  std::string body;
  for (const auto& w : request.words) body += w + '\n';

  httplib::Client client(origin_);
  auto secs = timeout_.count() / 1000, usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path_, body, "text/plain; charset=utf-8");
  if (!res)
    throw Error(ErrorKind::ProviderUnavailable,
                "parse provider unreachable at " + origin_ + path_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorKind::ProviderUnavailable, "parse provider returned HTTP " + std::to_string(res->status));

  std::istringstream in(res->body);
  Corpus parsed;
  try {
    parsed = ingest_conllu(in, options_, "parse-provider");
  } catch (const Error& e) {
    throw Error(ErrorKind::AlignmentError, std::string("query could not be parsed: ") + e.what());
  }
  if (parsed.sentences.size() != 1)
    throw Error(ErrorKind::AlignmentError, "query could not be parsed: expected one sentence, got " +
                                               std::to_string(parsed.sentences.size()));
  check_alignment(request, parsed.sentences.front());
  return std::move(parsed.sentences.front());
}

}  // namespace synsearch
