// SPDX-License-Identifier: Apache-2.0
//
// HTTP API over one immutable index:
//   POST /api/query   {query, page, page_size} -> graph + one page of results
//   GET  /api/export  ?query=...&limit=...     -> TSV
//   GET  /api/health                           -> {status, corpus_sentences, index_version}
// Handlers are plain member functions so they can be exercised without a
// socket; `mount` wires them into an httplib server.

#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "synsearch/index.hpp"
#include "synsearch/matcher.hpp"
#include "synsearch/parse_provider.hpp"

namespace httplib {
class Server;
}

namespace synsearch {

struct ServiceConfig {
  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
  // Stop counting matches here and report "more".
  std::size_t count_cap = 10'000;
  MatchOptions match;
  std::string cors_origin = "*";
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class SearchService {
 public:
  SearchService(std::shared_ptr<const ParseProvider> provider, ServiceConfig config = {});

  /// Until an index is installed every endpoint answers 503.
  void set_index(std::shared_ptr<const IndexArtifact> index);
  bool ready() const;

  HttpResponse query(std::string_view request_body) const;
  HttpResponse export_tsv(std::string_view query, std::optional<std::size_t> limit) const;
  HttpResponse health() const;

  void mount(httplib::Server& server) const;

 private:
  std::shared_ptr<const IndexArtifact> index() const;

  std::shared_ptr<const ParseProvider> provider_;
  ServiceConfig config_;
  std::shared_ptr<const IndexArtifact> index_;  // accessed via std::atomic_load/store
};

}  // namespace synsearch
