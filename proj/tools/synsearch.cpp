// SPDX-License-Identifier: Apache-2.0
//
// synsearch: build indexes, run ad-hoc queries, export TSV, run the service.
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "synsearch/conllu.hpp"
#include "synsearch/error.hpp"
#include "synsearch/export.hpp"
#include "synsearch/index.hpp"
#include "synsearch/matcher.hpp"
#include "synsearch/parse_provider.hpp"
#include "synsearch/query_graph.hpp"
#include "synsearch/service.hpp"

namespace {

using namespace synsearch;

struct ProviderFlags {
  std::string parses;
  std::string parser_url;
  int timeout_ms = 5000;
};

void add_provider_flags(CLI::App& cmd, ProviderFlags& flags) {
  auto* parses = cmd.add_option("--parses", flags.parses, "Directory of CoNLL-U parses for query sentences")
                     ->envname("SYNSEARCH_PARSES");
  auto* url = cmd.add_option("--parser-url", flags.parser_url, "HTTP parse provider endpoint")
                  ->envname("SYNSEARCH_PARSER_URL");
  parses->excludes(url);
  cmd.add_option("--parser-timeout-ms", flags.timeout_ms, "HTTP parse provider timeout")
      ->check(CLI::PositiveNumber)
      ->envname("SYNSEARCH_PARSER_TIMEOUT_MS");
}

std::shared_ptr<const ParseProvider> make_provider(const ProviderFlags& flags) {
  if (!flags.parses.empty()) return std::make_shared<FixtureParseProvider>(flags.parses);
  if (!flags.parser_url.empty())
    return std::make_shared<HttpParseProvider>(flags.parser_url, std::chrono::milliseconds(flags.timeout_ms));
  throw CLI::RequiredError("one of --parses or --parser-url");
}

std::string highlight(const MatchResult& r, const IndexArtifact& index) {
  auto sentence = index.load_sentence(r.sentence_ordinal);
  std::vector<const Capture*> order;
  for (const auto& c : r.captures) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->span < b->span; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i]->span.start < order[i - 1]->span.end) return r.sentence_text;  // overlapping spans

  std::string out;
  TokenIndex next = 0;
  auto separate = [&](TokenIndex start) {
    if (start > 0 && !out.empty() && sentence.tokens[start - 1].space_after) out += ' ';
  };
  auto flush = [&](TokenIndex end) {
    if (next < end) {
      separate(next);
      out += span_text(sentence, {next, end});
    }
  };
  for (const auto* c : order) {
    flush(c->span.start);
    separate(c->span.start);
    out += "[" + c->name + ": " + c->text + "]";
    next = c->span.end;
  }
  flush(static_cast<TokenIndex>(sentence.tokens.size()));
  return out;
}

int run_index(const std::vector<std::string>& inputs, const std::string& output, const std::string& tag_column) {
  IngestOptions options;
  options.tag_column = tag_column == "upos" ? TagColumn::Upos : TagColumn::Xpos;
  Corpus corpus;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read input file: " + path);
    merge_corpus(corpus, ingest_conllu(in, options, path));
  }
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << '\n';

  IndexBuilder builder;
  for (const auto& s : corpus.sentences) builder.add(s);
  const auto features = builder.feature_count();
  builder.write(output);
  std::cout << "sentences: " << corpus.sentences.size() << '\n'
            << "tokens: " << corpus.token_count() << '\n'
            << "features: " << features << '\n'
            << "skipped: " << corpus.skipped_sentences << '\n'
            << "written: " << output << '\n';
  return 0;
}

int run_search(const std::string& index_path, const std::string& query, std::optional<std::size_t> limit, bool tsv,
               const ProviderFlags& flags) {
  auto provider = make_provider(flags);
  auto index = IndexArtifact::open(index_path);
  CompiledQuery compiled;
  try {
    compiled = compile_query(query, *provider);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    if (e.has_position() && e.position() <= query.size())
      std::cerr << "  " << query << "\n  " << std::string(e.position(), ' ') << "^\n";
    return 1;
  }
  ResultStream stream(index, compiled.graph);
  std::size_t rows = 0;
  if (tsv) {
    rows = export_tsv(stream, limit, std::cout);
  } else {
    while (!limit || rows < *limit) {
      auto r = stream.next();
      if (!r) break;
      std::cout << r->sentence_id << '\t' << highlight(*r, index) << '\n';
      for (const auto& c : r->captures)
        std::cout << "  " << c.name << " = " << c.text << " [" << c.span.start << ',' << c.span.end << ")\n";
      ++rows;
    }
  }
  if (rows == 0) std::cerr << "note: no matches\n";
  if (stream.truncated_sentences() > 0)
    std::cerr << "note: " << stream.truncated_sentences() << " sentence(s) hit the per-sentence match cap\n";
  return 0;
}

httplib::Server* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& index_path, const std::string& listen, const ProviderFlags& flags,
              ServiceConfig config) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--listen", "expected host:port");
  auto host = listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--listen", "bad port in '" + listen + "'");
  }

  auto service = std::make_shared<SearchService>(make_provider(flags), config);
  httplib::Server server;
  // httplib's default enables SO_REUSEPORT, which would let a second server
  // share an occupied port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  service->mount(server);
  if (!server.bind_to_port(host, port)) {
    std::cerr << "error: cannot listen on " << listen << " (port in use?)\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  try {
    service->set_index(std::make_shared<IndexArtifact>(IndexArtifact::open(index_path)));
  } catch (...) {
    server.stop();
    listener.join();
    g_server = nullptr;
    throw;
  }
  std::cerr << "serving " << index_path << " on http://" << listen << '\n';
  listener.join();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Syntactic search over dependency-parsed corpora"};
  app.require_subcommand(1);

  auto* index_cmd = app.add_subcommand("index", "Ingest CoNLL-U files and write an index artifact");
  std::vector<std::string> inputs;
  std::string output, tag_column = "xpos";
  index_cmd->add_option("--input", inputs, "Annotated CoNLL-U input files")->required()->expected(1, -1);
  index_cmd->add_option("--output", output, "Index artifact path")->required()->envname("SYNSEARCH_OUTPUT");
  index_cmd->add_option("--tag-column", tag_column, "Column used as the tag property")
      ->check(CLI::IsMember({"upos", "xpos"}));

  auto* search_cmd = app.add_subcommand("search", "Run one query against an index");
  std::string index_path, query;
  std::size_t limit = 0;
  bool tsv = false;
  ProviderFlags search_flags;
  search_cmd->add_option("--index", index_path, "Index artifact")->required()->envname("SYNSEARCH_INDEX");
  search_cmd->add_option("--query", query, "Example-based query")->required();
  auto* limit_opt = search_cmd->add_option("--limit", limit, "Maximum number of results")->check(CLI::PositiveNumber);
  search_cmd->add_flag("--tsv", tsv, "Emit TSV identical to /api/export");
  add_provider_flags(*search_cmd, search_flags);

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_index, listen = "127.0.0.1:8080";
  ProviderFlags serve_flags;
  ServiceConfig config;
  serve_cmd->add_option("--index", serve_index, "Index artifact")->required()->envname("SYNSEARCH_INDEX");
  serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str()->envname("SYNSEARCH_LISTEN");
  serve_cmd->add_option("--page-size", config.default_page_size, "Default page size")
      ->check(CLI::Range(1, 500))
      ->envname("SYNSEARCH_PAGE_SIZE");
  serve_cmd->add_option("--max-page-size", config.max_page_size, "Largest accepted page size")
      ->check(CLI::Range(1, 500))
      ->envname("SYNSEARCH_MAX_PAGE_SIZE");
  serve_cmd->add_option("--count-cap", config.count_cap, "Stop counting results here")
      ->check(CLI::PositiveNumber)
      ->envname("SYNSEARCH_COUNT_CAP");
  serve_cmd->add_option("--max-matches-per-sentence", config.match.max_matches_per_sentence)
      ->check(CLI::PositiveNumber)
      ->envname("SYNSEARCH_MAX_MATCHES_PER_SENTENCE");
  serve_cmd->add_option("--cors-origin", config.cors_origin, "Access-Control-Allow-Origin value")
      ->envname("SYNSEARCH_CORS_ORIGIN");
  add_provider_flags(*serve_cmd, serve_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*index_cmd) return run_index(inputs, output, tag_column);
    if (*search_cmd)
      return run_search(index_path, query, limit_opt->count() ? std::optional<std::size_t>(limit) : std::nullopt, tsv,
                        search_flags);
    if (*serve_cmd) return run_serve(serve_index, listen, serve_flags, config);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
