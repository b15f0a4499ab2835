// SPDX-License-Identifier: Apache-2.0

#include "synsearch/service.hpp"

#include <charconv>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "synsearch/error.hpp"
#include "synsearch/export.hpp"
#include "synsearch/query_graph.hpp"

namespace synsearch {
namespace {

using nlohmann::json;

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, std::string_view kind, std::string_view message,
                            std::optional<std::size_t> position = std::nullopt) {
  json body{{"error_kind", kind}, {"message", message}};
  body["position"] = position ? json(*position) : json(nullptr);
  return json_response(status, body);
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError:
    case ErrorKind::DuplicateCapture:
    case ErrorKind::InvalidExpansion:
    case ErrorKind::NoMarkedWords:
    case ErrorKind::UnknownProperty:
    case ErrorKind::RegexError:
    case ErrorKind::MissingProperty: return 400;
    case ErrorKind::ProviderUnavailable: return 502;
    case ErrorKind::AlignmentError: return 422;
    default: return 500;
  }
}

HttpResponse from_error(const Error& e) {
  return error_response(status_for(e.kind()), to_string(e.kind()), e.what(),
                        e.has_position() ? std::optional<std::size_t>(e.position()) : std::nullopt);
}

HttpResponse not_ready() { return error_response(503, "Unavailable", "index is still loading"); }

json capture_json(const Capture& c) {
  return {{"name", c.name}, {"token", c.token}, {"span", {c.span.start, c.span.end}}, {"text", c.text}};
}

}  // namespace

SearchService::SearchService(std::shared_ptr<const ParseProvider> provider, ServiceConfig config)
    : provider_(std::move(provider)), config_(std::move(config)) {}

void SearchService::set_index(std::shared_ptr<const IndexArtifact> index) { std::atomic_store(&index_, std::move(index)); }

std::shared_ptr<const IndexArtifact> SearchService::index() const { return std::atomic_load(&index_); }

bool SearchService::ready() const { return index() != nullptr; }

HttpResponse SearchService::health() const {
  auto idx = index();
  if (!idx) return json_response(503, {{"status", "loading"}});
  return json_response(200, {{"status", "ok"},
                             {"corpus_sentences", idx->sentence_count()},
                             {"index_version", idx->version()}});
}

HttpResponse SearchService::query(std::string_view request_body) const {
  auto idx = index();
  if (!idx) return not_ready();

  json request;
  try {
    request = json::parse(request_body);
  } catch (const json::exception& e) {
    return error_response(400, "BadRequest", std::string("request body is not valid JSON: ") + e.what());
  }
  if (!request.is_object() || !request.contains("query") || !request["query"].is_string())
    return error_response(400, "BadRequest", "field 'query' (string) is required");
  std::int64_t page = 0, page_size = static_cast<std::int64_t>(config_.default_page_size);
  if (request.contains("page")) {
    if (!request["page"].is_number_integer() || request["page"].get<std::int64_t>() < 0)
      return error_response(400, "BadRequest", "'page' must be an integer >= 0");
    page = request["page"].get<std::int64_t>();
  }
  if (request.contains("page_size")) {
    const auto& ps = request["page_size"];
    if (!ps.is_number_integer() || ps.get<std::int64_t>() < 1 ||
        ps.get<std::int64_t>() > static_cast<std::int64_t>(config_.max_page_size))
      return error_response(400, "BadRequest",
                            "'page_size' must be an integer in [1, " + std::to_string(config_.max_page_size) + "]");
    page_size = ps.get<std::int64_t>();
  }

  CompiledQuery compiled;
  try {
    compiled = compile_query(request["query"].get<std::string>(), *provider_);
  } catch (const Error& e) {
    return from_error(e);
  }

  ResultStream stream(*idx, compiled.graph, config_.match);
  const auto first = static_cast<std::size_t>(page) * static_cast<std::size_t>(page_size);
  const auto last = first + static_cast<std::size_t>(page_size);
  auto results = json::array();
  std::size_t seen = 0;
  bool more = false;
  while (true) {
    auto r = stream.next();
    if (!r) break;
    if (seen >= first && seen < last) {
      auto captures = json::array();
      for (const auto& c : r->captures) captures.push_back(capture_json(c));
      results.push_back({{"sentence_id", r->sentence_id}, {"text", r->sentence_text}, {"captures", std::move(captures)}});
    }
    ++seen;
    if (seen >= config_.count_cap && seen >= last) {
      more = stream.next().has_value();
      break;
    }
  }

  json body{{"graph", graph_to_json(compiled.graph)},
            {"results", std::move(results)},
            {"page", page},
            {"page_size", page_size},
            {"truncated_sentences", stream.truncated_sentences()}};
  body["total_estimate"] = more ? json("more") : json(seen);
  return json_response(200, body);
}

HttpResponse SearchService::export_tsv(std::string_view query, std::optional<std::size_t> limit) const {
  auto idx = index();
  if (!idx) return not_ready();
  CompiledQuery compiled;
  try {
    compiled = compile_query(query, *provider_);
  } catch (const Error& e) {
    return from_error(e);
  }
  ResultStream stream(*idx, compiled.graph, config_.match);
  std::ostringstream out;
  synsearch::export_tsv(stream, limit, out);
  return {200, "text/tab-separated-values; charset=utf-8", out.str()};
}

void SearchService::mount(httplib::Server& server) const {
  auto send = [origin = config_.cors_origin](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(r.body, r.content_type);
  };
  server.Options(R"(/api/.*)", [origin = config_.cors_origin](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.Post("/api/query",
              [this, send](const httplib::Request& req, httplib::Response& res) { send(res, query(req.body)); });
  server.Get("/api/export", [this, send](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("query")) {
      send(res, error_response(400, "BadRequest", "parameter 'query' is required"));
      return;
    }
    std::optional<std::size_t> limit;
    if (req.has_param("limit")) {
      auto text = req.get_param_value("limit");
      std::size_t value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
        send(res, error_response(400, "BadRequest", "'limit' must be a positive integer"));
        return;
      }
      limit = value;
    }
    auto r = export_tsv(req.get_param_value("query"), limit);
    if (r.status == 200) res.set_header("Content-Disposition", "attachment; filename=\"results.tsv\"");
    send(res, r);
  });
}

}  // namespace synsearch
