#pragma once

// Read-only JSON query API over classification reports.
//
//   GET /v1/summary           latest report without its pair list
//   GET /v1/prefix/<prefix>   pairs equal to or covered by <prefix>
//   GET /v1/class/<name>      pairs of one class, ?page=N&page_size=M

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

// httplib's default backlog of 5 drops bursts of concurrent clients.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 256
#endif
#include "httplib.h"
#include "rovclass/report.hpp"

namespace rovclass {

/// Holds the report being served. Replacing it swaps a shared pointer, so
/// requests already in flight keep the report they started with.
class ReportStore {
 public:
  ReportStore() = default;
  explicit ReportStore(ClassificationReport r) { replace(std::move(r)); }

  void replace(ClassificationReport r) {
    auto fresh = std::make_shared<const ClassificationReport>(std::move(r));
    std::lock_guard lock(mu_);
    current_ = std::move(fresh);
  }

  std::shared_ptr<const ClassificationReport> current() const {
    std::lock_guard lock(mu_);
    return current_;
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ClassificationReport> current_;
};

struct QueryResponse {
  int status = 200;
  std::string body;
};

inline constexpr std::size_t default_page_size = 100;
inline constexpr std::size_t max_page_size = 1000;

/// Request handling with no transport attached; the HTTP server delegates here.
class QueryService {
 public:
  explicit QueryService(const ReportStore& store) : store_(store) {}

  QueryResponse summary() const {
    auto r = store_.current();
    if (!r) return error(503, "no-report", "no report loaded");
    return ok(report_summary_json(*r));
  }

  QueryResponse prefix(std::string_view text) const {
    auto parsed = try_parse_prefix(text);
    if (!parsed) return error(400, "malformed-prefix", "cannot parse '" + std::string(text) + "' as a prefix");
    auto r = store_.current();
    if (!r) return error(503, "no-report", "no report loaded");
    ojson pairs = ojson::array();
    for (const auto& p : r->pairs) {
      if (covers(parsed->prefix, p.prefix)) pairs.push_back(pair_json(p));
    }
    ojson body;
    body["query"] = parsed->prefix.to_string();
    body["pairs"] = std::move(pairs);
    return ok(body);
  }

  QueryResponse by_class(std::string_view name, std::string_view page_text, std::string_view size_text) const {
    auto cls = parse_class(name);
    if (!cls) return error(404, "unknown-class", "no class named '" + std::string(name) + "'");
    std::size_t page = 1, page_size = default_page_size;
    if (!page_text.empty()) {
      auto v = detail::parse_uint(page_text, 1U << 30);
      if (!v || *v == 0) return error(400, "malformed-page", "page must be a positive integer");
      page = *v;
    }
    if (!size_text.empty()) {
      auto v = detail::parse_uint(size_text, max_page_size);
      if (!v || *v == 0) {
        return error(400, "malformed-page-size",
                     "page_size must be an integer in 1.." + std::to_string(max_page_size));
      }
      page_size = *v;
    }
    auto r = store_.current();
    if (!r) return error(503, "no-report", "no report loaded");
    ojson pairs = ojson::array();
    std::size_t matched = 0;
    const std::size_t first = (page - 1) * page_size;
    for (const auto& p : r->pairs) {
      if (p.cls != *cls) continue;
      if (matched >= first && matched < first + page_size) pairs.push_back(pair_json(p));
      ++matched;
    }
    ojson body;
    body["class"] = to_string(*cls);
    body["page"] = page;
    body["page_size"] = page_size;
    body["total"] = matched;
    body["pairs"] = std::move(pairs);
    return ok(body);
  }

 private:
  static QueryResponse ok(const ojson& body) { return {200, body.dump()}; }
  static QueryResponse error(int status, std::string code, std::string message) {
    ojson body;
    body["error"] = {{"code", std::move(code)}, {"message", std::move(message)}};
    return {status, body.dump()};
  }

  const ReportStore& store_;
};

/// HTTP/1.1 front end for QueryService. `start` binds and serves on a
/// background thread; `listen` blocks.
class ReportServer {
 public:
  explicit ReportServer(const ReportStore& store) : service_(store) {
    auto reply = [](httplib::Response& res, const QueryResponse& q) {
      res.status = q.status;
      res.set_content(q.body, "application/json");
    };
    // httplib also sets SO_REUSEPORT, which would let a second server share
    // the port silently; an occupied port must be a bind error instead.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    server_.Get("/v1/summary", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service_.summary());
    });
    server_.Get(R"(/v1/prefix/(.+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service_.prefix(req.matches[1].str()));
    });
    server_.Get(R"(/v1/class/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, service_.by_class(req.matches[1].str(), req.get_param_value("page"),
                                   req.get_param_value("page_size")));
    });
  }

  ReportServer(const ReportServer&) = delete;
  ReportServer& operator=(const ReportServer&) = delete;

  ~ReportServer() { stop(); }

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  /// Throws IoError when binding fails.
  int start(const std::string& host, int port) {
    int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  void listen(const std::string& host, int port) {
    if (!server_.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    server_.listen_after_bind();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  QueryService service_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace rovclass
