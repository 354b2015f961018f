#include "metaglyph/service.hpp"

#include <atomic>
#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "metaglyph/dsl/evaluator.hpp"
#include "metaglyph/font/svg.hpp"

namespace metaglyph::service {

using nlohmann::json;

std::string version_string() { return METAGLYPH_VERSION; }

std::variant<CompileRequest, RequestError> parse_request(const std::string& body, std::size_t max_bytes) {
  if (body.size() > max_bytes) return RequestError{413, "request body exceeds " + std::to_string(max_bytes) + " bytes"};
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return RequestError{400, "body must be a JSON object"};
  CompileRequest req;
  auto it = j.find("source");
  if (it == j.end() || !it->is_string()) return RequestError{400, "\"source\" must be a string"};
  req.source = it->get<std::string>();
  if (req.source.size() > max_bytes) return RequestError{413, "source exceeds " + std::to_string(max_bytes) + " bytes"};
  if (auto o = j.find("overrides"); o != j.end() && !o->is_null()) {
    if (!o->is_object()) return RequestError{400, "\"overrides\" must be an object"};
    for (const auto& [k, v] : o->items()) {
      if (!v.is_number() || !std::isfinite(v.get<double>()))
        return RequestError{400, "override \"" + k + "\" must be a finite number"};
      req.overrides[k] = v.get<double>();
    }
  }
  if (auto d = j.find("debug"); d != j.end() && !d->is_null()) {
    if (!d->is_boolean()) return RequestError{400, "\"debug\" must be a boolean"};
    req.debug = d->get<bool>();
  }
  if (auto t = j.find("timeout_ms"); t != j.end() && !t->is_null()) {
    if (!t->is_number_integer()) return RequestError{400, "\"timeout_ms\" must be an integer"};
    auto v = t->get<std::int64_t>();
    if (v <= 0 || v > kMaxTimeoutMs)
      return RequestError{400, "\"timeout_ms\" must be between 1 and " + std::to_string(kMaxTimeoutMs)};
    req.timeout_ms = static_cast<int>(v);
  }
  return req;
}

CompileResponse handle_compile(const CompileRequest& request, const dsl::Loader& loader) {
  const auto start = std::chrono::steady_clock::now();
  dsl::EvalOptions eo;
  eo.overrides = request.overrides;
  eo.deadline = start + std::chrono::milliseconds(request.timeout_ms);
  dsl::Compilation c = dsl::compile(request.source, "playground.mpg", loader, eo);

  CompileResponse r;
  for (const auto& d : c.diagnostics) {
    DiagnosticView v;
    v.severity = d.severity == dsl::Severity::Error ? "error" : "warning";
    v.message = d.message;
    v.file = d.span.file < c.program.files.size() ? c.program.files[d.span.file] : "playground.mpg";
    v.line = d.span.line;
    v.column = d.span.column;
    v.length = d.span.length;
    r.diagnostics.push_back(std::move(v));
  }
  if (c.ok()) {
    const auto& g = c.glyph;
    font::SvgFrame frame = font::SvgFrame::around(g.outline);
    if (request.debug) {
      font::DebugOverlay overlay;
      overlay.guides = g.strokes;
      for (const auto& [name, path] : g.paths) overlay.guides.push_back(path.contour);
      overlay.points = g.points;
      r.svg = font::svg_document(g.outline, frame, &overlay);
    } else {
      r.svg = font::svg_document(g.outline, frame);
    }
    r.parameters = g.parameters;
  } else {
    r.status = 422;
  }
  r.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_json(const CompileResponse& r) {
  json j;
  j["svg"] = r.svg ? json(*r.svg) : json(nullptr);
  j["diagnostics"] = json::array();
  for (const auto& d : r.diagnostics)
    j["diagnostics"].push_back({{"severity", d.severity},
                                {"message", d.message},
                                {"file", d.file},
                                {"line", d.line},
                                {"column", d.column},
                                {"length", d.length}});
  j["elapsed_ms"] = r.elapsed_ms;
  j["parameters"] = json::array();
  for (const auto& [k, v] : r.parameters) j["parameters"].push_back({{"name", k}, {"value", v}});
  return j.dump();
}

std::string error_json(const RequestError& e) { return json{{"error", e.message}}.dump(); }

struct Server::Impl {
  ServiceOptions options;
  httplib::Server http;
  int bound_port = -1;
};

Server::Server(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  if (impl_->options.version.empty()) impl_->options.version = version_string();
  auto& http = impl_->http;
  const std::size_t max_bytes = impl_->options.max_request_bytes;
  // Reject oversize bodies before reading them; a little slack for the JSON wrapper.
  http.set_payload_max_length(max_bytes + 64 * 1024);

  http.Post("/api/compile", [max_bytes](const httplib::Request& req, httplib::Response& res) {
    std::variant<CompileRequest, RequestError> parsed;
    const std::string type = req.get_header_value("Content-Type");
    if (type.rfind("text/plain", 0) == 0) {
      if (req.body.size() > max_bytes) parsed = RequestError{413, "source exceeds size limit"};
      else parsed = CompileRequest{req.body, {}, false, kDefaultTimeoutMs};
    } else {
      parsed = parse_request(req.body, max_bytes);
    }
    if (auto* e = std::get_if<RequestError>(&parsed)) {
      res.status = e->status;
      res.set_content(error_json(*e), "application/json");
      return;
    }
    CompileResponse r = handle_compile(std::get<CompileRequest>(parsed));
    res.status = r.status;
    const std::string accept = req.get_header_value("Accept");
    if (accept.find("image/svg+xml") != std::string::npos && accept.find("application/json") == std::string::npos) {
      if (r.svg) {
        res.set_content(*r.svg, "image/svg+xml");
      } else {
        std::string text;
        for (const auto& d : r.diagnostics)
          text += d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.severity + ": " +
                  d.message + "\n";
        res.set_content(text, "text/plain");
      }
      return;
    }
    res.set_content(to_json(r), "application/json");
  });

  http.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"status", "ok"}, {"version", impl_->options.version}}.dump(), "application/json");
  });

  if (impl_->options.static_dir) {
    http.set_mount_point("/", impl_->options.static_dir->string());
  } else {
    http.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<!doctype html><title>metaglyph</title><p>No static directory configured.</p>\n",
                      "text/html");
    });
  }

  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(json{{"error", what}}.dump(), "application/json");
  });
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 413 && res.body.empty())
      res.set_content(error_json({413, "request body too large"}), "application/json");
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& o = impl_->options;
  if (o.port == 0) impl_->bound_port = impl_->http.bind_to_any_port(o.host);
  else impl_->bound_port = impl_->http.bind_to_port(o.host, o.port) ? o.port : -1;
  return impl_->bound_port;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace metaglyph::service
