#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "metaglyph/dsl/ast.hpp"
#include "metaglyph/dsl/includes.hpp"

namespace metaglyph::service {

inline constexpr std::size_t kDefaultMaxRequestBytes = 256 * 1024;
inline constexpr int kMaxTimeoutMs = 5000;
inline constexpr int kDefaultTimeoutMs = 2000;

struct CompileRequest {
  std::string source;
  std::map<std::string, double> overrides;
  bool debug = false;
  int timeout_ms = kDefaultTimeoutMs;
};

struct DiagnosticView {
  std::string severity;  // "error" | "warning"
  std::string message;
  std::string file;
  std::uint32_t line = 0, column = 0, length = 0;
};

struct CompileResponse {
  int status = 200;  // 200 or 422
  std::optional<std::string> svg;
  std::vector<DiagnosticView> diagnostics;
  std::int64_t elapsed_ms = 0;
  /// Top-level parameters in assignment order, for slider generation.
  std::vector<std::pair<std::string, double>> parameters;
};

/// A malformed request. `status` is 400 or 413.
struct RequestError {
  int status;
  std::string message;
};

/// Parses a JSON request body. Returns RequestError for bodies the service
/// refuses outright.
std::variant<CompileRequest, RequestError> parse_request(const std::string& body,
                                                         std::size_t max_bytes = kDefaultMaxRequestBytes);

/// One isolated compile. Sources may `input plain_ex` and nothing else
/// unless `loader` says otherwise.
CompileResponse handle_compile(const CompileRequest& request, const dsl::Loader& loader = dsl::prelude_loader());

std::string to_json(const CompileResponse& response);
std::string error_json(const RequestError& error);

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::size_t max_request_bytes = kDefaultMaxRequestBytes;
  std::string version;
};

/// The HTTP front end: POST /api/compile, GET /api/health, static files at /.
class Server {
 public:
  explicit Server(ServiceOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds; returns the bound port (useful with port 0) or -1.
  int bind();
  /// Serves until stop(). Call bind() first.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string version_string();

}  // namespace metaglyph::service
