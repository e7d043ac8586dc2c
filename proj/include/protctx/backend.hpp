#pragma once

#include "protctx/contextbuild.hpp"
#include "protctx/error.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace protctx {

enum class BackendKind { Mock, Http };
enum class MockMissPolicy { Error, Echo };

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::optional<std::string> endpoint_url;  // full chat-completions URL
  std::optional<std::string> model_name;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::string api_key_env_var = "LLM_API_KEY";
  double request_timeout_s = 60.0;
  int max_retries = 3;
  double retry_backoff_s = 1.0;  // first retry delay; doubles each attempt
  int max_in_flight = 4;
  std::optional<std::string> mock_fixture_path;
  MockMissPolicy mock_miss = MockMissPolicy::Echo;

  /// Throws ConfigError when the configuration is unusable.
  void validate() const;
  /// Stable identifier recorded with exchanges and used in cache keys.
  std::string id() const;
};

/// One completed request.
struct Exchange {
  std::string prompt_digest;
  std::string response_text;
  std::string backend_id;
  double latency_s = 0.0;
  bool cache_hit = false;
};

class CompletionError : public Error {
 public:
  using Error::Error;
};

class CredentialError : public CompletionError {
 public:
  using CompletionError::CompletionError;
};

/// fnv1a64 hex digest of the prompt text; the key of mock fixtures.
std::string prompt_digest(std::string_view prompt_text);

class Backend {
 public:
  virtual ~Backend() = default;
  /// Must be safe to call from several threads at once.
  virtual Exchange complete(const PromptText& prompt) = 0;
  virtual std::string id() const = 0;
};

/// Canned responses keyed by prompt digest.
class MockBackend final : public Backend {
 public:
  explicit MockBackend(std::map<std::string, std::string> fixtures = {},
                       MockMissPolicy miss = MockMissPolicy::Echo, std::string id = "mock");

  void add(std::string digest, std::string response);
  Exchange complete(const PromptText& prompt) override;
  std::string id() const override { return id_; }

  /// Deterministic reply for fixture misses under MockMissPolicy::Echo.
  static std::string placeholder(std::string_view digest);

 private:
  std::map<std::string, std::string> fixtures_;
  MockMissPolicy miss_;
  std::string id_;
};

/// JSON-lines of {"digest": ..., "response": ...}.
std::map<std::string, std::string> parse_mock_fixtures(std::string_view text,
                                                       const std::string& source = "<fixtures>");

/// OpenAI-compatible chat-completions client: a single user message,
/// bounded in-flight requests and exponential backoff on 429/5xx/transport
/// errors.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);
  ~HttpBackend() override;

  Exchange complete(const PromptText& prompt) override;
  std::string id() const override { return config_.id(); }

 private:
  struct Limiter;
  BackendConfig config_;
  std::unique_ptr<Limiter> limiter_;
};

/// Builds the backend described by `config`, loading mock fixtures if a
/// fixture path is set.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

/// One-shot helper: make_backend(config)->complete(prompt).response_text.
std::string complete(const PromptText& prompt, const BackendConfig& config);

}  // namespace protctx
