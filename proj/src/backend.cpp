#include "protctx/backend.hpp"

#include "protctx/hash.hpp"
#include "text_util.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <semaphore>
#include <sstream>
#include <thread>

namespace protctx {

using nlohmann::json;

void BackendConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("backend temperature must be >= 0");
  if (max_output_tokens <= 0) throw ConfigError("backend max_output_tokens must be positive");
  if (max_retries < 0) throw ConfigError("backend max_retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("backend max_in_flight must be >= 1");
  if (request_timeout_s <= 0.0) throw ConfigError("backend request_timeout must be positive");
  if (kind == BackendKind::Http) {
    if (!endpoint_url || endpoint_url->empty()) {
      throw ConfigError("http backend requires endpoint_url");
    }
    if (!model_name || model_name->empty()) throw ConfigError("http backend requires model_name");
    if (api_key_env_var.empty()) throw ConfigError("http backend requires api_key_env_var");
  }
}

std::string BackendConfig::id() const {
  if (kind == BackendKind::Mock) return "mock";
  return "http:" + model_name.value_or("") + "@" + endpoint_url.value_or("") +
         ";t=" + std::to_string(temperature) + ";max=" + std::to_string(max_output_tokens);
}

std::string prompt_digest(std::string_view prompt_text) { return fnv1a64_hex(prompt_text); }

MockBackend::MockBackend(std::map<std::string, std::string> fixtures, MockMissPolicy miss,
                         std::string id)
    : fixtures_(std::move(fixtures)), miss_(miss), id_(std::move(id)) {}

void MockBackend::add(std::string digest, std::string response) {
  fixtures_.insert_or_assign(std::move(digest), std::move(response));
}

std::string MockBackend::placeholder(std::string_view digest) {
  return "[mock response " + std::string(digest) + "]";
}

Exchange MockBackend::complete(const PromptText& prompt) {
  Exchange ex;
  ex.prompt_digest = prompt_digest(prompt.text);
  ex.backend_id = id_;
  auto it = fixtures_.find(ex.prompt_digest);
  if (it != fixtures_.end()) {
    ex.response_text = it->second;
  } else if (miss_ == MockMissPolicy::Echo) {
    ex.response_text = placeholder(ex.prompt_digest);
  } else {
    throw CompletionError("mock backend has no fixture for prompt " + ex.prompt_digest);
  }
  return ex;
}

std::map<std::string, std::string> parse_mock_fixtures(std::string_view text,
                                                       const std::string& source) {
  std::map<std::string, std::string> out;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i])) continue;
    auto j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(source, ln, "malformed JSON object");
    auto d = j.find("digest");
    auto r = j.find("response");
    if (d == j.end() || !d->is_string() || r == j.end() || !r->is_string()) {
      throw ParseError(source, ln, "expected string fields \"digest\" and \"response\"");
    }
    out.insert_or_assign(d->get<std::string>(), r->get<std::string>());
  }
  return out;
}

struct HttpBackend::Limiter {
  explicit Limiter(int n) : slots(n) {}
  std::counting_semaphore<4096> slots;
};

HttpBackend::HttpBackend(BackendConfig config)
    : config_(std::move(config)),
      limiter_(std::make_unique<Limiter>(std::min(config_.max_in_flight, 4096))) {
  config_.validate();
  if (config_.kind != BackendKind::Http) throw ConfigError("HttpBackend needs kind=http");
}

HttpBackend::~HttpBackend() = default;

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("invalid endpoint_url: " + url);
  ParsedUrl p;
  p.origin = m[1].str() + "://" + m[2].str() + m[3].str();
  p.path = m[4].matched ? m[4].str() : "/";
  return p;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

Exchange HttpBackend::complete(const PromptText& prompt) {
  const char* key = std::getenv(config_.api_key_env_var.c_str());
  if (!key || !*key) {
    throw CredentialError("credential environment variable " + config_.api_key_env_var +
                          " is not set");
  }
  const ParsedUrl url = parse_url(*config_.endpoint_url);

  json body;
  body["model"] = *config_.model_name;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt.text}}});
  body["temperature"] = config_.temperature;
  body["max_tokens"] = config_.max_output_tokens;
  const std::string payload = body.dump();

  Exchange ex;
  ex.prompt_digest = prompt_digest(prompt.text);
  ex.backend_id = id();

  limiter_->slots.acquire();
  struct Release {
    Limiter& l;
    ~Release() { l.slots.release(); }
  } release{*limiter_};

  const auto started = std::chrono::steady_clock::now();
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config_.retry_backoff_s * std::pow(2.0, attempt - 1);
      spdlog::warn("completion attempt {} failed ({}); retrying in {:.2f}s", attempt, last_error,
                   delay);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client client(url.origin);
    const auto timeout = std::chrono::duration<double>(config_.request_timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};

    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw CompletionError("HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    auto reply = json::parse(res->body, nullptr, false);
    std::string text;
    try {
      text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw CompletionError("unexpected chat-completion response shape");
    }
    if (text.empty()) throw CompletionError("empty completion");
    ex.response_text = std::move(text);
    ex.latency_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return ex;
  }
  throw CompletionError("completion failed after " + std::to_string(config_.max_retries + 1) +
                        " attempt(s): " + last_error);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::Http) return std::make_unique<HttpBackend>(config);
  std::map<std::string, std::string> fixtures;
  if (config.mock_fixture_path) {
    std::ifstream in(*config.mock_fixture_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read mock fixtures: " + *config.mock_fixture_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    fixtures = parse_mock_fixtures(buf.str(), *config.mock_fixture_path);
  }
  return std::make_unique<MockBackend>(std::move(fixtures), config.mock_miss);
}

std::string complete(const PromptText& prompt, const BackendConfig& config) {
  return make_backend(config)->complete(prompt).response_text;
}

}  // namespace protctx
