#pragma once

// Chat-completion and embedding access over the OpenAI-compatible wire
// format. Client owns retries, the concurrency bound and token accounting;
// the Backend underneath only moves request/response bodies, so the scripted
// MockBackend exercises exactly the same client logic as HttpBackend.

#include "sunset/embedder.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sunset::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;

struct Message {
    Role role = Role::User;
    std::string content;
};

inline constexpr double kDefaultTemperature = 1.0;
inline constexpr double kDefaultTopP = 0.9;
inline constexpr int kDefaultMaxTokens = 2000;

struct ChatRequest {
    std::string model;
    std::vector<Message> messages;
    double temperature = kDefaultTemperature;
    double top_p = kDefaultTopP;
    int max_tokens = kDefaultMaxTokens;

    /// Single user-turn request.
    static ChatRequest user(std::string prompt, double temperature = kDefaultTemperature);

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;
    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct ChatResponse {
    std::string content;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::milliseconds backoff_cap{30'000};
    std::set<int> retryable_statuses{429, 500, 502, 503};

    void validate() const;
    /// Delay before the attempt following `attempt` (1-based), before jitter.
    [[nodiscard]] std::chrono::milliseconds backoff(int attempt) const;
};

/// One HTTP exchange. status 0 means the request never got a response.
struct HttpResult {
    int status = 0;
    std::string body;
    std::string error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual HttpResult post(std::string_view path, const std::string& body) = 0;
};

struct HttpSettings {
    std::string base_url = "https://api.openai.com";
    std::string api_key;
    std::chrono::seconds timeout{300};
};

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpSettings settings);
    ~HttpBackend() override;

    HttpResult post(std::string_view path, const std::string& body) override;

    /// Full request path for an API route, honouring a base URL that already
    /// ends in /v1.
    [[nodiscard]] std::string route(std::string_view api_path) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Replays a scripted queue of replies, one per request, in order.
///
/// Script entries (JSON objects, one per line in fixture files):
///   {"content": "..."}                 chat completion reply
///   {"embeddings": [[...], ...]}       embeddings reply
///   {"status": 429, "body": "..."}     HTTP error
///   {"raw": "..."}                     verbatim 200 body
/// Optional "prompt_tokens"/"completion_tokens" override the usage numbers,
/// which otherwise are ceil(chars / 4) of the request and reply text.
class MockBackend final : public Backend {
public:
    MockBackend() = default;
    explicit MockBackend(std::vector<nlohmann::json> script);
    static std::unique_ptr<MockBackend> from_file(const std::filesystem::path& path);

    void push(nlohmann::json entry);
    HttpResult post(std::string_view path, const std::string& body) override;

    /// Drop the next n entries (resuming a run that already consumed them).
    void skip(std::size_t n);

    struct Recorded {
        std::string path;
        std::string body;
    };
    [[nodiscard]] std::vector<Recorded> requests() const;
    [[nodiscard]] std::size_t remaining() const;
    [[nodiscard]] std::size_t consumed() const;

private:
    mutable std::mutex mutex_;
    std::deque<nlohmann::json> script_;
    std::vector<Recorded> requests_;
    std::size_t consumed_ = 0;
};

struct UsageTotals {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t calls = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return prompt_tokens + completion_tokens; }
};

/// Run-level token accounting. Monotone; safe to share across threads.
class TokenLedger {
public:
    void add(std::uint64_t prompt_tokens, std::uint64_t completion_tokens) noexcept;
    [[nodiscard]] UsageTotals totals() const noexcept;

private:
    std::atomic<std::uint64_t> prompt_{0};
    std::atomic<std::uint64_t> completion_{0};
    std::atomic<std::uint64_t> calls_{0};
};

struct ClientConfig {
    std::string chat_model = "gpt-4o-mini";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t max_concurrency = 4;
    std::size_t embedding_batch = 256;
    RetryPolicy retry;
    double prompt_cost_per_1k = 0.0;
    double completion_cost_per_1k = 0.0;
};

class Client {
public:
    Client(std::unique_ptr<Backend> backend, ClientConfig config = {});

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    /// First successful reply. A request without a model uses the configured
    /// chat model. Throws ExhaustedRetries, MalformedResponse, AuthError,
    /// RequestRejected.
    ChatResponse complete(const ChatRequest& request, const RetryPolicy& policy);
    ChatResponse complete(const ChatRequest& request) { return complete(request, config_.retry); }

    /// Unit-normalized embeddings, one per text, all of the same dimension.
    std::vector<Embedding> embed(const std::vector<std::string>& texts);

    /// Adapter for code that only needs an Embedder.
    [[nodiscard]] Embedder embedder();

    [[nodiscard]] const TokenLedger& ledger() const noexcept { return ledger_; }
    [[nodiscard]] double cost() const noexcept;
    /// HTTP attempts issued so far, including failed ones.
    [[nodiscard]] std::uint64_t attempts() const noexcept { return attempts_.load(); }
    [[nodiscard]] const ClientConfig& config() const noexcept { return config_; }
    [[nodiscard]] Backend& backend() noexcept { return *backend_; }

private:
    /// POST with retries; returns the body of the first 200 reply.
    std::string post_with_retry(std::string_view path, const std::string& body, const RetryPolicy& policy);

    class Gate {
    public:
        explicit Gate(std::size_t slots) : free_(slots == 0 ? 1 : slots) {}
        void acquire();
        void release();

    private:
        std::mutex mutex_;
        std::condition_variable cv_;
        std::size_t free_;
    };

    std::unique_ptr<Backend> backend_;
    ClientConfig config_;
    TokenLedger ledger_;
    Gate gate_;
    std::atomic<std::uint64_t> attempts_{0};
};

/// ceil(chars / 4), the usage estimate the mock reports.
std::uint64_t estimate_tokens(std::string_view text) noexcept;

}  // namespace sunset::llm
