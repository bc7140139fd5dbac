#include "sunset/llm_client.hpp"

#include "sunset/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace sunset::llm {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Role role) noexcept {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

std::uint64_t estimate_tokens(std::string_view text) noexcept {
    std::uint64_t chars = 0;
    for (unsigned char c : text) chars += (c & 0xC0) != 0x80 ? 1 : 0;
    return (chars + 3) / 4;
}

ChatRequest ChatRequest::user(std::string prompt, double temperature) {
    ChatRequest r;
    r.messages.push_back({Role::User, std::move(prompt)});
    r.temperature = temperature;
    return r;
}

void ChatRequest::validate() const {
    if (messages.empty()) fail(ErrorCode::InvalidArgument, "chat request has no messages");
    if (messages.back().role != Role::User) {
        fail(ErrorCode::InvalidArgument, "last chat message must come from the user");
    }
    if (!std::isfinite(temperature) || temperature < 0.0) {
        fail(ErrorCode::InvalidArgument, "temperature must be finite and >= 0");
    }
    if (!std::isfinite(top_p) || top_p <= 0.0 || top_p > 1.0) {
        fail(ErrorCode::InvalidArgument, "top_p must lie in (0, 1]");
    }
    if (max_tokens <= 0) fail(ErrorCode::InvalidArgument, "max_tokens must be positive");
}

ordered_json ChatRequest::to_json() const {
    ordered_json body;
    body["model"] = model;
    body["messages"] = ordered_json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    body["temperature"] = temperature;
    body["top_p"] = top_p;
    body["max_tokens"] = max_tokens;
    return body;
}

void RetryPolicy::validate() const {
    if (max_attempts < 1) fail(ErrorCode::InvalidArgument, "max_attempts must be >= 1");
    if (backoff_base > backoff_cap) fail(ErrorCode::InvalidArgument, "backoff_base exceeds backoff_cap");
}

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
    const int shift = std::clamp(attempt - 1, 0, 30);
    const auto grown = backoff_base.count() * (std::int64_t{1} << shift);
    return std::chrono::milliseconds(std::min<std::int64_t>(grown, backoff_cap.count()));
}

void TokenLedger::add(std::uint64_t prompt_tokens, std::uint64_t completion_tokens) noexcept {
    prompt_.fetch_add(prompt_tokens, std::memory_order_relaxed);
    completion_.fetch_add(completion_tokens, std::memory_order_relaxed);
    calls_.fetch_add(1, std::memory_order_relaxed);
}

UsageTotals TokenLedger::totals() const noexcept {
    return {prompt_.load(), completion_.load(), calls_.load()};
}

void Client::Gate::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return free_ > 0; });
    --free_;
}

void Client::Gate::release() {
    {
        std::lock_guard lock(mutex_);
        ++free_;
    }
    cv_.notify_one();
}

Client::Client(std::unique_ptr<Backend> backend, ClientConfig config)
    : backend_(std::move(backend)), config_(std::move(config)), gate_(config_.max_concurrency) {
    if (!backend_) fail(ErrorCode::InvalidArgument, "client needs a backend");
    config_.retry.validate();
}

double Client::cost() const noexcept {
    const auto t = ledger_.totals();
    return static_cast<double>(t.prompt_tokens) / 1000.0 * config_.prompt_cost_per_1k +
           static_cast<double>(t.completion_tokens) / 1000.0 * config_.completion_cost_per_1k;
}

std::string Client::post_with_retry(std::string_view path, const std::string& body,
                                    const RetryPolicy& policy) {
    policy.validate();
    thread_local std::mt19937_64 jitter(std::random_device{}());

    gate_.acquire();
    struct Release {
        Gate& g;
        ~Release() { g.release(); }
    } release{gate_};

    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        attempts_.fetch_add(1, std::memory_order_relaxed);
        HttpResult res = backend_->post(path, body);
        if (res.status == 200) return std::move(res.body);
        if (res.status == 401 || res.status == 403) {
            fail(ErrorCode::AuthError, "credential rejected (HTTP " + std::to_string(res.status) + ")");
        }
        const bool retryable = res.status == 0 || policy.retryable_statuses.contains(res.status);
        last_error = res.status == 0 ? "transport error: " + res.error
                                     : "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200);
        if (!retryable) fail(ErrorCode::RequestRejected, last_error);
        if (attempt < policy.max_attempts) {
            const auto delay = policy.backoff(attempt);
            if (delay.count() > 0) {
                std::uniform_int_distribution<std::int64_t> pick(delay.count() / 2, delay.count());
                std::this_thread::sleep_for(std::chrono::milliseconds(pick(jitter)));
            }
        }
    }
    fail(ErrorCode::ExhaustedRetries,
         "gave up after " + std::to_string(policy.max_attempts) + " attempts; last: " + last_error);
}

ChatResponse Client::complete(const ChatRequest& request, const RetryPolicy& policy) {
    request.validate();
    ChatRequest effective = request;
    if (effective.model.empty()) effective.model = config_.chat_model;

    const std::string body = post_with_retry("/v1/chat/completions", effective.to_json().dump(), policy);

    ChatResponse out;
    try {
        const json reply = json::parse(body);
        const json& message = reply.at("choices").at(0).at("message");
        const json& content = message.at("content");
        if (!content.is_string()) throw std::runtime_error("content is not a string");
        out.content = content.get<std::string>();
        if (const auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
            out.prompt_tokens = usage->value("prompt_tokens", std::uint64_t{0});
            out.completion_tokens = usage->value("completion_tokens", std::uint64_t{0});
        }
    } catch (const std::exception& e) {
        fail(ErrorCode::MalformedResponse, std::string("chat completion body: ") + e.what());
    }
    ledger_.add(out.prompt_tokens, out.completion_tokens);
    return out;
}

std::vector<Embedding> Client::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) fail(ErrorCode::InvalidArgument, "embed: no texts");
    for (const auto& t : texts) {
        if (t.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
            fail(ErrorCode::InvalidArgument, "embed: blank text");
        }
    }

    std::vector<Embedding> out;
    out.reserve(texts.size());
    const std::size_t batch = std::max<std::size_t>(1, config_.embedding_batch);
    for (std::size_t begin = 0; begin < texts.size(); begin += batch) {
        const std::size_t end = std::min(texts.size(), begin + batch);
        ordered_json request;
        request["model"] = config_.embedding_model;
        request["input"] = ordered_json::array();
        for (std::size_t i = begin; i < end; ++i) request["input"].push_back(texts[i]);

        const std::string body = post_with_retry("/v1/embeddings", request.dump(), config_.retry);
        std::vector<Embedding> chunk(end - begin);
        std::uint64_t prompt_tokens = 0;
        try {
            const json reply = json::parse(body);
            const json& data = reply.at("data");
            if (data.size() != chunk.size()) {
                fail(ErrorCode::DimensionMismatch, "embeddings reply has " + std::to_string(data.size()) +
                                                       " vectors for " + std::to_string(chunk.size()) + " inputs");
            }
            for (std::size_t i = 0; i < data.size(); ++i) {
                const std::size_t slot = data[i].value("index", i);
                if (slot >= chunk.size()) throw std::runtime_error("embedding index out of range");
                chunk[slot] = data[i].at("embedding").get<Embedding>();
            }
            if (const auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
                prompt_tokens = usage->value("prompt_tokens", std::uint64_t{0});
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            fail(ErrorCode::MalformedResponse, std::string("embeddings body: ") + e.what());
        }
        ledger_.add(prompt_tokens, 0);
        for (auto& v : chunk) out.push_back(std::move(v));
    }

    const std::size_t dim = out.front().size();
    for (auto& v : out) {
        if (v.size() != dim || dim == 0) {
            fail(ErrorCode::DimensionMismatch, "embedding dimensions differ within one call");
        }
        double sq = 0.0;
        for (double x : v) sq += x * x;
        if (!(sq > 0.0) || !std::isfinite(sq)) fail(ErrorCode::MalformedResponse, "zero or non-finite embedding");
        const double norm = std::sqrt(sq);
        for (double& x : v) x /= norm;
    }
    return out;
}

Embedder Client::embedder() {
    return [this](const std::vector<std::string>& texts) { return embed(texts); };
}

}  // namespace sunset::llm
