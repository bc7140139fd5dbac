#include "sunset/llm_client.hpp"

#include "sunset/error.hpp"

#include <fstream>

namespace sunset::llm {

using nlohmann::json;
using nlohmann::ordered_json;

MockBackend::MockBackend(std::vector<json> script) : script_(script.begin(), script.end()) {}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open mock script " + path.string());
    auto mock = std::make_unique<MockBackend>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            mock->push(json::parse(line));
        } catch (const json::exception& e) {
            fail(ErrorCode::SchemaError,
                 path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return mock;
}

void MockBackend::push(json entry) {
    std::lock_guard lock(mutex_);
    script_.push_back(std::move(entry));
}

void MockBackend::skip(std::size_t n) {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < n && !script_.empty(); ++i) {
        script_.pop_front();
        ++consumed_;
    }
}

std::vector<MockBackend::Recorded> MockBackend::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t MockBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return script_.size();
}

std::size_t MockBackend::consumed() const {
    std::lock_guard lock(mutex_);
    return consumed_;
}

namespace {

std::uint64_t request_tokens(const std::string& body) {
    const json request = json::parse(body, nullptr, false);
    if (request.is_discarded()) return 0;
    std::uint64_t tokens = 0;
    if (const auto m = request.find("messages"); m != request.end() && m->is_array()) {
        for (const auto& msg : *m) tokens += estimate_tokens(msg.value("content", std::string{}));
    }
    if (const auto in = request.find("input"); in != request.end() && in->is_array()) {
        for (const auto& t : *in) {
            if (t.is_string()) tokens += estimate_tokens(t.get<std::string>());
        }
    }
    return tokens;
}

}  // namespace

HttpResult MockBackend::post(std::string_view path, const std::string& body) {
    json entry;
    {
        std::lock_guard lock(mutex_);
        requests_.push_back({std::string(path), body});
        if (script_.empty()) {
            fail(ErrorCode::MockExhausted,
                 "mock script exhausted after " + std::to_string(consumed_) + " replies");
        }
        entry = std::move(script_.front());
        script_.pop_front();
        ++consumed_;
    }

    if (const auto status = entry.find("status"); status != entry.end() && status->get<int>() != 200) {
        return {status->get<int>(), entry.value("body", std::string{}), {}};
    }
    if (const auto raw = entry.find("raw"); raw != entry.end()) {
        return {200, raw->get<std::string>(), {}};
    }

    const std::uint64_t prompt_tokens = entry.value("prompt_tokens", request_tokens(body));
    ordered_json reply;
    if (const auto vectors = entry.find("embeddings"); vectors != entry.end()) {
        reply["object"] = "list";
        reply["data"] = ordered_json::array();
        std::size_t i = 0;
        for (const auto& v : *vectors) {
            reply["data"].push_back({{"object", "embedding"}, {"index", i++}, {"embedding", v}});
        }
        reply["usage"] = {{"prompt_tokens", prompt_tokens}, {"total_tokens", prompt_tokens}};
        return {200, reply.dump(), {}};
    }
    if (const auto content = entry.find("content"); content != entry.end()) {
        const std::string text = content->get<std::string>();
        const std::uint64_t completion_tokens = entry.value("completion_tokens", estimate_tokens(text));
        reply["object"] = "chat.completion";
        reply["choices"] = ordered_json::array();
        reply["choices"].push_back({{"index", 0},
                                    {"message", {{"role", "assistant"}, {"content", text}}},
                                    {"finish_reason", "stop"}});
        reply["usage"] = {{"prompt_tokens", prompt_tokens},
                          {"completion_tokens", completion_tokens},
                          {"total_tokens", prompt_tokens + completion_tokens}};
        return {200, reply.dump(), {}};
    }
    fail(ErrorCode::SchemaError, "mock entry has none of content/embeddings/status/raw: " + entry.dump());
}

}  // namespace sunset::llm
