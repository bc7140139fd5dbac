#include "httplib.h"

#include "sunset/llm_client.hpp"

#include "sunset/error.hpp"

#include <regex>

namespace sunset::llm {

struct HttpBackend::Impl {
    HttpSettings settings;
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path below the origin, no trailing slash
};

HttpBackend::HttpBackend(HttpSettings settings) : impl_(std::make_unique<Impl>()) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(settings.base_url, m, url)) {
        fail(ErrorCode::InvalidArgument, "base URL must look like http(s)://host[:port][/path]: " +
                                             settings.base_url);
    }
    impl_->origin = m[1].str();
    impl_->prefix = m[2].str();
    while (!impl_->prefix.empty() && impl_->prefix.back() == '/') impl_->prefix.pop_back();
    impl_->settings = std::move(settings);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::route(std::string_view api_path) const {
    std::string_view path = api_path;
    const std::string_view v1 = "/v1";
    if (impl_->prefix.size() >= v1.size() &&
        std::string_view(impl_->prefix).substr(impl_->prefix.size() - v1.size()) == v1 &&
        path.substr(0, v1.size()) == v1) {
        path.remove_prefix(v1.size());
    }
    return impl_->prefix + std::string(path);
}

HttpResult HttpBackend::post(std::string_view path, const std::string& body) {
    httplib::Client client(impl_->origin);
    const auto timeout = impl_->settings.timeout;
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!impl_->settings.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->settings.api_key);
    }
    auto res = client.Post(route(path), headers, body, "application/json");
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
}

}  // namespace sunset::llm
