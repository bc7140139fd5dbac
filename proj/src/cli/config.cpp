#include "sunset/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sunset::cli {

namespace {

std::string env_name(const std::string& key) {
    std::string out = "SUNSET_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

KeySpec spec(std::string key, std::string value, std::string help, std::string env = {}) {
    if (env.empty()) env = env_name(key);
    return {std::move(key), std::move(value), std::move(env), std::move(help)};
}

std::string unquote(std::string v) {
    const auto b = v.find_first_not_of(" \t");
    const auto e = v.find_last_not_of(" \t");
    v = b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
    return v;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
    fail(ErrorCode::InvalidArgument, key + ": expected " + want + ", got '" + value + "'");
}

}  // namespace

const std::vector<KeySpec>& config_keys() {
    static const std::vector<KeySpec> keys{
        spec("llm.base_url", "https://api.openai.com", "OpenAI-compatible endpoint", "SUNSET_BASE_URL"),
        spec("llm.api_key", "", "bearer token", "SUNSET_API_KEY"),
        spec("llm.model", "gpt-4o-mini", "chat model"),
        spec("llm.embedding_model", "text-embedding-3-small", "embedding model"),
        spec("llm.max_concurrency", "4", "requests in flight"),
        spec("llm.max_attempts", "5", "HTTP attempts per request"),
        spec("llm.backoff_ms", "500", "first retry delay"),
        spec("llm.backoff_cap_ms", "30000", "retry delay cap"),
        spec("llm.timeout_s", "300", "per-request timeout"),
        spec("llm.prompt_cost_per_1k", "0", "USD per 1k prompt tokens"),
        spec("llm.completion_cost_per_1k", "0", "USD per 1k completion tokens"),
        spec("generate.documents", "20", "documents to generate"),
        spec("generate.seed", "0", "run seed"),
        spec("generate.workers", "1", "documents generated side by side"),
        spec("generate.sections", "6", "sections per document"),
        spec("generate.queries", "5", "queries per document"),
        spec("generate.min_evidence", "5", "evidence passages per summary, lower bound"),
        spec("generate.max_evidence", "10", "evidence passages per summary, upper bound"),
        spec("generate.parse_attempts", "5", "re-samples of an unparseable reply"),
        spec("generate.temperature", "1.0", "sampling temperature"),
        spec("generate.title_temperature", "1.2", "temperature of the title stage"),
        spec("export.seed", "0", "section shuffle / holdout seed"),
        spec("infer.window_tokens", "128000", "model context window"),
        spec("infer.chars_per_token", "4", "token estimate ratio"),
        spec("infer.margin", "0.1", "window fraction kept free"),
        spec("infer.max_attempts", "5", "re-samples of a misformatted reply"),
        spec("infer.temperature", "1.0", "sampling temperature"),
        spec("infer.top_p", "0.9", "nucleus sampling"),
        spec("infer.max_tokens", "2000", "reply length cap"),
        spec("eval.overlap_threshold", "0.5", "LCS overlap counted as a copy"),
        spec("eval.bins", "10", "position histogram bins"),
        spec("eval.resamples", "10000", "bootstrap resamples"),
        spec("eval.seed", "0", "bootstrap seed"),
        spec("rater.model", "", "rater model (empty: llm.model)"),
        spec("rater.temperature", "0", "rater temperature"),
        spec("rater.max_tokens", "16", "rater reply cap"),
        spec("diversity.k", "20", "LDA topics"),
        spec("diversity.top_n", "25", "top words per topic"),
        spec("diversity.iterations", "500", "Gibbs sweeps"),
        spec("diversity.alpha", "", "document-topic prior (empty: 50/k)"),
        spec("diversity.beta", "0.01", "topic-word prior"),
        spec("diversity.seed", "0", "sampler seed"),
        spec("diversity.min_df", "2", "minimum document frequency"),
    };
    return keys;
}

Config::Config() {
    for (const auto& k : config_keys()) values_[k.key] = k.default_value;
}

void Config::set(const std::string& key, std::string value) {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    it->second = std::move(value);
}

void Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config file " + path.string());
    // '#' comments are accepted alongside ';'
    std::stringstream filtered;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t");
        if (b != std::string::npos && line[b] == '#') line.clear();
        filtered << line << '\n';
    }
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(filtered, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorCode::InvalidArgument, path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) fail(ErrorCode::InvalidArgument, path.string() + ": key '" + section + "' outside a section");
        for (const auto& [name, value] : body) set(section + "." + name, unquote(value.data()));
    }
}

void Config::apply_env() {
    for (const auto& k : config_keys()) {
        if (const char* v = std::getenv(k.env.c_str())) values_[k.key] = v;
    }
}

const std::string& Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    return it->second;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const auto& v = get(key);
    std::uint64_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
    return out;
}

std::size_t Config::get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }

int Config::get_int(const std::string& key) const {
    const auto& v = get(key);
    int out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "an integer");
    return out;
}

double Config::get_double(const std::string& key) const {
    const auto& v = get(key);
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used == v.size()) return out;
    } catch (const std::exception&) {
    }
    bad_value(key, v, "a number");
}

nlohmann::ordered_json Config::snapshot() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : config_keys()) {
        const auto& v = values_.at(k.key);
        j[k.key] = (k.key == "llm.api_key" && !v.empty()) ? std::string("<redacted>") : v;
    }
    return j;
}

}  // namespace sunset::cli
