#include "sunset/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

namespace sunset::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            fail(ErrorCode::Io, "SHA-256 unavailable");
        }
    }
    void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 0xF];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

ordered_json digests_json(const std::vector<FileDigest>& files) {
    ordered_json a = ordered_json::array();
    for (const auto& f : files) a.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return a;
}

std::vector<FileDigest> digests_from(const json& a) {
    std::vector<FileDigest> out;
    for (const auto& f : a) {
        out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                       f.at("bytes").get<std::uintmax_t>()});
    }
    return out;
}

FileDigest digest_of(const fs::path& file, std::string label) {
    return {std::move(label), sha256_file(file), fs::file_size(file)};
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data.data(), data.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

ordered_json to_json(const RunManifest& m) {
    ordered_json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["config"] = m.config;
    j["seed"] = m.seed ? ordered_json(*m.seed) : ordered_json();
    j["tool_version"] = m.tool_version;
    j["status"] = m.status;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["inputs"] = digests_json(m.inputs);
    j["outputs"] = digests_json(m.outputs);
    j["usage"] = {{"prompt_tokens", m.prompt_tokens},
                  {"completion_tokens", m.completion_tokens},
                  {"calls", m.llm_calls},
                  {"cost", m.cost}};
    return j;
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.config = j.at("config");
        if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.status = j.at("status").get<std::string>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        m.inputs = digests_from(j.at("inputs"));
        m.outputs = digests_from(j.at("outputs"));
        const auto& u = j.at("usage");
        m.prompt_tokens = u.at("prompt_tokens").get<std::uint64_t>();
        m.completion_tokens = u.at("completion_tokens").get<std::uint64_t>();
        m.llm_calls = u.at("calls").get<std::uint64_t>();
        m.cost = u.at("cost").get<double>();
        return m;
    } catch (const json::exception& e) {
        fail(ErrorCode::SchemaError, std::string("manifest: ") + e.what());
    }
}

std::vector<FileDigest> digest_inputs(const fs::path& path) {
    if (!fs::exists(path)) fail(ErrorCode::Io, "no such input " + path.string());
    if (!fs::is_directory(path)) return {digest_of(path, path.generic_string())};
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(path)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<FileDigest> out;
    for (const auto& f : files) out.push_back(digest_of(f, f.generic_string()));
    return out;
}

fs::path manifest_path_for(const fs::path& output, bool is_directory) {
    if (is_directory) return output / kManifestFile;
    return fs::path(output.string() + std::string(kManifestSuffix));
}

void write_manifest(RunManifest manifest, const std::vector<fs::path>& outputs, const fs::path& manifest_path) {
    const fs::path base = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
    manifest.outputs.clear();
    for (const auto& f : outputs) {
        manifest.outputs.push_back(digest_of(f, fs::relative(f, base).generic_string()));
    }
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + manifest_path.string());
    out << to_json(manifest).dump(2) << '\n';
}

VerifyResult verify_manifest(const fs::path& path) {
    fs::path manifest = path;
    if (fs::is_directory(path)) {
        manifest = path / kManifestFile;
    } else if (!path.string().ends_with(kManifestSuffix)) {
        manifest = manifest_path_for(path, false);
    }
    std::ifstream in(manifest);
    if (!in) fail(ErrorCode::Io, "no manifest at " + manifest.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::SchemaError, manifest.string() + ": " + e.what());
    }
    const auto m = manifest_from_json(j);
    const fs::path base = manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path();
    VerifyResult r;
    for (const auto& f : m.outputs) {
        const auto file = base / f.path;
        if (!fs::is_regular_file(file)) {
            r.missing.push_back(f.path);
        } else if (fs::file_size(file) != f.bytes || sha256_file(file) != f.sha256) {
            r.changed.push_back(f.path);
        }
    }
    return r;
}

}  // namespace sunset::cli
