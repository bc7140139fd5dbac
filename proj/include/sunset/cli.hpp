#pragma once

// Command-line front end: layered configuration, run manifests and the
// subcommands generate, export, infer, eval, diversity and report.

#include "sunset/error.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sunset::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kManifestSuffix = ".manifest.json";

struct KeySpec {
    std::string key;  // "section.name"
    std::string default_value;
    std::string env;
    std::string help;
};

/// Every recognised configuration key, in documentation order.
const std::vector<KeySpec>& config_keys();

/// Flat section.key -> value map. Layers are applied in call order, so the
/// intended sequence is defaults, file(s), environment, flags.
class Config {
public:
    Config();

    /// INI-style file: "[section]" headers and "key = value" lines; values
    /// may be quoted. Unknown keys throw InvalidArgument, a missing file Io.
    void load_file(const std::filesystem::path& path);
    void apply_env();
    /// Throws InvalidArgument for an unknown key.
    void set(const std::string& key, std::string value);

    [[nodiscard]] const std::string& get(const std::string& key) const;
    [[nodiscard]] std::size_t get_size(const std::string& key) const;
    [[nodiscard]] std::uint64_t get_u64(const std::string& key) const;
    [[nodiscard]] int get_int(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key) const;

    /// All values with secrets redacted.
    [[nodiscard]] nlohmann::ordered_json snapshot() const;

private:
    std::map<std::string, std::string> values_;
};

std::string sha256_hex(std::string_view data);
/// Throws Io.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
    std::string path;
    std::string sha256;
    std::uintmax_t bytes = 0;
    friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::optional<std::uint64_t> seed;
    std::string tool_version{kVersion};
    std::string status = "complete";
    std::string started_at;
    std::string finished_at;
    std::vector<FileDigest> inputs;   // paths as given on the command line
    std::vector<FileDigest> outputs;  // paths relative to the manifest's directory
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
    std::uint64_t llm_calls = 0;
    double cost = 0.0;
};

nlohmann::ordered_json to_json(const RunManifest& m);
/// Throws SchemaError.
RunManifest manifest_from_json(const nlohmann::json& j);

/// Digests of a file, or of every regular file below a directory (sorted).
std::vector<FileDigest> digest_inputs(const std::filesystem::path& path);

/// Fills outputs from the files (relative to the manifest's directory) and
/// writes the manifest.
void write_manifest(RunManifest manifest, const std::vector<std::filesystem::path>& outputs,
                    const std::filesystem::path& manifest_path);

/// Where the manifest for an output lives: <dir>/manifest.json for a
/// directory, <file>.manifest.json for a file.
std::filesystem::path manifest_path_for(const std::filesystem::path& output, bool is_directory);

struct VerifyResult {
    std::vector<std::string> changed;
    std::vector<std::string> missing;
    [[nodiscard]] bool ok() const noexcept { return changed.empty() && missing.empty(); }
};

/// Recomputes output digests. Accepts a manifest file, a directory holding
/// manifest.json, or an output file with a sidecar manifest.
VerifyResult verify_manifest(const std::filesystem::path& path);

/// 1 for errors caused by the invocation or its inputs, 2 otherwise.
int exit_code_for(ErrorCode code) noexcept;

/// Set by the SIGINT handler; generation checkpoints and stops when it is.
std::atomic<bool>& interrupt_flag();

/// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sunset::cli
