#include "sunset/cli.hpp"

#include "sunset/corpus.hpp"
#include "sunset/diversity.hpp"
#include "sunset/evaluate.hpp"
#include "sunset/genpipe.hpp"
#include "sunset/llm_client.hpp"
#include "sunset/summarize.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

namespace sunset::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::atomic<bool>& interrupt_flag() {
    static std::atomic<bool> flag{false};
    return flag;
}

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
    case ErrorCode::SchemaError:
    case ErrorCode::HoldoutTooLarge:
    case ErrorCode::CheckpointCorrupt:
    case ErrorCode::AuthError:
    case ErrorCode::TooFewTexts:
    case ErrorCode::CorpusTooSmall:
        return 1;
    default:
        return 2;
    }
}

namespace {

/// Configuration sources collected while parsing one subcommand.
struct Layers {
    std::vector<std::string> files;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string>> flags;  // in command-line order
};

void bind(CLI::App* sub, Layers& layers, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
           flag, [&layers, key](const std::string& v) { layers.flags.emplace_back(key, v); }, help + " [" + key + "]")
        ->type_name("VALUE");
}

void add_config_options(CLI::App* sub, Layers& layers) {
    sub->add_option("--config", layers.files, "configuration file(s), applied in order")->type_name("FILE");
    sub->add_option("--set", layers.sets, "override any key: section.key=value")->type_name("KEY=VALUE");
}

Config resolve(const Layers& layers, const std::vector<std::string>& extra_files = {}) {
    Config c;
    for (const auto& f : layers.files) c.load_file(f);
    for (const auto& f : extra_files) c.load_file(f);
    c.apply_env();
    for (const auto& s : layers.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, "--set expects key=value, got '" + s + "'");
        c.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [k, v] : layers.flags) c.set(k, v);
    return c;
}

std::unique_ptr<llm::Client> make_client(const Config& c, const std::string& mock) {
    llm::ClientConfig cc;
    cc.chat_model = c.get("llm.model");
    cc.embedding_model = c.get("llm.embedding_model");
    cc.max_concurrency = c.get_size("llm.max_concurrency");
    cc.retry.max_attempts = c.get_int("llm.max_attempts");
    cc.retry.backoff_base = std::chrono::milliseconds(c.get_u64("llm.backoff_ms"));
    cc.retry.backoff_cap = std::chrono::milliseconds(c.get_u64("llm.backoff_cap_ms"));
    cc.retry.validate();
    cc.prompt_cost_per_1k = c.get_double("llm.prompt_cost_per_1k");
    cc.completion_cost_per_1k = c.get_double("llm.completion_cost_per_1k");
    if (!mock.empty()) return std::make_unique<llm::Client>(llm::MockBackend::from_file(mock), cc);
    if (c.get("llm.api_key").empty()) {
        fail(ErrorCode::InvalidArgument, "no API key: set SUNSET_API_KEY, llm.api_key, or pass --mock");
    }
    llm::HttpSettings http;
    http.base_url = c.get("llm.base_url");
    http.api_key = c.get("llm.api_key");
    http.timeout = std::chrono::seconds(c.get_u64("llm.timeout_s"));
    return std::make_unique<llm::Client>(std::make_unique<llm::HttpBackend>(http), cc);
}

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest begin(const std::string& command, const std::vector<std::string>& args, const Config& c,
                  std::optional<std::uint64_t> seed) {
    RunManifest m;
    m.command = command;
    m.argv = args;
    m.config = c.snapshot();
    m.seed = seed;
    m.started_at = now_utc();
    return m;
}

void add_inputs(RunManifest& m, const fs::path& p) {
    auto d = digest_inputs(p);
    m.inputs.insert(m.inputs.end(), d.begin(), d.end());
}

void finish(RunManifest& m, const llm::Client* client) {
    m.finished_at = now_utc();
    if (!client) return;
    const auto u = client->ledger().totals();
    m.prompt_tokens = u.prompt_tokens;
    m.completion_tokens = u.completion_tokens;
    m.llm_calls = u.calls;
    m.cost = client->cost();
}

void make_parent(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void write_lines(const fs::path& path, const std::vector<ordered_json>& rows) {
    make_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    for (const auto& r : rows) out << corpus::to_line(r) << '\n';
}

std::vector<fs::path> files_below(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename() != kManifestFile) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- generate

struct GenerateArgs {
    Layers layers;
    std::string out = "corpus";
    std::string mock;
    bool resume = false;
    std::size_t stop_after = 0;
    bool baseline = false;
    bool diverse = false;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
    auto* sub = app.add_subcommand("generate", "generate a synthetic corpus with the six-stage pipeline");
    add_config_options(sub, a.layers);
    bind(sub, a.layers, "--docs", "generate.documents", "documents to generate");
    bind(sub, a.layers, "--seed", "generate.seed", "run seed");
    bind(sub, a.layers, "--workers", "generate.workers", "documents generated side by side");
    sub->add_option("--out", a.out, "output directory")->capture_default_str();
    sub->add_option("--mock", a.mock, "replay scripted replies from a JSON Lines file")->type_name("FILE");
    sub->add_flag("--resume", a.resume, "continue from the checkpoint in --out");
    sub->add_option("--stop-after", a.stop_after, "checkpoint and stop after N documents");
    sub->add_flag("--baseline", a.baseline, "single-prompt baseline generator instead of the pipeline");
    sub->add_flag("--diverse", a.diverse, "baseline: list earlier titles as forbidden");
}

int run_generate(const GenerateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const Config c = resolve(a.layers);
    const fs::path dir = a.out;
    auto m = begin("generate", args, c, c.get_u64("generate.seed"));
    if (!a.mock.empty()) add_inputs(m, a.mock);
    auto client = make_client(c, a.mock);

    genpipe::StageConfig stages;
    stages.sections = c.get_size("generate.sections");
    stages.queries = c.get_size("generate.queries");
    stages.min_evidence = c.get_int("generate.min_evidence");
    stages.max_evidence = c.get_int("generate.max_evidence");
    stages.parse_attempts = c.get_int("generate.parse_attempts");
    stages.temperature = c.get_double("generate.temperature");
    stages.title_temperature = c.get_double("generate.title_temperature");

    auto outputs = [&] {
        std::vector<fs::path> files;
        for (auto name : {corpus::kDocumentsFile, corpus::kTuplesFile, genpipe::kLogFile, genpipe::kCheckpointFile}) {
            if (fs::exists(dir / name)) files.push_back(dir / name);
        }
        return files;
    };
    const auto manifest = manifest_path_for(dir, true);

    if (a.baseline) {
        genpipe::EventLog log;
        corpus::Corpus result;
        result.documents =
            genpipe::generate_baseline(*client, c.get_size("generate.documents"), a.diverse, stages, log);
        corpus::save(result, dir);
        finish(m, client.get());
        write_manifest(m, outputs(), manifest);
        out << "baseline: " << result.documents.size() << " documents in " << dir.string() << '\n';
        return 0;
    }

    genpipe::PipelineConfig pc;
    pc.documents = c.get_size("generate.documents");
    pc.seed = c.get_u64("generate.seed");
    pc.workers = c.get_size("generate.workers");
    pc.stages = stages;
    pc.out_dir = dir;
    pc.resume = a.resume;
    pc.stop_after = a.stop_after;
    pc.stop = &interrupt_flag();

    genpipe::RunSummary s;
    try {
        s = genpipe::run_pipeline(*client, pc);
    } catch (const Error& e) {
        if (fs::is_directory(dir)) {
            m.status = "failed: " + std::string(to_string(e.code()));
            finish(m, client.get());
            write_manifest(m, outputs(), manifest);
        }
        throw;
    }
    if (s.interrupted) m.status = "interrupted";
    finish(m, client.get());
    write_manifest(m, outputs(), manifest);
    out << "documents " << s.documents_written << " written, " << s.documents_dropped << " dropped; tuples "
        << s.tuples_released << " released, " << s.tuples_rejected << " rejected, " << s.tuples_dropped
        << " dropped\n";
    if (s.interrupted) {
        fail(ErrorCode::Interrupted, "stopped after " + std::to_string(s.completed) + " of " +
                                         std::to_string(pc.documents) + " documents; rerun with --resume");
    }
    return 0;
}

// ---- export

struct ExportArgs {
    Layers layers;
    std::string in;
    std::string out;
    bool shuffled = false;
    std::size_t holdout = 0;
    std::string holdout_out;
    std::string eval_set;
};

void add_export(CLI::App& app, ExportArgs& a) {
    auto* sub = app.add_subcommand("export", "export training examples and evaluation sets from a corpus");
    add_config_options(sub, a.layers);
    sub->add_option("--in", a.in, "corpus directory")->required()->type_name("DIR");
    sub->add_option("--out", a.out, "training examples (JSON Lines)")->required()->type_name("FILE");
    sub->add_flag("--shuffled", a.shuffled, "shuffle section order per document");
    bind(sub, a.layers, "--seed", "export.seed", "shuffle and holdout seed");
    sub->add_option("--holdout", a.holdout, "documents held out")->capture_default_str();
    sub->add_option("--holdout-out", a.holdout_out, "held-out examples (JSON Lines)")->type_name("FILE");
    sub->add_option("--eval-set", a.eval_set, "write questions.jsonl and docs/ for the held-out (or whole) corpus")
        ->type_name("DIR");
}

int run_export(const ExportArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const Config c = resolve(a.layers);
    const std::uint64_t seed = c.get_u64("export.seed");
    if (a.holdout > 0 && a.holdout_out.empty()) fail(ErrorCode::InvalidArgument, "--holdout needs --holdout-out");
    auto m = begin("export", args, c, seed);
    add_inputs(m, a.in);
    const auto corpus = corpus::load(a.in);

    corpus::Corpus train = corpus;
    std::optional<corpus::Corpus> held;
    if (a.holdout > 0) {
        auto [t, h] = corpus::split_holdout(corpus, a.holdout, seed);
        train = std::move(t);
        held = std::move(h);
    }
    auto rows = [&](const corpus::Corpus& part) {
        std::vector<ordered_json> r;
        for (const auto& ex : corpus::export_training(part, a.shuffled, seed)) r.push_back(corpus::to_json(ex));
        return r;
    };
    std::vector<fs::path> outputs{a.out};
    const auto train_rows = rows(train);
    write_lines(a.out, train_rows);
    if (held) {
        write_lines(a.holdout_out, rows(*held));
        outputs.emplace_back(a.holdout_out);
    }
    if (!a.eval_set.empty()) {
        corpus::export_eval_set(held ? *held : corpus, a.shuffled, seed, a.eval_set);
        for (auto& f : files_below(a.eval_set)) outputs.push_back(f);
    }
    finish(m, nullptr);
    write_manifest(m, outputs, manifest_path_for(a.out, false));
    out << train_rows.size() << " training examples written to " << a.out << '\n';
    return 0;
}

// ---- infer

struct InferArgs {
    Layers layers;
    std::string questions;
    std::string contexts;
    std::string out;
    std::string mock;
    std::size_t limit = 0;
};

void add_infer(CLI::App& app, InferArgs& a) {
    auto* sub = app.add_subcommand("infer", "summarize each question's context with cited evidence");
    add_config_options(sub, a.layers);
    sub->add_option("--question-file", a.questions, "questions (JSON Lines)")->required()->type_name("FILE");
    sub->add_option("--context-dir", a.contexts, "directory of <context_id>.txt files")->required()->type_name("DIR");
    sub->add_option("--out", a.out, "run records (JSON Lines)")->required()->type_name("FILE");
    sub->add_option("--mock", a.mock, "replay scripted replies from a JSON Lines file")->type_name("FILE");
    sub->add_option("--limit", a.limit, "only the first N questions (0: all)");
    bind(sub, a.layers, "--window-tokens", "infer.window_tokens", "model context window");
    bind(sub, a.layers, "--max-attempts", "infer.max_attempts", "re-samples of a misformatted reply");
    bind(sub, a.layers, "--model", "llm.model", "chat model");
}

int run_infer(const InferArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const Config c = resolve(a.layers);
    auto m = begin("infer", args, c, std::nullopt);
    add_inputs(m, a.questions);
    if (!a.mock.empty()) add_inputs(m, a.mock);
    auto client = make_client(c, a.mock);

    summarize::LongOptions lo;
    lo.window_tokens = c.get_size("infer.window_tokens");
    lo.margin = c.get_double("infer.margin");
    lo.counter = summarize::char_ratio_counter(c.get_double("infer.chars_per_token"));
    lo.generate.max_attempts = c.get_int("infer.max_attempts");
    lo.generate.temperature = c.get_double("infer.temperature");
    lo.generate.top_p = c.get_double("infer.top_p");
    lo.generate.max_tokens = c.get_int("infer.max_tokens");

    std::vector<ordered_json> rows;
    std::set<std::string> contexts_read;
    std::size_t degraded = 0;
    for (const auto& j : corpus::read_jsonl(a.questions)) {
        if (a.limit && rows.size() >= a.limit) break;
        const auto q = corpus::question_from_json(j);
        const fs::path ctx_path = fs::path(a.contexts) / (q.context_id + ".txt");
        const auto context = read_file(ctx_path);
        if (contexts_read.insert(q.context_id).second) add_inputs(m, ctx_path);
        auto result = summarize::summarize_long(q.question, context, *client, lo);
        const auto record = summarize::make_record(q.question_id, q.context_id, q.question, result);
        degraded += record.degraded ? 1 : 0;
        rows.push_back(summarize::to_json(record));
    }
    write_lines(a.out, rows);
    finish(m, client.get());
    write_manifest(m, {a.out}, manifest_path_for(a.out, false));
    out << rows.size() << " records written to " << a.out << " (" << degraded << " degraded)\n";
    return 0;
}

// ---- eval

struct EvalArgs {
    Layers layers;
    std::string run;
    std::string contexts;
    std::string out;
    std::string rater_config;
    std::string mock;
    std::string questions;
};

void add_eval(CLI::App& app, EvalArgs& a) {
    auto* sub = app.add_subcommand("eval", "score a run: copy accuracy, positions, rater and citation metrics");
    add_config_options(sub, a.layers);
    sub->add_option("--run", a.run, "run records (JSON Lines)")->required()->type_name("FILE");
    sub->add_option("--contexts", a.contexts, "directory of <context_id>.txt files")->required()->type_name("DIR");
    sub->add_option("--out", a.out, "report directory")->required()->type_name("DIR");
    sub->add_option("--rater-config", a.rater_config, "configuration file for the rater model; enables rater metrics")
        ->type_name("FILE");
    sub->add_option("--mock", a.mock, "scripted rater/embedding replies; enables rater metrics")->type_name("FILE");
    sub->add_option("--questions", a.questions, "questions with reference summaries; enables the reference histogram")
        ->type_name("FILE");
    bind(sub, a.layers, "--overlap-threshold", "eval.overlap_threshold", "LCS overlap counted as a copy");
    bind(sub, a.layers, "--bins", "eval.bins", "position histogram bins");
    bind(sub, a.layers, "--resamples", "eval.resamples", "bootstrap resamples");
    bind(sub, a.layers, "--seed", "eval.seed", "bootstrap seed");
}

int run_eval(const EvalArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    std::vector<std::string> extra;
    if (!a.rater_config.empty()) extra.push_back(a.rater_config);
    const Config c = resolve(a.layers, extra);
    auto m = begin("eval", args, c, c.get_u64("eval.seed"));
    add_inputs(m, a.run);
    if (!a.rater_config.empty()) add_inputs(m, a.rater_config);
    if (!a.mock.empty()) add_inputs(m, a.mock);

    evaluate::EvalInputs in;
    for (const auto& j : corpus::read_jsonl(a.run)) in.records.push_back(summarize::record_from_json(j));
    for (const auto& r : in.records) {
        if (in.contexts.contains(r.context_id)) continue;
        const fs::path p = fs::path(a.contexts) / (r.context_id + ".txt");
        in.contexts.emplace(r.context_id, read_file(p));
        add_inputs(m, p);
    }
    if (!a.questions.empty()) {
        add_inputs(m, a.questions);
        for (const auto& j : corpus::read_jsonl(a.questions)) {
            const auto q = corpus::question_from_json(j);
            in.references.emplace(q.question_id, q.reference_summary);
        }
    }

    evaluate::EvalOptions o;
    o.overlap_threshold = c.get_double("eval.overlap_threshold");
    o.bins = c.get_size("eval.bins");
    o.bootstrap.resamples = c.get_size("eval.resamples");
    o.bootstrap.seed = c.get_u64("eval.seed");
    std::unique_ptr<llm::Client> client;
    if (!a.rater_config.empty() || !a.mock.empty()) {
        client = make_client(c, a.mock);
        evaluate::RaterOptions ro;
        ro.model = c.get("rater.model");
        ro.temperature = c.get_double("rater.temperature");
        ro.max_tokens = c.get_int("rater.max_tokens");
        o.rater = evaluate::llm_rater(*client, ro);
        if (!a.questions.empty()) o.embedder = client->embedder();
    }

    const auto report = evaluate::evaluate_run(in, o);
    const auto files = evaluate::write_report(report, a.out);
    finish(m, client.get());
    write_manifest(m, files, manifest_path_for(a.out, true));
    out << evaluate::markdown_summary(report);
    return 0;
}

// ---- diversity

struct DiversityArgs {
    Layers layers;
    std::string corpus;
    std::string out;
    std::string mock;
    bool embed = false;
    bool full_scale = false;
};

void add_diversity(CLI::App& app, DiversityArgs& a) {
    auto* sub = app.add_subcommand("diversity", "lexical, embedding and topic diversity of a corpus");
    add_config_options(sub, a.layers);
    sub->add_option("--corpus", a.corpus, "documents.jsonl, a corpus directory, or JSON Lines with a \"text\" field")
        ->required()
        ->type_name("PATH");
    sub->add_option("--out", a.out, "report (JSON)")->required()->type_name("FILE");
    bind(sub, a.layers, "--k", "diversity.k", "LDA topics");
    bind(sub, a.layers, "--topn", "diversity.top_n", "top words per topic");
    bind(sub, a.layers, "--iterations", "diversity.iterations", "Gibbs sweeps");
    bind(sub, a.layers, "--seed", "diversity.seed", "sampler seed");
    bind(sub, a.layers, "--min-df", "diversity.min_df", "minimum document frequency");
    bind(sub, a.layers, "--alpha", "diversity.alpha", "document-topic prior");
    bind(sub, a.layers, "--beta", "diversity.beta", "topic-word prior");
    sub->add_flag("--full-scale", a.full_scale, "k=200 and top_n=200 unless given explicitly");
    sub->add_flag("--embed", a.embed, "also compute embedding dispersion");
    sub->add_option("--mock", a.mock, "scripted embedding replies")->type_name("FILE");
}

std::vector<std::string> corpus_texts(const fs::path& path) {
    const fs::path file = fs::is_directory(path) ? path / corpus::kDocumentsFile : path;
    std::vector<std::string> texts;
    std::size_t line = 0;
    for (const auto& j : corpus::read_jsonl(file)) {
        ++line;
        if (j.contains("sections")) {
            texts.push_back(corpus::concatenate(corpus::document_from_json(j)));
        } else if (j.contains("text") && j["text"].is_string()) {
            texts.push_back(j["text"].get<std::string>());
        } else {
            fail(ErrorCode::SchemaError,
                 file.string() + ":" + std::to_string(line) + ": neither a document nor a {\"text\": ...} record");
        }
    }
    return texts;
}

int run_diversity(DiversityArgs a, const std::vector<std::string>& args, std::ostream& out) {
    if (a.full_scale) {
        auto given = [&](const std::string& key) {
            return std::any_of(a.layers.flags.begin(), a.layers.flags.end(),
                               [&](const auto& f) { return f.first == key; });
        };
        std::vector<std::pair<std::string, std::string>> scale;
        if (!given("diversity.k")) scale.emplace_back("diversity.k", "200");
        if (!given("diversity.top_n")) scale.emplace_back("diversity.top_n", "200");
        a.layers.flags.insert(a.layers.flags.begin(), scale.begin(), scale.end());
    }
    const Config c = resolve(a.layers);
    auto m = begin("diversity", args, c, c.get_u64("diversity.seed"));
    add_inputs(m, a.corpus);
    if (!a.mock.empty()) add_inputs(m, a.mock);
    const auto texts = corpus_texts(a.corpus);

    diversity::DiversityOptions o;
    o.lda.k = c.get_size("diversity.k");
    o.lda.iterations = c.get_size("diversity.iterations");
    o.lda.beta = c.get_double("diversity.beta");
    o.lda.seed = c.get_u64("diversity.seed");
    o.lda.min_df = c.get_size("diversity.min_df");
    if (!c.get("diversity.alpha").empty()) o.lda.alpha = c.get_double("diversity.alpha");
    o.top_n = c.get_size("diversity.top_n");

    std::unique_ptr<llm::Client> client;
    std::optional<Embedder> embedder;
    if (a.embed) {
        client = make_client(c, a.mock);
        embedder = client->embedder();
    }
    const auto report = diversity::diversity_report(texts, o, embedder);
    make_parent(a.out);
    {
        std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorCode::Io, "cannot write " + a.out);
        f << report.dump(2) << '\n';
    }
    finish(m, client.get());
    write_manifest(m, {a.out}, manifest_path_for(a.out, false));
    out << "topic diversity " << report["topic_diversity"].get<double>() << ", TTR " << report["ttr"].get<double>()
        << " over " << texts.size() << " texts\n";
    return 0;
}

// ---- report

struct ReportArgs {
    Layers layers;
    std::vector<std::string> reports;
    bool correlate = false;
    std::vector<std::string> verify;
    std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
    auto* sub = app.add_subcommand("report", "compare or correlate evaluation reports; verify run manifests");
    add_config_options(sub, a.layers);
    sub->add_option("reports", a.reports, "report directories or report.json files")->type_name("REPORT");
    sub->add_flag("--correlate", a.correlate, "Pearson correlation of per-question scores of two reports");
    sub->add_option("--verify", a.verify, "check output digests against a manifest (file, directory, or output)")
        ->type_name("PATH");
    sub->add_option("--out", a.out, "write the comparison here instead of stdout")->type_name("FILE");
}

int run_report(const ReportArgs& a, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (a.reports.empty() && a.verify.empty()) fail(ErrorCode::InvalidArgument, "nothing to do: give reports or --verify");
    bool verified = true;
    for (const auto& p : a.verify) {
        const auto r = verify_manifest(p);
        if (r.ok()) {
            out << "ok " << p << '\n';
            continue;
        }
        verified = false;
        for (const auto& f : r.changed) err << "changed " << p << ": " << f << '\n';
        for (const auto& f : r.missing) err << "missing " << p << ": " << f << '\n';
    }
    if (!verified) fail(ErrorCode::DigestMismatch, "output files differ from their manifest");
    if (a.reports.empty()) return 0;

    const Config c = resolve(a.layers);
    auto m = begin("report", args, c, std::nullopt);
    std::vector<std::pair<std::string, ordered_json>> loaded;
    for (const auto& r : a.reports) {
        const fs::path file = fs::is_directory(r) ? fs::path(r) / "report.json" : fs::path(r);
        add_inputs(m, file);
        try {
            loaded.emplace_back(r, ordered_json::parse(read_file(file)));
        } catch (const json::exception& e) {
            fail(ErrorCode::SchemaError, file.string() + ": " + e.what());
        }
    }
    std::string text;
    if (a.correlate) {
        if (loaded.size() != 2) fail(ErrorCode::InvalidArgument, "--correlate takes exactly two reports");
        text = evaluate::correlate_reports(loaded[0].second, loaded[1].second).dump(2) + "\n";
    } else {
        text = evaluate::compare_reports(loaded);
    }
    if (a.out.empty()) {
        out << text;
        return 0;
    }
    make_parent(a.out);
    {
        std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorCode::Io, "cannot write " + a.out);
        f << text;
    }
    finish(m, nullptr);
    write_manifest(m, {a.out}, manifest_path_for(a.out, false));
    return 0;
}

std::string footer() {
    std::ostringstream s;
    s << "\nExit codes: 0 success, 1 usage or input error, 2 runtime failure.\n"
         "Errors go to stderr as: error[<Code>]: <message>\n\n"
         "Configuration (defaults < --config files < environment < flags):\n";
    for (const auto& k : config_keys()) {
        s << "  " << k.key << " = " << (k.default_value.empty() ? "\"\"" : k.default_value) << "  (" << k.env
          << ")  " << k.help << '\n';
    }
    return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sunset: synthetic query-focused summarization corpora, inference and evaluation"};
    app.name("sunset");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.footer(footer());

    GenerateArgs gen;
    ExportArgs exp;
    InferArgs inf;
    EvalArgs ev;
    DiversityArgs div;
    ReportArgs rep;
    add_generate(app, gen);
    add_export(app, exp);
    add_infer(app, inf);
    add_eval(app, ev);
    add_diversity(app, div);
    add_report(app, rep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error[Usage]: " << e.what() << "\nRun 'sunset --help' or 'sunset <command> --help' for usage.\n";
        return 1;
    }

    try {
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "generate") return run_generate(gen, args, out);
        if (cmd == "export") return run_export(exp, args, out);
        if (cmd == "infer") return run_infer(inf, args, out);
        if (cmd == "eval") return run_eval(ev, args, out);
        if (cmd == "diversity") return run_diversity(div, args, out);
        return run_report(rep, args, out, err);
    } catch (const Error& e) {
        const int code = exit_code_for(e.code());
        err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        if (code == 1) err << "Run 'sunset <command> --help' for usage.\n";
        return code;
    } catch (const fs::filesystem_error& e) {
        err << "error[Io]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error[Internal]: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace sunset::cli
