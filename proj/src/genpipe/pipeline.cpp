#include "sunset/genpipe.hpp"

#include "sunset/error.hpp"
#include "sunset/rng.hpp"
#include "sunset/textmatch.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>

namespace sunset::genpipe {

using nlohmann::json;
using nlohmann::ordered_json;

std::string document_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "doc-%05zu", index + 1);
    return buf;
}

namespace {

// Failures that cost one item rather than the whole run.
bool recoverable(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseFailure:
    case ErrorCode::WrongSectionCount:
    case ErrorCode::WrongCount:
    case ErrorCode::LengthMismatch:
    case ErrorCode::SectionEmpty:
    case ErrorCode::EmptyEvidence:
    case ErrorCode::ExhaustedRetries:
    case ErrorCode::MalformedResponse:
    case ErrorCode::RequestRejected:
        return true;
    default:
        return false;
    }
}

ordered_json error_detail(const Error& e) {
    return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

struct Slot {
    std::size_t draft;
    std::size_t item;
};

}  // namespace

DocumentResult generate_document(Stages& stages, const std::string& doc_id, const std::string& title,
                                 std::uint64_t seed, EventLog& log) {
    const StageConfig& cfg = stages.config();
    Rng rng(seed);
    DocumentResult result;

    auto drop_document = [&](const char* stage, const Error& e) {
        if (!recoverable(e.code())) throw;
        log.add(stage, doc_id, "document_dropped", error_detail(e));
        return result;
    };

    Outline outline;
    std::vector<std::string> questions;
    try {
        outline = stages.outline(title, doc_id);
        questions = stages.queries(outline, doc_id);
    } catch (const Error& e) {
        if (!recoverable(e.code())) throw;
        log.add("outline", doc_id, "document_dropped", error_detail(e));
        return result;
    }

    std::vector<DraftQse> drafts;
    for (const auto& q : questions) {
        const int n = static_cast<int>(rng.between(cfg.min_evidence, cfg.max_evidence));
        try {
            drafts.push_back(stages.summary_evidence(outline, q, n, doc_id));
        } catch (const Error& e) {
            if (!recoverable(e.code())) throw;
            log.add("summary_evidence", doc_id, "tuple_dropped", error_detail(e));
            ++result.tuples_dropped;
        }
    }
    if (drafts.empty()) {
        log.add("summary_evidence", doc_id, "document_dropped", {{"message", "no usable summary drafts"}});
        return result;
    }

    // Write each section around the evidence planned for it, then swap in
    // repaired passages wherever the model did not copy one verbatim.
    std::vector<std::string> sections;
    std::vector<std::vector<bool>> dropped(drafts.size());
    for (std::size_t d = 0; d < drafts.size(); ++d) dropped[d].assign(drafts[d].evidence.size(), false);

    for (std::size_t s = 0; s < outline.sections.size(); ++s) {
        std::vector<std::string> required;
        std::vector<Slot> slots;
        for (std::size_t d = 0; d < drafts.size(); ++d) {
            for (std::size_t j = 0; j < drafts[d].evidence.size(); ++j) {
                if (drafts[d].chapters[j] != static_cast<int>(s + 1)) continue;
                slots.push_back({d, j});
                if (std::find(required.begin(), required.end(), drafts[d].evidence[j]) == required.end()) {
                    required.push_back(drafts[d].evidence[j]);
                }
            }
        }
        SectionResult written;
        try {
            written = stages.section(outline, s, required, doc_id);
        } catch (const Error& e) {
            return drop_document("section", e);
        }
        std::map<std::string, std::optional<std::string>> replaced;
        for (const auto& r : written.repairs) replaced[r.original] = r.replacement;
        for (const auto& slot : slots) {
            auto& ev = drafts[slot.draft].evidence[slot.item];
            const auto it = replaced.find(ev);
            if (it == replaced.end()) continue;
            if (it->second) {
                ev = *it->second;
            } else {
                dropped[slot.draft][slot.item] = true;
            }
        }
        sections.push_back(std::move(written.text));
    }

    std::vector<textmatch::ContextIndex> section_index;
    section_index.reserve(sections.size());
    for (const auto& s : sections) section_index.emplace_back(s);

    corpus::Document doc;
    doc.id = doc_id;
    doc.title = title;
    doc.outline = outline;
    doc.sections = sections;
    const std::string book = corpus::concatenate(doc);
    result.document = std::move(doc);

    for (std::size_t d = 0; d < drafts.size(); ++d) {
        corpus::QseTuple t;
        t.document_id = doc_id;
        t.question = drafts[d].question;
        for (std::size_t j = 0; j < drafts[d].evidence.size(); ++j) {
            if (dropped[d][j]) continue;
            const int chapter = drafts[d].chapters[j];
            std::string ev = textmatch::normalize(drafts[d].evidence[j]);
            if (ev.empty() || !section_index[static_cast<std::size_t>(chapter - 1)].contains(ev)) {
                log.add("pipeline", doc_id, "verbatim_check_failed", {{"section", chapter}, {"passage", ev}});
                continue;
            }
            t.evidence.push_back(std::move(ev));
            t.evidence_sections.push_back(chapter);
        }
        if (t.evidence.empty()) {
            log.add("pipeline", doc_id, "tuple_dropped", {{"question", t.question}, {"message", "no evidence left"}});
            ++result.tuples_dropped;
            continue;
        }
        try {
            const std::string refined = stages.refine(book, t.question, drafts[d].summary, t.evidence, doc_id);
            t.summary = stages.citances(refined, t.evidence, doc_id);
            t.validated = stages.validate(book, t.question, t.summary, doc_id);
        } catch (const Error& e) {
            if (!recoverable(e.code())) throw;
            log.add("refine", doc_id, "tuple_dropped", error_detail(e));
            ++result.tuples_dropped;
            continue;
        }
        if (!t.validated) {
            log.add("validate", doc_id, "tuple_rejected", {{"question", t.question}});
            ++result.tuples_rejected;
            continue;
        }
        result.tuples.push_back(std::move(t));
    }
    return result;
}

namespace {

struct Checkpoint {
    std::vector<std::string> titles;
    std::size_t completed = 0;
    std::uintmax_t documents_bytes = 0;
    std::uintmax_t tuples_bytes = 0;
    std::uintmax_t log_bytes = 0;
    std::uint64_t llm_attempts = 0;
    llm::UsageTotals usage;
    RunSummary summary;
};

ordered_json fingerprint(const PipelineConfig& c) {
    return {{"seed", c.seed},
            {"documents", c.documents},
            {"sections", c.stages.sections},
            {"queries", c.stages.queries},
            {"min_evidence", c.stages.min_evidence},
            {"max_evidence", c.stages.max_evidence},
            {"parse_attempts", c.stages.parse_attempts}};
}

ordered_json to_json(const Checkpoint& cp, const PipelineConfig& config) {
    ordered_json j;
    j["version"] = 1;
    j["config"] = fingerprint(config);
    j["titles"] = cp.titles;
    j["completed"] = cp.completed;
    j["bytes"] = {{"documents", cp.documents_bytes}, {"tuples", cp.tuples_bytes}, {"log", cp.log_bytes}};
    j["llm_attempts"] = cp.llm_attempts;
    j["usage"] = {{"prompt_tokens", cp.usage.prompt_tokens},
                  {"completion_tokens", cp.usage.completion_tokens},
                  {"calls", cp.usage.calls}};
    j["summary"] = {{"documents_written", cp.summary.documents_written},
                    {"documents_dropped", cp.summary.documents_dropped},
                    {"tuples_released", cp.summary.tuples_released},
                    {"tuples_rejected", cp.summary.tuples_rejected},
                    {"tuples_dropped", cp.summary.tuples_dropped}};
    return j;
}

Checkpoint read_checkpoint(const std::filesystem::path& path, const PipelineConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::CheckpointCorrupt, "cannot read " + path.string());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorCode::CheckpointCorrupt, path.string() + " is not JSON");
    try {
        if (j.at("version").get<int>() != 1) fail(ErrorCode::CheckpointCorrupt, "unknown checkpoint version");
        if (json(fingerprint(config)) != j.at("config")) {
            fail(ErrorCode::CheckpointCorrupt, "checkpoint was written with a different configuration: " +
                                                   j.at("config").dump());
        }
        Checkpoint cp;
        cp.titles = j.at("titles").get<std::vector<std::string>>();
        cp.completed = j.at("completed").get<std::size_t>();
        cp.documents_bytes = j.at("bytes").at("documents").get<std::uintmax_t>();
        cp.tuples_bytes = j.at("bytes").at("tuples").get<std::uintmax_t>();
        cp.log_bytes = j.at("bytes").at("log").get<std::uintmax_t>();
        cp.llm_attempts = j.at("llm_attempts").get<std::uint64_t>();
        const auto& u = j.at("usage");
        cp.usage = {u.at("prompt_tokens").get<std::uint64_t>(), u.at("completion_tokens").get<std::uint64_t>(),
                    u.at("calls").get<std::uint64_t>()};
        const auto& s = j.at("summary");
        cp.summary.documents_written = s.at("documents_written").get<std::size_t>();
        cp.summary.documents_dropped = s.at("documents_dropped").get<std::size_t>();
        cp.summary.tuples_released = s.at("tuples_released").get<std::size_t>();
        cp.summary.tuples_rejected = s.at("tuples_rejected").get<std::size_t>();
        cp.summary.tuples_dropped = s.at("tuples_dropped").get<std::size_t>();
        if (cp.completed > config.documents) fail(ErrorCode::CheckpointCorrupt, "checkpoint is past the run end");
        return cp;
    } catch (const json::exception& e) {
        fail(ErrorCode::CheckpointCorrupt, path.string() + ": " + e.what());
    }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) fail(ErrorCode::Io, "write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void append(const std::filesystem::path& path, const std::string& content) {
    if (content.empty()) return;
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) fail(ErrorCode::Io, "cannot append to " + path.string());
    out << content;
    if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

void reset_to(const std::filesystem::path& path, std::uintmax_t size) {
    if (!std::filesystem::exists(path)) {
        if (size != 0) fail(ErrorCode::CheckpointCorrupt, path.string() + " is missing");
        std::ofstream(path, std::ios::binary);
        return;
    }
    if (std::filesystem::file_size(path) < size) {
        fail(ErrorCode::CheckpointCorrupt, path.string() + " is shorter than the checkpoint records");
    }
    std::filesystem::resize_file(path, size);
}

std::string log_lines(std::vector<Event> events) {
    std::string out;
    for (const auto& e : events) out += corpus::to_line(to_json(e)) + "\n";
    return out;
}

}  // namespace

RunSummary run_pipeline(llm::Client& client, const PipelineConfig& config) {
    if (config.out_dir.empty()) fail(ErrorCode::InvalidArgument, "pipeline needs an output directory");
    if (config.stages.min_evidence < 1 || config.stages.min_evidence > config.stages.max_evidence) {
        fail(ErrorCode::InvalidArgument, "evidence range must satisfy 1 <= min <= max");
    }
    if (config.stages.sections == 0) fail(ErrorCode::InvalidArgument, "section count must be positive");
    std::filesystem::create_directories(config.out_dir);

    const auto docs_path = config.out_dir / corpus::kDocumentsFile;
    const auto tuples_path = config.out_dir / corpus::kTuplesFile;
    const auto log_path = config.out_dir / kLogFile;
    const auto cp_path = config.out_dir / kCheckpointFile;

    Checkpoint cp;
    if (config.resume && std::filesystem::exists(cp_path)) {
        cp = read_checkpoint(cp_path, config);
        if (auto* mock = dynamic_cast<llm::MockBackend*>(&client.backend()); mock && mock->consumed() == 0) {
            mock->skip(cp.llm_attempts);
        }
    }
    reset_to(docs_path, cp.documents_bytes);
    reset_to(tuples_path, cp.tuples_bytes);
    reset_to(log_path, cp.log_bytes);

    const std::uint64_t attempts_at_start = client.attempts();
    const llm::UsageTotals usage_at_start = client.ledger().totals();
    const std::uint64_t base_attempts = cp.llm_attempts;
    const llm::UsageTotals base_usage = cp.usage;

    auto save_checkpoint = [&] {
        cp.documents_bytes = std::filesystem::file_size(docs_path);
        cp.tuples_bytes = std::filesystem::file_size(tuples_path);
        cp.log_bytes = std::filesystem::file_size(log_path);
        cp.llm_attempts = base_attempts + (client.attempts() - attempts_at_start);
        const auto now = client.ledger().totals();
        cp.usage = {base_usage.prompt_tokens + now.prompt_tokens - usage_at_start.prompt_tokens,
                    base_usage.completion_tokens + now.completion_tokens - usage_at_start.completion_tokens,
                    base_usage.calls + now.calls - usage_at_start.calls};
        write_atomic(cp_path, to_json(cp, config).dump(2) + "\n");
    };

    // Titles for the whole run come first so that resumed runs see the same list.
    if (cp.titles.size() < config.documents) {
        EventLog title_log;
        Stages stages(client, config.stages, title_log);
        int empty_batches = 0;
        while (cp.titles.size() < config.documents && empty_batches < config.stages.parse_attempts) {
            const std::size_t want = std::min<std::size_t>(100, config.documents - cp.titles.size());
            try {
                for (auto& t : stages.titles(want, cp.titles)) cp.titles.push_back(std::move(t));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::EmptyBatch && !recoverable(e.code())) throw;
                title_log.add("titles", "", "empty_batch", error_detail(e));
                ++empty_batches;
            }
        }
        if (cp.titles.size() < config.documents) {
            title_log.add("titles", "", "short_title_list",
                          {{"wanted", config.documents}, {"got", cp.titles.size()}});
        }
        append(log_path, log_lines(title_log.take()));
        save_checkpoint();
    }

    const std::size_t end = std::min(config.documents, cp.titles.size());
    const std::size_t workers = std::max<std::size_t>(1, config.workers);
    std::size_t committed_now = 0;

    while (cp.completed < end) {
        if ((config.stop && config.stop->load()) || (config.stop_after && committed_now >= config.stop_after)) {
            cp.summary.interrupted = true;
            break;
        }
        std::size_t wave = std::min(workers, end - cp.completed);
        if (config.stop_after) wave = std::min(wave, config.stop_after - committed_now);

        struct Job {
            EventLog log;
            DocumentResult result;
        };
        std::vector<Job> jobs(wave);
        auto run_one = [&](std::size_t k) {
            const std::size_t index = cp.completed + k;
            Stages stages(client, config.stages, jobs[k].log);
            jobs[k].result = generate_document(stages, document_id(index), cp.titles[index],
                                               derive_seed(config.seed, index), jobs[k].log);
        };
        if (wave == 1) {
            run_one(0);
        } else {
            std::vector<std::future<void>> futures;
            for (std::size_t k = 0; k < wave; ++k) futures.push_back(std::async(std::launch::async, run_one, k));
            std::exception_ptr first;
            for (auto& f : futures) {
                try {
                    f.get();
                } catch (...) {
                    if (!first) first = std::current_exception();
                }
            }
            if (first) std::rethrow_exception(first);
        }

        for (auto& job : jobs) {
            auto& r = job.result;
            std::string tuples;
            if (r.document) {
                append(docs_path, corpus::to_line(corpus::to_json(*r.document)) + "\n");
                ++cp.summary.documents_written;
                for (const auto& t : r.tuples) tuples += corpus::to_line(corpus::to_json(t)) + "\n";
            } else {
                ++cp.summary.documents_dropped;
            }
            append(tuples_path, tuples);
            append(log_path, log_lines(job.log.take()));
            cp.summary.tuples_released += r.tuples.size();
            cp.summary.tuples_rejected += r.tuples_rejected;
            cp.summary.tuples_dropped += r.tuples_dropped;
            ++cp.completed;
            ++committed_now;
            save_checkpoint();
        }
    }

    RunSummary out = cp.summary;
    out.completed = cp.completed;
    out.interrupted = cp.summary.interrupted;
    return out;
}

std::vector<corpus::Document> generate_baseline(llm::Client& client, std::size_t n, bool diverse,
                                                const StageConfig& config, EventLog& log) {
    Stages stages(client, config, log);
    std::vector<corpus::Document> out;
    std::vector<std::string> titles;
    for (std::size_t i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "base-%05zu", i + 1);
        try {
            out.push_back(stages.baseline(diverse ? titles : std::vector<std::string>{}, id));
            titles.push_back(out.back().title);
        } catch (const Error& e) {
            if (!recoverable(e.code())) throw;
            log.add("baseline", id, "document_dropped", error_detail(e));
        }
    }
    return out;
}

}  // namespace sunset::genpipe
