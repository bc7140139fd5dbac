#include "sunset/evaluate.hpp"

#include "sunset/citations.hpp"
#include "sunset/error.hpp"
#include "sunset/prompts.hpp"
#include "sunset/rng.hpp"
#include "sunset/textmatch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sunset::evaluate {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Dimension d) noexcept {
    return d == Dimension::Relevance ? "relevance" : "consistency";
}

double normalize_score(int raw) {
    if (raw < 1 || raw > 5) fail(ErrorCode::InvalidArgument, "rater score must lie in [1, 5]");
    return static_cast<double>(raw - 1) / 4.0 * 100.0;
}

std::optional<int> parse_score(std::string_view reply) {
    std::size_t i = 0;
    while (i < reply.size()) {
        if (!std::isdigit(static_cast<unsigned char>(reply[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
        if (j - i == 1 && reply[i] >= '1' && reply[i] <= '5') return reply[i] - '0';
        i = j;
    }
    return std::nullopt;
}

std::string rater_prompt(std::string_view source, std::string_view target, std::optional<std::string_view> query,
                         Dimension dimension) {
    const bool relevance = dimension == Dimension::Relevance;
    std::string_view tmpl;
    if (relevance) {
        tmpl = query ? prompts::kRelevance : prompts::kRelevanceNoQuery;
    } else {
        tmpl = query ? prompts::kConsistency : prompts::kConsistencyNoQuery;
    }
    prompts::Values values{{"document", std::string(source)},
                           {"summary", std::string(target)},
                           {"Relevance", "Relevance:"},
                           {"Consistency", "Consistency:"}};
    if (query) values["query"] = std::string(*query);
    return prompts::fill(tmpl, values);
}

RaterScore rate(llm::Client& client, std::string_view source, std::string_view target,
                std::optional<std::string_view> query, Dimension dimension, const RaterOptions& options) {
    auto request = llm::ChatRequest::user(rater_prompt(source, target, query, dimension), options.temperature);
    request.max_tokens = options.max_tokens;
    request.model = options.model;
    std::string last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        last = client.complete(request).content;
        if (const auto raw = parse_score(last)) return {dimension, *raw, normalize_score(*raw)};
    }
    fail(ErrorCode::UnparseableScore, "no score in [1, 5] in rater reply: " + last.substr(0, 200));
}

Rater llm_rater(llm::Client& client, RaterOptions options) {
    return [&client, options](std::string_view source, std::string_view target, std::optional<std::string_view> query,
                              Dimension dimension) { return rate(client, source, target, query, dimension, options); };
}

Prf prf1(double score_sum, std::size_t n_citations, std::size_t n_sentences) {
    Prf out;
    if (n_citations > 0) out.precision = score_sum / static_cast<double>(n_citations);
    if (n_sentences > 0) out.recall = score_sum / static_cast<double>(n_sentences);
    if (out.precision + out.recall > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) fail(ErrorCode::EmptySamples, "mean of no samples");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Interval interval_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return {percentile(values, 0.025), percentile(values, 0.975)};
}

ordered_json to_json(const Interval& i) { return ordered_json::array({i.lo, i.hi}); }

}  // namespace

Interval bootstrap_ci(const std::vector<double>& samples, std::size_t resamples, std::uint64_t seed) {
    if (samples.empty()) fail(ErrorCode::EmptySamples, "bootstrap needs at least one sample");
    if (resamples == 0) fail(ErrorCode::InvalidArgument, "bootstrap needs at least one resample");
    Rng rng(seed);
    std::vector<double> means(resamples);
    const auto n = samples.size();
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += samples[rng.below(n)];
        m = s / static_cast<double>(n);
    }
    return interval_of(std::move(means));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(ErrorCode::DegenerateInput, "pearson needs inputs of equal length");
    if (x.size() < 2) fail(ErrorCode::DegenerateInput, "pearson needs at least two points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::DegenerateInput, "pearson needs nonzero variance in both inputs");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CitationReport citation_prf1(std::string_view summary, const std::vector<std::string>& evidence, const Rater& rater,
                             Dimension dimension, const BootstrapOptions& boot) {
    CitationReport report;
    report.dimension = dimension;
    const auto sentences = textmatch::split_sentences(summary);
    double total = 0.0;
    for (const auto& sentence : sentences) {
        const auto markers = citations::indices(sentence.text);
        const std::string claim = citations::strip(sentence.text);
        double sentence_sum = 0.0;
        for (const auto k : markers) {
            double score = 0.0;
            if (k >= 1 && k <= evidence.size()) {
                score = rater(evidence[k - 1], claim, std::nullopt, dimension).normalized;
            } else {
                ++report.n_out_of_range;
            }
            report.citation_scores.push_back(score);
            sentence_sum += score;
        }
        report.sentences.emplace_back(markers.size(), sentence_sum);
        report.n_citations += markers.size();
        total += sentence_sum;
    }
    report.n_sentences = sentences.size();
    report.prf = prf1(total, report.n_citations, report.n_sentences);

    if (boot.resamples > 0 && !report.sentences.empty()) {
        Rng rng(boot.seed);
        const auto n = report.sentences.size();
        std::vector<double> ps(boot.resamples), rs(boot.resamples), fs(boot.resamples);
        for (std::size_t b = 0; b < boot.resamples; ++b) {
            double s = 0.0;
            std::size_t c = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& [count, sum] = report.sentences[rng.below(n)];
                c += count;
                s += sum;
            }
            const auto prf = prf1(s, c, n);
            ps[b] = prf.precision;
            rs[b] = prf.recall;
            fs[b] = prf.f1;
        }
        report.precision_ci = interval_of(std::move(ps));
        report.recall_ci = interval_of(std::move(rs));
        report.f1_ci = interval_of(std::move(fs));
    } else {
        report.precision_ci = {report.prf.precision, report.prf.precision};
        report.recall_ci = {report.prf.recall, report.prf.recall};
        report.f1_ci = {report.prf.f1, report.prf.f1};
    }
    return report;
}

namespace {

textmatch::EvidenceMatch match_or_empty(const textmatch::ContextIndex& index, const std::string& evidence,
                                        double threshold) {
    try {
        return index.match(evidence, threshold);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyEvidence) throw;
        return {};
    }
}

}  // namespace

CopyAccuracyRow copy_accuracy(const std::vector<EvidenceSet>& items, double threshold) {
    std::size_t exact = 0, half = 0, n = 0;
    for (const auto& item : items) {
        if (item.evidence.empty()) continue;
        const textmatch::ContextIndex index(item.context);
        for (const auto& e : item.evidence) {
            const auto m = match_or_empty(index, e, threshold);
            ++n;
            exact += m.exact;
            half += m.matched();
        }
    }
    CopyAccuracyRow row;
    row.n_evidence = n;
    row.undefined = n == 0;
    if (n > 0) {
        row.exact_rate = 100.0 * static_cast<double>(exact) / static_cast<double>(n);
        row.half_match_rate = 100.0 * static_cast<double>(half) / static_cast<double>(n);
    }
    return row;
}

std::size_t bin_of(double position, std::size_t bins) {
    if (bins < 2) fail(ErrorCode::InvalidArgument, "a histogram needs at least two bins");
    if (!(position >= 0.0)) return 0;
    const auto b = static_cast<std::size_t>(std::floor(position * static_cast<double>(bins)));
    return std::min(b, bins - 1);
}

PositionHistogram histogram_of(const std::vector<double>& positions, std::size_t bins) {
    PositionHistogram h;
    h.bin_count = bins;
    h.counts.assign(bins, 0);
    for (double p : positions) ++h.counts[bin_of(p, bins)];
    h.total_matched = positions.size();
    return h;
}

PositionHistogram position_histogram(const std::vector<EvidenceSet>& items, std::size_t bins, double threshold) {
    std::vector<double> positions;
    std::size_t unmatched = 0;
    for (const auto& item : items) {
        if (item.evidence.empty()) continue;
        const textmatch::ContextIndex index(item.context);
        for (const auto& e : item.evidence) {
            const auto m = match_or_empty(index, e, threshold);
            if (m.relative_position) {
                positions.push_back(*m.relative_position);
            } else {
                ++unmatched;
            }
        }
    }
    auto h = histogram_of(positions, bins);
    h.total_unmatched = unmatched;
    return h;
}

PositionHistogram reference_histogram(const std::vector<ReferenceSet>& items, const Embedder& embedder,
                                      std::size_t bins) {
    std::vector<double> positions;
    for (const auto& item : items) {
        const auto found = textmatch::locate_reference_sentences(item.reference_summary, item.context, embedder);
        positions.insert(positions.end(), found.begin(), found.end());
    }
    return histogram_of(positions, bins);
}

namespace {

ordered_json histogram_json(const PositionHistogram& h) {
    ordered_json j;
    j["bin_count"] = h.bin_count;
    j["counts"] = h.counts;
    j["total_matched"] = h.total_matched;
    j["total_unmatched"] = h.total_unmatched;
    return j;
}

ordered_json prf_json(const Prf& p) { return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; }

ordered_json summary_stats(const std::vector<double>& values, const BootstrapOptions& boot) {
    ordered_json j;
    j["n"] = values.size();
    if (values.empty()) {
        j["mean"] = nullptr;
        j["ci95"] = nullptr;
    } else {
        j["mean"] = mean(values);
        j["ci95"] = to_json(bootstrap_ci(values, boot.resamples, boot.seed));
    }
    return j;
}

}  // namespace

ordered_json evaluate_run(const EvalInputs& inputs, const EvalOptions& options) {
    std::vector<EvidenceSet> sets;
    sets.reserve(inputs.records.size());
    for (const auto& r : inputs.records) {
        const auto ctx = inputs.contexts.find(r.context_id);
        if (ctx == inputs.contexts.end()) {
            fail(ErrorCode::InvalidArgument, "no context \"" + r.context_id + "\" for question " + r.question_id);
        }
        sets.push_back({r.evidence, ctx->second});
    }

    ordered_json report;
    report["normalization"] = textmatch::kNormalizationVersion;
    report["overlap_threshold"] = options.overlap_threshold;
    report["bins"] = options.bins;
    report["bootstrap"] = {{"resamples", options.bootstrap.resamples}, {"seed", options.bootstrap.seed}};
    report["conventions"] = ordered_json::array(
        {"chunk summaries have their citations shifted by the evidence count of earlier chunks before combination",
         "out-of-range citations score 0 and count toward precision",
         "whole-response scores rate the response with citation markers removed"});
    report["n_records"] = inputs.records.size();
    report["n_degraded"] = std::count_if(inputs.records.begin(), inputs.records.end(),
                                         [](const auto& r) { return r.degraded; });
    report["n_chunked"] = std::count_if(inputs.records.begin(), inputs.records.end(),
                                        [](const auto& r) { return r.chunked; });

    const auto row = copy_accuracy(sets, options.overlap_threshold);
    report["copy_accuracy"] = {{"exact_rate", row.exact_rate},
                               {"half_match_rate", row.half_match_rate},
                               {"n_evidence", row.n_evidence},
                               {"undefined", row.undefined}};
    report["position_histogram"] = histogram_json(position_histogram(sets, options.bins, options.overlap_threshold));

    if (options.embedder && !inputs.references.empty()) {
        std::vector<ReferenceSet> refs;
        for (std::size_t i = 0; i < inputs.records.size(); ++i) {
            const auto ref = inputs.references.find(inputs.records[i].question_id);
            if (ref != inputs.references.end()) refs.push_back({ref->second, sets[i].context});
        }
        report["reference_histogram"] = histogram_json(reference_histogram(refs, *options.embedder, options.bins));
    }

    std::vector<ordered_json> per_record(inputs.records.size());
    for (std::size_t i = 0; i < inputs.records.size(); ++i) {
        const auto& r = inputs.records[i];
        const auto single = copy_accuracy({sets[i]}, options.overlap_threshold);
        per_record[i]["question_id"] = r.question_id;
        per_record[i]["n_evidence"] = single.n_evidence;
        per_record[i]["exact_rate"] = single.exact_rate;
        per_record[i]["half_match_rate"] = single.half_match_rate;
    }

    if (options.rater) {
        const BootstrapOptions no_ci{0, 0};
        ordered_json scores, cites;
        for (const auto dim : {Dimension::Relevance, Dimension::Consistency}) {
            const std::string name(to_string(dim));
            std::vector<double> whole, ps, rs, fs;
            std::size_t n_cit = 0, n_sent = 0, n_oor = 0;
            for (std::size_t i = 0; i < inputs.records.size(); ++i) {
                const auto& r = inputs.records[i];
                const std::optional<std::string_view> query =
                    r.question.empty() ? std::nullopt : std::optional<std::string_view>(r.question);
                const auto s = (*options.rater)(sets[i].context, citations::strip(r.response), query, dim);
                whole.push_back(s.normalized);
                const auto c = citation_prf1(r.response, r.evidence, *options.rater, dim, no_ci);
                ps.push_back(c.prf.precision);
                rs.push_back(c.prf.recall);
                fs.push_back(c.prf.f1);
                n_cit += c.n_citations;
                n_sent += c.n_sentences;
                n_oor += c.n_out_of_range;
                per_record[i][name] = s.normalized;
                per_record[i]["citations_" + name] = prf_json(c.prf);
            }
            scores[name] = summary_stats(whole, options.bootstrap);
            ordered_json c;
            c["n_summaries"] = inputs.records.size();
            c["n_citations"] = n_cit;
            c["n_sentences"] = n_sent;
            c["n_out_of_range"] = n_oor;
            c["precision"] = summary_stats(ps, options.bootstrap);
            c["recall"] = summary_stats(rs, options.bootstrap);
            c["f1"] = summary_stats(fs, options.bootstrap);
            cites[name] = std::move(c);
        }
        report["scores"] = std::move(scores);
        report["citations"] = std::move(cites);
    }
    report["records"] = per_record;
    return report;
}

namespace {

std::string fmt(const ordered_json& v, int precision = 2) {
    if (v.is_null()) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v.get<double>();
    return os.str();
}

std::string fmt_ci(const ordered_json& stats) {
    if (stats.is_null() || stats["mean"].is_null()) return "n/a";
    return fmt(stats["mean"]) + " [" + fmt(stats["ci95"][0]) + ", " + fmt(stats["ci95"][1]) + "]";
}

std::string histogram_md(const ordered_json& h) {
    std::string out = "| bin | range | count |\n|---|---|---|\n";
    const auto bins = h["bin_count"].get<std::size_t>();
    for (std::size_t b = 0; b < bins; ++b) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(2) << static_cast<double>(b) / static_cast<double>(bins) << "-"
           << static_cast<double>(b + 1) / static_cast<double>(bins);
        out += "| " + std::to_string(b) + " | " + os.str() + " | " + h["counts"][b].dump() + " |\n";
    }
    out += "\nmatched " + h["total_matched"].dump() + ", unmatched " + h["total_unmatched"].dump() + "\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace

std::string markdown_summary(const ordered_json& report) {
    std::string md = "# Evaluation report\n\n";
    md += "Records: " + report["n_records"].dump() + " (degraded " + report["n_degraded"].dump() + ", chunked " +
          report["n_chunked"].dump() + ")\n\n";
    md += "Normalization `" + report["normalization"].get<std::string>() + "`, overlap threshold " +
          fmt(report["overlap_threshold"]) + "\n\n";

    const auto& ca = report["copy_accuracy"];
    md += "## Copy accuracy\n\n| exact % | >=50% overlap % | evidence |\n|---|---|---|\n";
    md += "| " + fmt(ca["exact_rate"]) + " | " + fmt(ca["half_match_rate"]) + " | " + ca["n_evidence"].dump() +
          " |\n";
    if (ca["undefined"].get<bool>()) md += "\nNo evidence was extracted; rates are undefined and shown as 0.\n";

    md += "\n## Evidence position\n\n" + histogram_md(report["position_histogram"]);
    if (report.contains("reference_histogram")) {
        md += "\n## Reference position\n\n" + histogram_md(report["reference_histogram"]);
    }
    if (report.contains("scores")) {
        md += "\n## Rater scores (0-100, mean [95% CI])\n\n| dimension | response | citation P | citation R | "
              "citation F1 |\n|---|---|---|---|---|\n";
        for (const auto& [name, s] : report["scores"].items()) {
            const auto& c = report["citations"][name];
            md += "| " + name + " | " + fmt_ci(s) + " | " + fmt_ci(c["precision"]) + " | " + fmt_ci(c["recall"]) +
                  " | " + fmt_ci(c["f1"]) + " |\n";
        }
    }
    md += "\n## Conventions\n\n";
    for (const auto& c : report["conventions"]) md += "- " + c.get<std::string>() + "\n";
    return md;
}

std::string histogram_csv(const ordered_json& histogram) {
    std::string out = "bin_lo,bin_hi,count\n";
    const auto bins = histogram["bin_count"].get<std::size_t>();
    for (std::size_t b = 0; b < bins; ++b) {
        std::ostringstream os;
        os << std::setprecision(6) << static_cast<double>(b) / static_cast<double>(bins) << ','
           << static_cast<double>(b + 1) / static_cast<double>(bins) << ',' << histogram["counts"][b].dump() << '\n';
        out += os.str();
    }
    return out;
}

std::vector<std::filesystem::path> write_report(const ordered_json& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files{dir / "report.json", dir / "report.md", dir / "histogram.csv"};
    write_text(files[0], report.dump(2) + "\n");
    write_text(files[1], markdown_summary(report));
    write_text(files[2], histogram_csv(report["position_histogram"]));
    if (report.contains("reference_histogram")) {
        files.push_back(dir / "reference_histogram.csv");
        write_text(files.back(), histogram_csv(report["reference_histogram"]));
    }
    return files;
}

std::string compare_reports(const std::vector<std::pair<std::string, ordered_json>>& reports) {
    std::string md = "| run | records | exact % | >=50% % | evidence | relevance | consistency | cite F1 rel | "
                     "cite F1 cons |\n|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& [name, r] : reports) {
        const auto& ca = r["copy_accuracy"];
        auto score = [&](const char* block, const char* dim, const char* field) -> std::string {
            if (!r.contains(block)) return "n/a";
            const auto& b = r[block][dim];
            return field ? fmt_ci(b[field]) : fmt_ci(b);
        };
        md += "| " + name + " | " + r["n_records"].dump() + " | " + fmt(ca["exact_rate"]) + " | " +
              fmt(ca["half_match_rate"]) + " | " + ca["n_evidence"].dump() + " | " +
              score("scores", "relevance", nullptr) + " | " + score("scores", "consistency", nullptr) + " | " +
              score("citations", "relevance", "f1") + " | " + score("citations", "consistency", "f1") + " |\n";
    }
    return md;
}

ordered_json correlate_reports(const ordered_json& a, const ordered_json& b) {
    std::map<std::string, const ordered_json*> by_id;
    for (const auto& r : b["records"]) by_id[r["question_id"].get<std::string>()] = &r;
    ordered_json out = ordered_json::object();
    for (const auto dim : {Dimension::Relevance, Dimension::Consistency}) {
        const std::string name(to_string(dim));
        std::vector<double> x, y;
        for (const auto& r : a["records"]) {
            const auto other = by_id.find(r["question_id"].get<std::string>());
            if (other == by_id.end() || !r.contains(name) || !other->second->contains(name)) continue;
            x.push_back(r[name].get<double>());
            y.push_back((*other->second)[name].get<double>());
        }
        ordered_json entry;
        entry["n"] = x.size();
        try {
            entry["pearson"] = pearson(x, y);
        } catch (const Error& e) {
            entry["pearson"] = nullptr;
            entry["reason"] = e.what();
        }
        out[name] = std::move(entry);
    }
    return out;
}

}  // namespace sunset::evaluate
