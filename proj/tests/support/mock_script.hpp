#pragma once

// Scripted replies for a whole generation run. The builder mirrors the order
// in which run_pipeline issues requests (titles, then per document: outline,
// queries, summaries, sections with their repair calls, then refine /
// citances / validate per tuple), so a run over the script is fully offline.

#include "json.hpp"

#include <string>
#include <vector>

namespace sunset::testing {

struct ScriptOptions {
    std::size_t documents = 2;
    std::size_t sections = 6;
    std::size_t queries = 5;
    std::size_t evidence_per_tuple = 5;
    /// Every document whose 1-based index is divisible by this gets one
    /// passage left out of a section and repaired by the model.
    std::size_t model_repair_every = 2;
    /// Same, repaired through the longest-common-substring fallback.
    std::size_t lcs_repair_every = 3;
    /// Tuples (1-based, per document) the validator answers NO for.
    std::vector<std::size_t> rejected;
    /// Add an out-of-range citation to every summary for the sanitizer.
    bool stray_citation = true;
};

inline std::string evidence_text(std::size_t doc, std::size_t q, std::size_t j) {
    static const char* subjects[] = {"The harbour master", "Old Mira", "The archivist", "A young cartographer",
                                     "The night watchman", "Captain Ilse"};
    static const char* verbs[] = {"recorded", "remembered", "sketched", "whispered", "traded", "buried"};
    return std::string(subjects[(doc + q) % 6]) + " " + verbs[(q + j) % 6] + " the tale of the Ghost Ship number " +
           std::to_string(doc * 100 + q * 10 + j) + " beside the northern quay.";
}

inline std::string title_text(std::size_t doc) {
    static const char* adjectives[] = {"Silent", "Drowned", "Paper", "Amber", "Hollow", "Winter", "Glass"};
    static const char* nouns[] = {"Lanterns", "Harbours", "Almanacs", "Cartographers", "Tides", "Orchards"};
    return "The " + std::string(adjectives[doc % 7]) + " " + nouns[(doc / 7) % 6] + " of Volume " +
           std::to_string(doc + 1);
}

inline std::vector<nlohmann::json> build_script(const ScriptOptions& o) {
    using nlohmann::json;
    std::vector<json> script;
    auto reply = [&](std::string content) { script.push_back({{"content", std::move(content)}}); };

    std::string titles;
    for (std::size_t d = 0; d < o.documents; ++d) titles += std::to_string(d + 1) + ". " + title_text(d) + "\n";
    reply(titles);

    for (std::size_t d = 0; d < o.documents; ++d) {
        const std::size_t doc_no = d + 1;

        std::string outline = "Here is the outline:\n```python\n{\n";
        for (std::size_t s = 0; s < o.sections; ++s) {
            outline += "'Chapter " + std::to_string(s + 1) + ": Part " + std::to_string(s + 1) + " of " +
                       title_text(d) + "': 'Events of part " + std::to_string(s + 1) + ", told plainly.',\n";
        }
        outline += "}\n```";
        reply(outline);

        std::string queries;
        for (std::size_t q = 0; q < o.queries; ++q) {
            queries += "What happens in strand " + std::to_string(q + 1) + " of " + title_text(d) + "?\n\n";
        }
        reply(queries);

        // evidence[q][j] lives in section chapter[q][j]
        std::vector<std::vector<std::string>> evidence(o.queries);
        std::vector<std::vector<std::size_t>> chapter(o.queries);
        for (std::size_t q = 0; q < o.queries; ++q) {
            json body;
            body["summary"] = "Strand " + std::to_string(q + 1) + " follows the Ghost Ship.";
            body["evidence"] = json::array();
            body["chapter"] = json::array();
            for (std::size_t j = 0; j < o.evidence_per_tuple; ++j) {
                evidence[q].push_back(evidence_text(d, q, j));
                chapter[q].push_back((q + j) % o.sections + 1);
                body["evidence"].push_back(evidence[q].back());
                body["chapter"].push_back(chapter[q].back());
            }
            reply("```json\n" + body.dump(2) + "\n```");
        }

        const bool model_repair = o.model_repair_every && doc_no % o.model_repair_every == 0;
        const bool lcs_repair = o.lcs_repair_every && doc_no % o.lcs_repair_every == 0;
        for (std::size_t s = 0; s < o.sections; ++s) {
            std::vector<std::string> required;
            for (std::size_t q = 0; q < o.queries; ++q) {
                for (std::size_t j = 0; j < evidence[q].size(); ++j) {
                    if (chapter[q][j] != s + 1) continue;
                    if (std::find(required.begin(), required.end(), evidence[q][j]) == required.end()) {
                        required.push_back(evidence[q][j]);
                    }
                }
            }
            std::string text = "Part " + std::to_string(s + 1) + " opens on a grey morning in document " +
                               std::to_string(doc_no) + ".";
            std::vector<std::string> repairs;
            for (std::size_t k = 0; k < required.size(); ++k) {
                std::string passage = required[k];
                if (k == 0 && s == 0 && model_repair) {
                    // paraphrased in the text; the model then quotes the paraphrase
                    passage.replace(passage.find("the tale"), 8, "the legend");
                    repairs.push_back("```\n" + passage + "\n```");
                } else if (k == 0 && s == 1 && lcs_repair) {
                    // paraphrased in the text; the model's quote is off too
                    passage.replace(passage.find("the tale"), 8, "the story");
                    std::string quote = passage;
                    quote.replace(quote.find("beside"), 6, "near to");
                    repairs.push_back("```\n" + quote + "\n```");
                }
                text += " The wind turned while the bells rang " + std::to_string(k + 1) + " times. " + passage;
            }
            text += " The part closes as the lamps are lit.";
            reply("```\n" + text + "\n```");
            for (auto& r : repairs) reply(std::move(r));
        }

        for (std::size_t q = 0; q < o.queries; ++q) {
            const bool rejected = std::find(o.rejected.begin(), o.rejected.end(), q + 1) != o.rejected.end();
            reply("```\nIn strand " + std::to_string(q + 1) + " the crew keeps a careful record. " +
                  "The Ghost Ship returns each winter.\n```");
            std::string cited = "In strand " + std::to_string(q + 1) + " the crew keeps a careful record [1]. " +
                                "The Ghost Ship returns each winter [2]";
            if (o.stray_citation) cited += " [" + std::to_string(o.evidence_per_tuple + 7) + "]";
            cited += ".";
            reply(cited);
            reply(rejected ? "NO" : "YES");
        }
    }
    return script;
}

}  // namespace sunset::testing
