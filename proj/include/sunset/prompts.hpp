#pragma once

// Prompt templates used for generation, inference and rating. Placeholders are
// written {name}; fill() substitutes them in one left-to-right pass, so text
// that arrives through a value is never expanded again.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sunset::prompts {

extern const std::string_view kTitles;          // {prev_titles_prompt}
extern const std::string_view kOutline;         // {title}
extern const std::string_view kQueries;         // {outline}
extern const std::string_view kSummaryEvidence; // {outline} {question} {n_evidence}
extern const std::string_view kSection;         // {outline} {chapter} {evidence}
extern const std::string_view kRetrieval;       // {chapter} {passage}
extern const std::string_view kRefine;          // {book} {question} {summary} {passages}
extern const std::string_view kCitances;        // {essay} {evidence}
extern const std::string_view kValidation;      // {book} {question} {summary}
extern const std::string_view kBaseline;        // {title_prompt}

extern const std::string_view kInference;       // {question_text} {context}
extern const std::string_view kCombine;         // {question_text} {context} {evidence}

extern const std::string_view kRelevance;       // {document} {query} {summary} {Relevance}
extern const std::string_view kRelevanceNoQuery;
extern const std::string_view kConsistency;     // {document} {query} {summary} {Consistency}
extern const std::string_view kConsistencyNoQuery;

/// Lead-in for the list of titles the model must not reuse.
extern const std::string_view kAvoidTitles;

using Values = std::map<std::string, std::string, std::less<>>;

/// Replace every {key} whose key is in `values`; other braces stay literal.
std::string fill(std::string_view tmpl, const Values& values);

/// "[1] a\n[2] b" style numbered list, one item per line.
std::string numbered(const std::vector<std::string>& items);

/// kAvoidTitles followed by one title per line, or "" when there are none.
std::string avoid_titles(const std::vector<std::string>& titles);

}  // namespace sunset::prompts
