#include "sunset/textmatch.hpp"

#include "sunset/error.hpp"
#include "sunset/utf8.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace sunset::textmatch {

namespace {

char32_t fold_punctuation(char32_t c) {
    switch (c) {
    case U'‘': case U'’': case U'‚': case U'‛': case U'′':
        return U'\'';
    case U'“': case U'”': case U'„': case U'‟': case U'″':
    case U'«': case U'»':
        return U'"';
    case U'‐': case U'‑': case U'‒': case U'–': case U'—':
    case U'―': case U'−':
        return U'-';
    default:
        return c;
    }
}

bool is_space(char32_t c) {
    return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

}  // namespace

std::string normalize(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status)) fail(ErrorCode::Io, "ICU NFKC normalizer unavailable");

    const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    const icu::UnicodeString composed = nfkc->normalize(source, status);
    if (U_FAILURE(status)) fail(ErrorCode::Io, "NFKC normalization failed");

    std::string utf8;
    composed.toUTF8String(utf8);

    std::u32string out;
    out.reserve(utf8.size());
    bool pending_space = false;
    for (char32_t c : utf8::decode(utf8)) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(U' ');
            pending_space = false;
        }
        out.push_back(fold_punctuation(c));
    }
    return utf8::encode(out);
}

}  // namespace sunset::textmatch
