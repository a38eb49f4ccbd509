#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexpath::text {

// Lowercases, folds accents (precomposed or combining) to their base letters,
// and collapses runs of whitespace to a single space with no leading or
// trailing space. Covers Latin-1 and Latin Extended-A, which is what the
// French/English corpora use; other code points pass through unchanged.
std::string normalize(std::string_view utf8);

// Splits on sentence-final punctuation followed by whitespace and keeps
// sentences with at least `min_tokens` whitespace-separated tokens.
std::vector<std::string> segment_sentences(std::string_view text, std::size_t min_tokens = 3);

// Keeps formatting tags and http(s)/mailto hyperlinks, drops every other tag
// (keeping its text), and escapes stray markup characters. Idempotent.
std::string sanitize_html(std::string_view fragment);

// Removes C0/C1 control characters except tab and newline.
std::string strip_control(std::string_view utf8);

}  // namespace lexpath::text
