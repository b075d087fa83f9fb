#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sfn {

// Characters removed before whitespace splitting. Fixed set; dashes and
// ampersands survive so answer strings like "ct - gi & iv contrast" keep
// their tokens.
inline bool is_stripped_punct(char c) {
    switch (c) {
        case '.': case ',': case '?': case '!': case ';': case ':':
        case '"': case '\'': case '(': case ')': case '[': case ']':
            return true;
        default:
            return false;
    }
}

// Lowercase, delete punctuation, split on whitespace, drop empties.
inline std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> tokens;
    std::string word;
    for (char c : raw) {
        if (is_stripped_punct(c)) continue;
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!word.empty()) {
                tokens.push_back(word);
                word.clear();
            }
            continue;
        }
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        word.push_back(c);
    }
    if (!word.empty()) tokens.push_back(word);
    return tokens;
}

// Trim surrounding whitespace and lowercase. The only normalization ever
// applied to answers; answer classes are otherwise kept verbatim.
inline std::string normalize_answer(std::string_view raw) {
    size_t b = 0, e = raw.size();
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (b < e && is_ws(raw[b])) ++b;
    while (e > b && is_ws(raw[e - 1])) --e;
    std::string out(raw.substr(b, e - b));
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool is_binary_answer(std::string_view raw) {
    const std::string norm = normalize_answer(raw);
    return norm == "yes" || norm == "no";
}

// Distinct n-grams of the given order over one token sequence, appended
// into `out` as '\x1f'-joined keys.
inline void collect_ngrams(const std::vector<std::string>& tokens, size_t order,
                           std::unordered_set<std::string>& out) {
    if (order == 0 || tokens.size() < order) return;
    for (size_t i = 0; i + order <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (size_t j = 1; j < order; ++j) {
            key.push_back('\x1f');
            key += tokens[i + j];
        }
        out.insert(std::move(key));
    }
}

} // namespace sfn
